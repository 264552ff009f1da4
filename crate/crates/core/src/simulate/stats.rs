//! Ensemble averages with path-level jackknife errors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;
use crate::sampled::SampledFunction;

use super::langevin::TrajectoryEnsemble;

pub const MIN_PATHS: usize = 100;

/// An ensemble mean on the recorded grid with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    pub standard_error: Vec<f64>,
}

impl EnsembleEstimate {
    pub fn as_sampled(&self, quantity: &str) -> Result<SampledFunction> {
        Ok(SampledFunction::real(self.t.clone(), self.mean.clone())?.with_meta("quantity", quantity))
    }
}

/// Mean and jackknife standard error of one observable per path.
/// Leave-one-out means are formed from the fixed-order total.
pub fn jackknife_mean(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    let total = pairwise_sum(samples);
    let mean = total / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let loo: Vec<f64> = samples.iter().map(|&x| (total - x) / (n - 1) as f64).collect();
    let loo_mean = pairwise_sum(&loo) / n as f64;
    let dev: Vec<f64> = loo.iter().map(|&l| (l - loo_mean).powi(2)).collect();
    let var = (n - 1) as f64 / n as f64 * pairwise_sum(&dev);
    (mean, var.sqrt())
}

fn per_point(ens: &TrajectoryEnsemble, f: impl Fn(usize, usize) -> f64) -> Result<EnsembleEstimate> {
    if ens.n_paths() < MIN_PATHS {
        return Err(Error::Validation(format!(
            "ensemble statistics need at least {MIN_PATHS} paths, got {}",
            ens.n_paths()
        )));
    }
    let mut mean = Vec::with_capacity(ens.n_points());
    let mut se = Vec::with_capacity(ens.n_points());
    let mut column = vec![0.0; ens.n_paths()];
    for k in 0..ens.n_points() {
        for (p, c) in column.iter_mut().enumerate() {
            *c = f(p, k);
        }
        let (m, s) = jackknife_mean(&column);
        mean.push(m);
        se.push(s);
    }
    Ok(EnsembleEstimate {
        t: ens.t_grid.clone(),
        mean,
        standard_error: se,
    })
}

/// `s(t) = ⟨[x(t) - x(0)]²⟩`.
pub fn ensemble_msd(ens: &TrajectoryEnsemble) -> Result<EnsembleEstimate> {
    per_point(ens, |p, k| {
        let d = ens.positions[p][k] - ens.positions[p][0];
        d * d
    })
}

/// `⟨x(t)²⟩`.
pub fn ensemble_position_variance(ens: &TrajectoryEnsemble) -> Result<EnsembleEstimate> {
    per_point(ens, |p, k| ens.positions[p][k].powi(2))
}

/// `⟨v(t)²⟩`.
pub fn ensemble_velocity_variance(ens: &TrajectoryEnsemble) -> Result<EnsembleEstimate> {
    per_point(ens, |p, k| ens.velocities[p][k].powi(2))
}

/// Averages an estimate over recorded points with `t ≥ t_min`; the error is
/// the jackknife error of the per-path time average.
pub fn time_average(ens: &TrajectoryEnsemble, t_min: f64, f: impl Fn(usize, usize) -> f64) -> Result<(f64, f64)> {
    let ks: Vec<usize> = (0..ens.n_points()).filter(|&k| ens.t_grid[k] >= t_min).collect();
    if ks.is_empty() {
        return Err(Error::Validation(format!("no recorded points after t = {t_min}")));
    }
    let per_path: Vec<f64> = (0..ens.n_paths())
        .map(|p| {
            let v: Vec<f64> = ks.iter().map(|&k| f(p, k)).collect();
            pairwise_sum(&v) / v.len() as f64
        })
        .collect();
    Ok(jackknife_mean(&per_path))
}

/// Diffusion constant from the long-time slope: least squares of `s` against
/// `t` over `t ≥ t_min`, returning `slope/2`.
pub fn fit_diffusion_slope(msd: &EnsembleEstimate, t_min: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = msd
        .t
        .iter()
        .zip(&msd.mean)
        .filter(|(t, _)| **t >= t_min)
        .map(|(t, s)| (*t, *s))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Validation("slope fit needs at least two points".into()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ms = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ms)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(0.5 * sxy / sxx)
}

/// One-parameter fit of `s(t) = 2D[t - (1 - e^{-γt})/γ]` with `γ` known,
/// weighted by the standard errors.
pub fn fit_diffusion_shape(msd: &EnsembleEstimate, gamma: f64) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for ((t, s), se) in msd.t.iter().zip(&msd.mean).zip(&msd.standard_error) {
        if *t <= 0.0 || !(*se > 0.0) {
            continue;
        }
        let g = 2.0 * (t + (-gamma * t).exp_m1() / gamma);
        let w = 1.0 / (se * se);
        num += w * g * s;
        den += w * g * g;
    }
    if den == 0.0 {
        return Err(Error::Validation("no usable points for the diffusion fit".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let (m, se) = jackknife_mean(&xs);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((m - mean).abs() < 1e-13);
        assert!((se - (var / n).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn small_ensembles_rejected() {
        let ens = TrajectoryEnsemble {
            t_grid: vec![0.0, 1.0],
            positions: vec![vec![0.0, 1.0]; 5],
            velocities: vec![vec![0.0, 0.0]; 5],
            provenance: vec![],
        };
        assert!(ensemble_msd(&ens).is_err());
    }
}
