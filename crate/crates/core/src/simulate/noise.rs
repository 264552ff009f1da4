//! Stationary Gaussian force noise with the classical fluctuation-dissipation
//! covariance `⟨F(t)F(0)⟩ = kT μ(|t|)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::sampled::SampledFunction;
use crate::units::{ThermalState, UnitSystem};

/// How negative circulant eigenvalues are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbeddingPolicy {
    /// Fail with [`Error::Embedding`].
    #[default]
    Strict,
    /// Zero the negative eigenvalues and mark the output as biased.
    ClipNegative,
}

/// Grid covariance of the force: `c[0]` carries the white part as
/// `2kT·δ/dt`.
pub fn force_covariance(bath: &BathModel, state: &ThermalState, units: &UnitSystem, dt: f64, n: usize) -> Result<Vec<f64>> {
    let kernel = bath.memory_kernel()?;
    let kt = state.energy(units);
    let mut c: Vec<f64> = (0..n).map(|k| kt * kernel.smooth_at(k as f64 * dt)).collect();
    if n > 0 {
        c[0] += 2.0 * kt * kernel.effective_delta() / dt;
    }
    Ok(c)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circulant-embedding sampler for a stationary covariance on a uniform grid.
#[derive(Debug, Clone)]
pub struct CirculantSampler {
    n: usize,
    sqrt_eig: Vec<f64>,
    pub clipped: bool,
    pub min_eigenvalue: f64,
}

impl CirculantSampler {
    pub fn new(cov: &[f64], policy: EmbeddingPolicy) -> Result<Self> {
        let n = cov.len();
        if n < 2 {
            return Err(Error::Validation("noise grid needs at least two points".into()));
        }
        let m = 2 * (n - 1);
        let mut row: Vec<Complex64> = Vec::with_capacity(m);
        for k in 0..n {
            row.push(Complex64::new(cov[k], 0.0));
        }
        for k in (1..n - 1).rev() {
            row.push(Complex64::new(cov[k], 0.0));
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut row);
        let eig: Vec<f64> = row.iter().map(|z| z.re).collect();
        let largest = eig.iter().copied().fold(0.0, f64::max);
        let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-10 * largest;
        let clipped = min_eigenvalue < -tol;
        if clipped && policy == EmbeddingPolicy::Strict {
            return Err(Error::Embedding {
                min_eigenvalue,
                suggestion: "lengthen the grid (more points at the same step) or coarsen the step".into(),
            });
        }
        Ok(CirculantSampler {
            n,
            sqrt_eig: eig.iter().map(|&l| (l.max(0.0) / m as f64).sqrt()).collect(),
            clipped,
            min_eigenvalue,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Two independent samples from one transform.
    pub fn sample_pair(&self, rng: &mut impl rand::Rng) -> (Vec<f64>, Vec<f64>) {
        let m = self.sqrt_eig.len();
        let mut z: Vec<Complex64> = self
            .sqrt_eig
            .iter()
            .map(|&s| {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                Complex64::new(s * a, s * b)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut z);
        (
            z[..self.n].iter().map(|v| v.re).collect(),
            z[..self.n].iter().map(|v| v.im).collect(),
        )
    }
}

/// One noise path on `n` points spaced `dt`, from RNG stream `stream` of
/// `seed`.
pub fn generate_colored_noise_with(
    bath: &BathModel,
    state: &ThermalState,
    units: &UnitSystem,
    dt: f64,
    n: usize,
    seed: u64,
    stream: u64,
    policy: EmbeddingPolicy,
) -> Result<SampledFunction> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Validation(format!("dt must be > 0, got {dt}")));
    }
    let cov = force_covariance(bath, state, units, dt, n)?;
    let sampler = CirculantSampler::new(&cov, policy)?;
    let (path, _) = sampler.sample_pair(&mut rng_for(seed, stream));
    let mut out = SampledFunction::real((0..n).map(|i| i as f64 * dt).collect(), path)?
        .with_meta("quantity", "force noise")
        .with_meta("seed", seed)
        .with_meta("stream", stream);
    if sampler.clipped {
        out = out
            .with_meta("warning", "negative embedding eigenvalues clipped; covariance is biased")
            .with_meta("min_eigenvalue", sampler.min_eigenvalue);
    }
    Ok(out)
}

/// Classical colored force noise on a uniform time grid.
pub fn generate_colored_noise(
    bath: &BathModel,
    state: &ThermalState,
    units: &UnitSystem,
    t_grid: &SampledFunction,
    seed: u64,
) -> Result<SampledFunction> {
    let dt = t_grid.uniform_step()?;
    let n = t_grid.len();
    let mut out = generate_colored_noise_with(bath, state, units, dt, n, seed, 0, EmbeddingPolicy::Strict)?;
    let t0 = t_grid.abscissae[0];
    for t in &mut out.abscissae {
        *t += t0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::pairwise_sum;

    fn grid(dt: f64, n: usize) -> SampledFunction {
        SampledFunction::from_fn_uniform(0.0, dt, n, |t| t)
    }

    fn autocov(paths: &[Vec<f64>], lag: usize) -> f64 {
        let mut acc = Vec::new();
        for p in paths {
            for i in 0..p.len() - lag {
                acc.push(p[i] * p[i + lag]);
            }
        }
        pairwise_sum(&acc) / acc.len() as f64
    }

    #[test]
    fn ohmic_is_white() {
        let u = UnitSystem::reduced();
        let bath = BathModel::ohmic(0.5).unwrap();
        let st = ThermalState::new(2.0).unwrap();
        let dt = 0.01;
        let n = 20_000;
        let f = generate_colored_noise(&bath, &st, &u, &grid(dt, n), 7).unwrap();
        let x = f.real_values().unwrap().to_vec();
        let c0 = autocov(&[x.clone()], 0);
        // increments F·dt have variance 2ζkT·dt
        assert!((c0 * dt * dt / (2.0 * 0.5 * 2.0 * dt) - 1.0).abs() < 0.02 * 3.0);
        for lag in 1..5 {
            let rho = autocov(&[x.clone()], lag) / c0;
            assert!(rho.abs() < 3.0 / (n as f64).sqrt(), "lag {lag}: {rho}");
        }
    }

    #[test]
    fn white_increment_variance() {
        let u = UnitSystem::reduced();
        let bath = BathModel::ohmic(1.5).unwrap();
        let st = ThermalState::new(0.8).unwrap();
        let dt = 1e-3;
        let mut sq = Vec::new();
        for s in 0..50 {
            let f = generate_colored_noise_with(&bath, &st, &u, dt, 4001, 3, s, EmbeddingPolicy::Strict).unwrap();
            sq.extend(f.real_values().unwrap().iter().map(|v| (v * dt).powi(2)));
        }
        let var = pairwise_sum(&sq) / sq.len() as f64;
        assert!((var / (2.0 * 1.5 * 0.8 * dt) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn relaxation_rate() {
        let u = UnitSystem::reduced();
        let (zeta, wr) = (1.0, 2.0);
        let bath = BathModel::single_relaxation(zeta, wr).unwrap();
        let st = ThermalState::new(1.0).unwrap();
        let dt = 0.02;
        let paths: Vec<Vec<f64>> = (0..200)
            .map(|s| {
                generate_colored_noise_with(&bath, &st, &u, dt, 2000, 11, s, EmbeddingPolicy::Strict)
                    .unwrap()
                    .real_values()
                    .unwrap()
                    .to_vec()
            })
            .collect();
        let c0 = autocov(&paths, 0);
        assert!((c0 / (zeta * wr) - 1.0).abs() < 0.03);
        // log-linear fit over lags spanning one decay time
        let lags: Vec<usize> = (1..=25).collect();
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &k in &lags {
            let x = k as f64 * dt;
            let y = (autocov(&paths, k) / c0).ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let nl = lags.len() as f64;
        let slope = (nl * sxy - sx * sy) / (nl * sxx - sx * sx);
        assert!((-slope / wr - 1.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn periodogram_matches_spectrum() {
        let u = UnitSystem::reduced();
        let (zeta, wr) = (0.7, 3.0);
        let bath = BathModel::single_relaxation(zeta, wr).unwrap();
        let st = ThermalState::new(1.3).unwrap();
        let (dt, n) = (0.02, 1024usize);
        let t_total = dt * n as f64;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let mut acc = vec![0.0; n / 2];
        let paths = 1000;
        for s in 0..paths {
            let f = generate_colored_noise_with(&bath, &st, &u, dt, n, 5, s, EmbeddingPolicy::Strict).unwrap();
            let mut z: Vec<Complex64> = f.real_values().unwrap().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft.process(&mut z);
            for k in 0..n / 2 {
                acc[k] += z[k].norm_sqr() * dt * dt / t_total;
            }
        }
        // E|F̂(ω)|²/T → 2kT Re μ̃(ω); compared in bands of ten bins
        for band in 0..4 {
            let (mut got, mut expect) = (0.0, 0.0);
            for k in 1 + 10 * band..11 + 10 * band {
                let w = 2.0 * std::f64::consts::PI * k as f64 / t_total;
                got += acc[k] / paths as f64;
                expect += 2.0 * 1.3 * zeta * wr * wr / (wr * wr + w * w);
            }
            assert!((got / expect - 1.0).abs() < 0.03, "band {band}: {}", got / expect);
        }
    }

    #[test]
    fn reproducible_and_stream_separated() {
        let u = UnitSystem::reduced();
        let bath = BathModel::single_relaxation(1.0, 1.0).unwrap();
        let st = ThermalState::new(1.0).unwrap();
        let a = generate_colored_noise_with(&bath, &st, &u, 0.1, 64, 9, 2, EmbeddingPolicy::Strict).unwrap();
        let b = generate_colored_noise_with(&bath, &st, &u, 0.1, 64, 9, 2, EmbeddingPolicy::Strict).unwrap();
        let c = generate_colored_noise_with(&bath, &st, &u, 0.1, 64, 9, 3, EmbeddingPolicy::Strict).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.real_values().unwrap(), c.real_values().unwrap());
    }

    #[test]
    fn non_definite_covariance_is_reported() {
        let cov = [1.0, 0.99, -0.9, 0.5];
        assert!(matches!(
            CirculantSampler::new(&cov, EmbeddingPolicy::Strict),
            Err(Error::Embedding { .. })
        ));
        let s = CirculantSampler::new(&cov, EmbeddingPolicy::ClipNegative).unwrap();
        assert!(s.clipped);
    }
}
