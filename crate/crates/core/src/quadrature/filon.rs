//! Batch cosine/sine transforms of a sampled spectrum.
//!
//! The spectrum is interpolated with a monotone cubic; each segment's
//! contribution `∫ p(s) e^{iω t} ds` is then evaluated exactly from the
//! polynomial moments, so the cost per time point is one pass over the
//! segments regardless of how fast the oscillation is.

use num_complex::Complex64;
use rayon::prelude::*;

use super::gauss_kronrod::{WG, XGK};
use super::pairwise_sum;
use crate::error::{Error, Result};
use crate::interp::{CubicSegment, MonotoneCubic};
use crate::sampled::SampledFunction;

/// A sampled spectrum prepared for repeated transforms.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    cubic: MonotoneCubic,
    /// Value carried from the origin to the first abscissa.
    head: f64,
}

impl SpectrumTable {
    pub fn new(spectrum: &SampledFunction) -> Result<Self> {
        let ys = spectrum.real_values()?;
        let xs = &spectrum.abscissae;
        if xs.first().is_some_and(|&x| x < 0.0) {
            return Err(Error::Domain("spectrum abscissae must be >= 0".into()));
        }
        let cubic = MonotoneCubic::new(xs, ys)?;
        Ok(SpectrumTable { cubic, head: ys[0] })
    }

    /// `∫_0^{ω_max} S(ω) e^{iωt} dω`; the spectrum is held constant on
    /// `[0, ω_first]` and vanishes beyond the last abscissa.
    pub fn fourier(&self, t: f64) -> Complex64 {
        let mut parts: Vec<Complex64> = Vec::with_capacity(self.cubic.segments().len() + 1);
        let w0 = self.cubic.lo();
        if w0 > 0.0 {
            let seg = CubicSegment {
                left: 0.0,
                width: w0,
                coef: [self.head, 0.0, 0.0, 0.0],
            };
            parts.push(segment_fourier(&seg, t));
        }
        parts.extend(self.cubic.segments().iter().map(|s| segment_fourier(s, t)));
        let re: Vec<f64> = parts.iter().map(|c| c.re).collect();
        let im: Vec<f64> = parts.iter().map(|c| c.im).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    pub fn cos_transform(&self, t: f64) -> f64 {
        self.fourier(t).re
    }

    pub fn sin_transform(&self, t: f64) -> f64 {
        self.fourier(t).im
    }
}

fn segment_fourier(seg: &CubicSegment, t: f64) -> Complex64 {
    let h = seg.width;
    let th = (t * h).abs();
    if th <= 1.0 {
        gauss_segment(seg, t, seg.left, h)
    } else if th < 8.0 {
        let n = th.ceil() as usize;
        let step = h / n as f64;
        (0..n)
            .map(|k| gauss_segment(seg, t, seg.left + step * k as f64, step))
            .sum()
    } else {
        moment_segment(seg, t)
    }
}

fn gauss_segment(seg: &CubicSegment, t: f64, a: f64, h: f64) -> Complex64 {
    let c = a + 0.5 * h;
    let half = 0.5 * h;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..5 {
        let d = half * XGK[2 * j + 1];
        for w in [c - d, c + d] {
            let v = seg.eval_local(w - seg.left);
            acc += Complex64::from_polar(v, w * t) * WG[j];
        }
    }
    acc * half
}

/// Exact `∫_0^h p(s) e^{it(a+s)} ds` from the upward moment recursion, stable
/// once `t h` is large.
fn moment_segment(seg: &CubicSegment, t: f64) -> Complex64 {
    let h = seg.width;
    let it = Complex64::new(0.0, t);
    let eh = Complex64::from_polar(1.0, t * h);
    let mut m = [Complex64::new(0.0, 0.0); 4];
    m[0] = (eh - 1.0) / it;
    let mut hk = 1.0;
    for k in 1..4 {
        hk *= h;
        m[k] = (eh * hk - m[k - 1] * k as f64) / it;
    }
    let sum: Complex64 = (0..4).map(|k| m[k] * seg.coef[k]).sum();
    Complex64::from_polar(1.0, t * seg.left) * sum
}

/// `∫_0^∞ S(ω) cos(ωt) dω` for every `t` in `t_grid`.
pub fn inverse_cos_transform(spectrum: &SampledFunction, t_grid: &[f64]) -> Result<SampledFunction> {
    let table = SpectrumTable::new(spectrum)?;
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("time grid must be finite".into()));
    }
    let values: Vec<f64> = t_grid.par_iter().map(|&t| table.cos_transform(t)).collect();
    let mut out = SampledFunction::real(t_grid.to_vec(), values)?;
    out.metadata = spectrum.metadata.clone();
    Ok(out.with_meta("transform", "cosine"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::linspace;

    #[test]
    fn polynomial_segment_two_ways() {
        let seg = CubicSegment {
            left: 0.3,
            width: 2.0,
            coef: [1.0, -0.5, 0.25, 0.125],
        };
        for t in [5.0, 9.0, 40.0] {
            let a = moment_segment(&seg, t);
            let n = 400;
            let step = seg.width / n as f64;
            let b: Complex64 = (0..n)
                .map(|k| gauss_segment(&seg, t, seg.left + step * k as f64, step))
                .sum();
            assert!((a - b).norm() < 1e-12, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn lorentzian_gives_exponential() {
        let g = 1.0;
        let ws = linspace(0.0, 400.0, 40_001);
        let ys: Vec<f64> = ws.iter().map(|w| 1.0 / (w * w + g * g)).collect();
        let s = SampledFunction::real(ws, ys).unwrap();
        let ts = [0.5, 1.0, 2.0, 4.0];
        let out = inverse_cos_transform(&s, &ts).unwrap();
        for (t, v) in ts.iter().zip(out.real_values().unwrap()) {
            let exact = std::f64::consts::PI / 2.0 * (-t).exp();
            // truncation at ω = 400 leaves an O(1/(ω_max² t)) remainder
            assert!((v - exact).abs() < 2e-5, "t={t}: {v} vs {exact}");
        }
    }

    #[test]
    fn zero_spectrum() {
        let s = SampledFunction::real(linspace(0.0, 1.0, 11), vec![0.0; 11]).unwrap();
        let out = inverse_cos_transform(&s, &[0.0, 1.0, 100.0]).unwrap();
        assert!(out.real_values().unwrap().iter().all(|&v| v == 0.0));
    }
}
