//! Piecewise interpolation on strictly increasing grids.

use crate::error::{Error, Result};

/// Cubic on one segment in the local variable `s = x - x_left`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSegment {
    pub left: f64,
    pub width: f64,
    pub coef: [f64; 4],
}

impl CubicSegment {
    #[inline]
    pub fn eval_local(&self, s: f64) -> f64 {
        let c = &self.coef;
        ((c[3] * s + c[2]) * s + c[1]) * s + c[0]
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.left + self.width
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// derivative limiting, same edge treatment as the usual PCHIP).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    segments: Vec<CubicSegment>,
}

impl MonotoneCubic {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::Format("abscissae and ordinates differ in length".into()));
        }
        if n < 2 {
            return Err(Error::Format("interpolation needs at least two points".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Format("abscissae must be strictly increasing".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Format("non-finite ordinate".into()));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (a, b) = (delta[k - 1], delta[k]);
                if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
                    d[k] = 0.0;
                } else {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / a + w2 / b);
                }
            }
            d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        let segments = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                let c2 = (3.0 * delta[i] - 2.0 * d[i] - d[i + 1]) / hi;
                let c3 = (d[i] + d[i + 1] - 2.0 * delta[i]) / (hi * hi);
                CubicSegment {
                    left: xs[i],
                    width: hi,
                    coef: [ys[i], d[i], c2, c3],
                }
            })
            .collect();
        Ok(MonotoneCubic {
            xs: xs.to_vec(),
            segments,
        })
    }

    pub fn segments(&self) -> &[CubicSegment] {
        &self.segments
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.lo() && x <= self.hi()) {
            return Err(Error::Extrapolation {
                query: x,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        let i = locate(&self.xs, x);
        let seg = &self.segments[i];
        Ok(seg.eval_local(x - seg.left))
    }
}

fn edge_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Index of the segment containing `x` (clamped to valid segments).
pub fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

/// Piecewise-linear interpolation; errors outside the grid.
pub fn linear(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let n = xs.len();
    if !(x >= xs[0] && x <= xs[n - 1]) {
        return Err(Error::Extrapolation {
            query: x,
            lo: xs[0],
            hi: xs[n - 1],
        });
    }
    let i = locate(xs, x);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    Ok(ys[i] + t * (ys[i + 1] - ys[i]))
}
