//! Analytic continuation of a tabulated spectral distribution.
//!
//! With `g` the even extension of the stored `Re μ̃`,
//!
//! ```text
//!     μ̃(z) = (i/π) ∫ g(ω) / (z - ω) dω ,    Im z ≥ 0 ,
//! ```
//!
//! whose boundary value on the real axis has real part `g` and imaginary part
//! the Hilbert transform of `g`. `g` is piecewise cubic, so every segment
//! close to `z` is integrated in closed form (polynomial division plus a
//! logarithm); distant segments use 10-point Gauss-Legendre, which is exact to
//! rounding there.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::interp::{CubicSegment, MonotoneCubic};
use crate::quadrature::gauss_kronrod::gauss10_complex;

/// `∫_0^h p(s) / (c - s) ds` for the segment cubic `p`.
fn cauchy_segment(seg: &CubicSegment, c: Complex64) -> Complex64 {
    let h = seg.width;
    let mid = Complex64::new(0.5 * h, 0.0);
    if (c - mid).norm() > 2.0 * h {
        let mut f = |s: f64| seg.eval_local(s) / (c - s);
        return gauss10_complex(&mut f, 0.0, h);
    }
    let [c0, c1, c2, c3] = seg.coef;
    let pc = ((c * c3 + c2) * c + c1) * c + c0;
    // p(s) = p(c) + (s - c) r(s)
    let r_int = c3 * h * h * h / 3.0 + (c * c3 + c2) * h * h / 2.0 + ((c * c3 + c2) * c + c1) * h;
    pc * (c.ln() - (c - h).ln()) - r_int
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Continuation {
    cubic: MonotoneCubic,
    head: f64,
}

impl Continuation {
    pub(crate) fn new(cubic: MonotoneCubic, head: f64) -> Self {
        Continuation { cubic, head }
    }

    /// `μ̃(z)` for `Im z ≥ 0`, `Re z ≥ 0`.
    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        let mut z = z;
        if z.im == 0.0 {
            // keep the branch of the logarithm on the upper side of the cut
            z.im = 0.0;
            if self.is_node(z.re) {
                z.re *= 1.0 + 4.0 * f64::EPSILON;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut add = |seg: &CubicSegment| {
            // ∫ g(ω)[1/(z-ω) + 1/(z+ω)] over the segment
            acc += cauchy_segment(seg, z - seg.left);
            acc -= cauchy_segment(seg, -z - seg.left);
        };
        let w0 = self.cubic.lo();
        if w0 > 0.0 {
            add(&CubicSegment {
                left: 0.0,
                width: w0,
                coef: [self.head, 0.0, 0.0, 0.0],
            });
        }
        for seg in self.cubic.segments() {
            add(seg);
        }
        Complex64::new(0.0, 1.0 / PI) * acc
    }

    fn is_node(&self, w: f64) -> bool {
        w == 0.0
            || w == self.cubic.lo()
            || self
                .cubic
                .segments()
                .iter()
                .any(|s| s.left == w || s.right() == w)
    }
}
