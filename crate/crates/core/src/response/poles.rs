//! Zeros of the response denominator.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Roots of `Σ c_k z^k` (coefficients lowest order first) by Aberth iteration.
/// Leading coefficients that vanish relative to the rest are dropped.
pub(crate) fn polynomial_roots(coef: &[Complex64]) -> Vec<Complex64> {
    let scale = coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut c: Vec<Complex64> = coef.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-14 * scale {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let start = radius.min(
        monic[..n]
            .iter()
            .enumerate()
            .map(|(k, x)| x.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-300),
    );
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(start, 2.0 * PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            d = d * x + p;
            p = p * x + monic[k];
        }
        (p, d)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, d) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * s);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Net winding of `f` around the origin along the closed polyline traced by
/// `path(s)`, `s ∈ [0, 1]`, refined until every step turns by less than
/// `max_turn` radians.
pub(crate) fn winding_number(
    f: &dyn Fn(Complex64) -> Complex64,
    path: &dyn Fn(f64) -> Complex64,
    initial: usize,
    max_turn: f64,
) -> Option<f64> {
    let mut total = 0.0;
    let mut budget = 2_000_000usize;
    let ss: Vec<f64> = (0..=initial).map(|k| k as f64 / initial as f64).collect();
    for w in ss.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = f(path(a));
        let fb = f(path(b));
        let mut stack = vec![(a, b, fa, fb, 0u32)];
        while let Some((a, b, fa, fb, depth)) = stack.pop() {
            if fa.norm() == 0.0 || fb.norm() == 0.0 || !fa.is_finite() || !fb.is_finite() {
                return None;
            }
            let turn = (fb / fa).arg();
            if turn.abs() < max_turn || depth > 60 {
                total += turn;
                continue;
            }
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let m = 0.5 * (a + b);
            let fm = f(path(m));
            stack.push((m, b, fm, fb, depth + 1));
            stack.push((a, m, fa, fm, depth + 1));
        }
    }
    Some(total / (2.0 * PI))
}
