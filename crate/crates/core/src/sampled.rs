//! Sampled functions on a grid of abscissae.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Ordinates {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Ordinates {
    pub fn len(&self) -> usize {
        match self {
            Ordinates::Real(v) => v.len(),
            Ordinates::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordinates on a grid, with free-form metadata (units, generation parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub abscissae: Vec<f64>,
    pub ordinates: Ordinates,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl SampledFunction {
    pub fn real(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(abscissae, Ordinates::Real(values))
    }

    pub fn complex(abscissae: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Self::new(abscissae, Ordinates::Complex(values))
    }

    fn new(abscissae: Vec<f64>, ordinates: Ordinates) -> Result<Self> {
        if abscissae.len() != ordinates.len() {
            return Err(Error::Format(format!(
                "{} abscissae but {} ordinates",
                abscissae.len(),
                ordinates.len()
            )));
        }
        if abscissae.iter().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite abscissa".into()));
        }
        Ok(SampledFunction {
            abscissae,
            ordinates,
            metadata: BTreeMap::new(),
        })
    }

    /// Samples `f` on a uniform grid `t0, t0 + dt, ...` of `n` points.
    pub fn from_fn_uniform(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = (0..n).map(|i| t0 + dt * i as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        SampledFunction {
            abscissae: xs,
            ordinates: Ordinates::Real(ys),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    pub fn real_values(&self) -> Result<&[f64]> {
        match &self.ordinates {
            Ordinates::Real(v) => Ok(v),
            Ordinates::Complex(_) => Err(Error::Format("expected real ordinates".into())),
        }
    }

    pub fn complex_values(&self) -> Result<&[Complex64]> {
        match &self.ordinates {
            Ordinates::Complex(v) => Ok(v),
            Ordinates::Real(_) => Err(Error::Format("expected complex ordinates".into())),
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.abscissae.windows(2).all(|w| w[1] > w[0])
    }

    /// Returns the spacing if the grid is uniform to a relative tolerance.
    pub fn uniform_step(&self) -> Result<f64> {
        let n = self.abscissae.len();
        if n < 2 {
            return Err(Error::Format("uniform grid needs at least two points".into()));
        }
        let span = self.abscissae[n - 1] - self.abscissae[0];
        let dt = span / (n - 1) as f64;
        if !(dt > 0.0) {
            return Err(Error::Format("grid is not increasing".into()));
        }
        let tol = 1e-9 * dt.max(span.abs() * 1e-6);
        for (i, &x) in self.abscissae.iter().enumerate() {
            let expected = self.abscissae[0] + dt * i as f64;
            if (x - expected).abs() > tol.max(1e-9 * dt) {
                return Err(Error::Format(format!(
                    "grid is not uniform at index {i}: {x} vs {expected}"
                )));
            }
        }
        Ok(dt)
    }
}

/// `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` logarithmically spaced points from `a` to `b` inclusive, `0 < a < b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    linspace(la, lb, n)
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else {
                l.exp()
            }
        })
        .collect()
}
