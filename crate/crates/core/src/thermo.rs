//! Free energy of an oscillator coupled to a bath, with the derived energy and
//! entropy, and the blackbody free-energy shift of a free charge.
//!
//! `F(T) = (1/π) ∫₀^∞ f(ω,T) Im{d log α(ω)/dω} dω` with the single-oscillator
//! free energy `f(ω,T) = kT log(1 - e^{-ħω/kT})`; zero-point terms are omitted.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_spectral, QuadResult, QuadratureSpec};
use crate::response::{ResponseFunction, SystemConfig};
use crate::units::{ThermalState, UnitSystem};

/// `log(1 - e^{-x})` for `x > 0`.
fn log_one_minus_exp(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `f(ω,T) = kT log(1 - e^{-ħω/kT})`, zero at `T = 0`.
pub fn single_oscillator_free_energy(omega: f64, state: &ThermalState, units: &UnitSystem) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    let kt = state.energy(units);
    if kt == 0.0 {
        return Ok(0.0);
    }
    Ok(kt * log_one_minus_exp(units.hbar * omega / kt))
}

/// `ħω/2`, for callers that want the zero-point term back in `f`.
pub fn zero_point_energy(omega: f64, units: &UnitSystem) -> f64 {
    0.5 * units.hbar * omega
}

/// `s(ω,T) = -∂f/∂T`, per unit `k_B`: `x/(e^x - 1) - log(1 - e^{-x})`.
pub fn single_oscillator_entropy(omega: f64, state: &ThermalState, units: &UnitSystem) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    let kt = state.energy(units);
    if kt == 0.0 {
        return Ok(0.0);
    }
    let x = units.hbar * omega / kt;
    Ok(units.kb * (x / x.exp_m1() - log_one_minus_exp(x)))
}

#[derive(Debug, Clone)]
pub struct FreeEnergyRequest<'a> {
    pub resp: &'a ResponseFunction,
    pub state: ThermalState,
    pub quad: QuadratureSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoPoint {
    pub temperature: f64,
    pub free_energy: f64,
    pub energy: f64,
    pub entropy: f64,
}

impl<'a> FreeEnergyRequest<'a> {
    pub fn new(resp: &'a ResponseFunction, state: ThermalState) -> Self {
        FreeEnergyRequest {
            resp,
            state,
            quad: *resp.quadrature(),
        }
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Ok(FreeEnergyRequest {
            state: ThermalState::new(temperature)?,
            ..self.clone()
        })
    }
}

/// `Im{d log α/dω} = -Im(D'(ω)/D(ω))`.
pub fn phase_derivative(resp: &ResponseFunction, omega: f64) -> Result<f64> {
    let z = Complex64::new(omega, 0.0);
    let d = resp.denominator(z)?;
    let dd = match resp.denominator_derivative(z) {
        Some(v) => v?,
        None => numeric_derivative(resp, omega)?,
    };
    Ok(-(dd / d).im)
}

/// Central differences on `D(ω)` with one Richardson step; `h = 1e-3 ω`,
/// shrunk to stay inside the grid of a tabulated bath.
fn numeric_derivative(resp: &ResponseFunction, omega: f64) -> Result<Complex64> {
    let mut h = 1e-3 * omega;
    if let BathModel::Tabulated(tab) = resp.bath() {
        let xs = &tab.table().abscissae;
        let i = xs.partition_point(|&x| x <= omega);
        let mut gap = f64::INFINITY;
        if i > 0 {
            gap = gap.min(omega - xs[i - 1]);
        }
        if i < xs.len() {
            gap = gap.min(xs[i] - omega);
        }
        if gap > 0.0 {
            h = h.min(0.5 * gap);
        }
    }
    let central = |h: f64| -> Result<Complex64> {
        let a = resp.denominator(Complex64::new(omega + h, 0.0))?;
        let b = resp.denominator(Complex64::new(omega - h, 0.0))?;
        Ok((a - b) / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// `F(T)` by the phase-derivative formula.
pub fn oscillator_free_energy_full(req: &FreeEnergyRequest) -> Result<QuadResult> {
    let resp = req.resp;
    let units = resp.system().units;
    let kt = req.state.energy(&units);
    if kt == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
            evaluations: 0,
            spec: req.quad,
        });
    }
    let state = req.state;
    let thermal_w = kt / units.hbar;
    let g_ref = phase_derivative(resp, resp.scale().min(thermal_w))
        .map(f64::abs)
        .unwrap_or(0.0)
        .max(1.0 / resp.scale());
    let ig = resp
        .integrand(
            move |w: f64| {
                if w <= 0.0 {
                    return 0.0;
                }
                let f = single_oscillator_free_energy(w, &state, &units).unwrap_or(0.0);
                if f == 0.0 {
                    return 0.0;
                }
                f * phase_derivative(resp, w).unwrap_or(0.0) / PI
            },
            0.0,
            f64::NEG_INFINITY,
            kt * g_ref,
        )
        .breakpoint(thermal_w)
        .breakpoint(40.0 * thermal_w);
    integrate_spectral(&ig, &req.quad)
}

pub fn oscillator_free_energy(req: &FreeEnergyRequest) -> Result<f64> {
    Ok(oscillator_free_energy_full(req)?.value)
}

/// `S = (1/π) ∫ s(ω,T) Im{d log α/dω} dω`, the temperature derivative taken
/// under the integral.
pub fn entropy_spectral(req: &FreeEnergyRequest) -> Result<f64> {
    let resp = req.resp;
    let units = resp.system().units;
    let kt = req.state.energy(&units);
    if kt == 0.0 {
        return Err(Error::Domain("entropy needs T > 0".into()));
    }
    let state = req.state;
    let thermal_w = kt / units.hbar;
    let ig = resp
        .integrand(
            move |w: f64| {
                if w <= 0.0 {
                    return 0.0;
                }
                let s = single_oscillator_entropy(w, &state, &units).unwrap_or(0.0);
                if s == 0.0 {
                    return 0.0;
                }
                s * phase_derivative(resp, w).unwrap_or(0.0) / PI
            },
            0.0,
            f64::NEG_INFINITY,
            units.kb / resp.scale(),
        )
        .breakpoint(thermal_w)
        .breakpoint(40.0 * thermal_w);
    Ok(integrate_spectral(&ig, &req.quad)?.value)
}

/// `(U, S)` with `S = -∂F/∂T` by Richardson-extrapolated central differences
/// (`δT = 1e-4 T`) and `U = F + TS`.
pub fn energy_and_entropy(req: &FreeEnergyRequest) -> Result<(f64, f64)> {
    let t = req.state.temperature;
    if t == 0.0 {
        return Err(Error::Domain("entropy needs T > 0".into()));
    }
    let fine = FreeEnergyRequest {
        quad: req.quad.with_rel_tol(req.quad.rel_tol.min(1e-12)),
        ..req.clone()
    };
    let f_at = |temp: f64| oscillator_free_energy(&fine.at_temperature(temp)?);
    let dt = 1e-4 * t;
    let central = |h: f64| -> Result<f64> { Ok((f_at(t + h)? - f_at(t - h)?) / (2.0 * h)) };
    let d1 = central(dt)?;
    let d2 = central(0.5 * dt)?;
    let s = -(4.0 * d2 - d1) / 3.0;
    let f = f_at(t)?;
    Ok((f + t * s, s))
}

/// `(T, F, U, S)` rows over a temperature grid.
pub fn thermo_sweep(req: &FreeEnergyRequest, temperatures: &[f64]) -> Result<Vec<ThermoPoint>> {
    temperatures
        .par_iter()
        .map(|&temp| {
            let r = req.at_temperature(temp)?;
            let f = oscillator_free_energy(&r)?;
            let (u, s) = if temp > 0.0 {
                energy_and_entropy(&r)?
            } else {
                (0.0, 0.0)
            };
            Ok(ThermoPoint {
                temperature: temp,
                free_energy: f,
                energy: u,
                entropy: s,
            })
        })
        .collect()
}

/// `ΔF = π e² (kT)² / (9 ħ M c³)` for a free charge of mass `M` in blackbody
/// radiation.
pub fn rydberg_blackbody_shift(state: &ThermalState, mass: f64, units: &UnitSystem) -> Result<f64> {
    units.require_physical("blackbody free-energy shift")?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Validation(format!("mass must be > 0, got {mass}")));
    }
    if state.temperature == 0.0 {
        return Err(Error::Domain("blackbody shift needs T > 0".into()));
    }
    let kt = state.energy(units);
    Ok(PI * units.e_charge.powi(2) * kt * kt / (9.0 * units.hbar * mass * units.c.powi(3)))
}

/// Outcome of evaluating the free-energy formula for a free charge in the
/// radiation bath, next to the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RydbergCheck {
    pub closed_form: f64,
    pub numeric: f64,
    pub relative_difference: f64,
    pub cutoff: f64,
}

impl RydbergCheck {
    pub fn agrees(&self, rel_tol: f64) -> bool {
        self.relative_difference <= rel_tol
    }
}

/// Numeric free energy of a free particle (`K = 0`) coupled to the radiation
/// bath with cutoff `cutoff_ratio · kT/ħ`.
pub fn rydberg_shift_numeric(
    state: &ThermalState,
    mass: f64,
    units: &UnitSystem,
    cutoff_ratio: f64,
    quad: &QuadratureSpec,
) -> Result<RydbergCheck> {
    let closed_form = rydberg_blackbody_shift(state, mass, units)?;
    if !(cutoff_ratio.is_finite() && cutoff_ratio > 0.0) {
        return Err(Error::Validation(format!("cutoff ratio must be > 0, got {cutoff_ratio}")));
    }
    let cutoff = cutoff_ratio * state.energy(units) / units.hbar;
    let bath = BathModel::blackbody(mass, cutoff, units)?;
    let resp = ResponseFunction::new(SystemConfig::free(mass, *units)?, bath)?;
    let numeric = oscillator_free_energy(&FreeEnergyRequest::new(&resp, *state).with_quadrature(*quad))?;
    Ok(RydbergCheck {
        closed_form,
        numeric,
        relative_difference: ((numeric - closed_form) / closed_form).abs(),
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
        use approx::assert_relative_eq;

    fn reduced() -> UnitSystem {
        UnitSystem::reduced()
    }

    fn ohmic_osc(w0: f64, gamma: f64) -> ResponseFunction {
        let sys = SystemConfig::oscillator(1.0, w0, reduced()).unwrap();
        ResponseFunction::new(sys, BathModel::ohmic(gamma).unwrap()).unwrap()
    }

    fn st(t: f64) -> ThermalState {
        ThermalState::new(t).unwrap()
    }

    #[test]
    fn single_oscillator_limits() {
        let u = reduced();
        assert_eq!(single_oscillator_free_energy(1.0, &ThermalState::zero(), &u).unwrap(), 0.0);
        let f = single_oscillator_free_energy(1.0, &st(1e4), &u).unwrap();
        let hi = 1e4 * (1e-4f64).ln();
        assert!((f / hi - 1.0).abs() < 1e-3);
        for t in [0.01, 0.3, 5.0] {
            assert!(single_oscillator_free_energy(2.0, &st(t), &u).unwrap() < 0.0);
        }
        assert!(single_oscillator_free_energy(0.0, &st(1.0), &u).is_err());
        // ∂f/∂T against the closed-form entropy
        let (w, t, h) = (1.3, 0.7, 1e-5);
        let fd = -(single_oscillator_free_energy(w, &st(t + h), &u).unwrap()
            - single_oscillator_free_energy(w, &st(t - h), &u).unwrap())
            / (2.0 * h);
        assert_relative_eq!(fd, single_oscillator_entropy(w, &st(t), &u).unwrap(), epsilon = 0.0, max_relative = 1e-8);
    }

    #[test]
    fn phase_derivative_closed_and_numeric_agree() {
        let r = ohmic_osc(1.0, 0.4);
        let sr = ResponseFunction::new(
            SystemConfig::oscillator(1.0, 1.0, reduced()).unwrap(),
            BathModel::single_relaxation(0.4, 3.0).unwrap(),
        )
        .unwrap();
        for w in [0.3, 1.0, 2.5] {
            let a = phase_derivative(&r, w).unwrap();
            // ζ(K + mω²)/|D|²
            let exact = 0.4 * (1.0 + w * w) / ((1.0 - w * w).powi(2) + 0.16 * w * w);
            assert_relative_eq!(a, exact, epsilon = 0.0, max_relative = 1e-12);
            let z = Complex64::new(w, 0.0);
            let closed = sr.denominator_derivative(z).unwrap().unwrap();
            let numeric = numeric_derivative(&sr, w).unwrap();
            assert!((closed - numeric).norm() < 1e-9 * closed.norm());
        }
    }

    #[test]
    fn weak_coupling_collapse() {
        let u = reduced();
        let t = st(1.0);
        let target = single_oscillator_free_energy(1.0, &t, &u).unwrap();
        let mut last = f64::INFINITY;
        for g in [1e-2, 1e-3, 1e-4] {
            let r = ohmic_osc(1.0, g);
            let f = oscillator_free_energy(&FreeEnergyRequest::new(&r, t)).unwrap();
            let err = (f / target - 1.0).abs();
            assert!(err < last, "γ={g}: {err} !< {last}");
            last = err;
        }
        assert!(last < 1e-3, "{last}");
        let r = ohmic_osc(1.0, 0.1);
        assert_eq!(oscillator_free_energy(&FreeEnergyRequest::new(&r, ThermalState::zero())).unwrap(), 0.0);
    }

    #[test]
    fn continuous_across_critical_damping() {
        let t = st(0.8);
        let a = oscillator_free_energy(&FreeEnergyRequest::new(&ohmic_osc(1.0, 2.0 - 1e-7), t)).unwrap();
        let b = oscillator_free_energy(&FreeEnergyRequest::new(&ohmic_osc(1.0, 2.0 + 1e-7), t)).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs());
    }

    #[test]
    fn entropy_difference_matches_spectral() {
        let r = ohmic_osc(1.0, 0.5);
        for t in [0.2, 1.0, 4.0] {
            let req = FreeEnergyRequest::new(&r, st(t));
            let (u, s) = energy_and_entropy(&req).unwrap();
            let s2 = entropy_spectral(&req).unwrap();
            assert!(s >= 0.0);
            assert_relative_eq!(s, s2, epsilon = 0.0, max_relative = 1e-5);
            let f = oscillator_free_energy(&req).unwrap();
            assert_relative_eq!(u, f + t * s, epsilon = 0.0, max_relative = 1e-12);
        }
        assert!(energy_and_entropy(&FreeEnergyRequest::new(&r, ThermalState::zero())).is_err());
    }

    #[test]
    fn equipartition_energy() {
        let r = ohmic_osc(1.0, 1e-3);
        let kt = 100.0;
        let (u, _) = energy_and_entropy(&FreeEnergyRequest::new(&r, st(kt))).unwrap();
        assert!((u / kt - 1.0).abs() < 0.01, "{u}");
    }

    #[test]
    fn entropy_increases_with_temperature() {
        let r = ohmic_osc(1.0, 0.3);
        let req = FreeEnergyRequest::new(&r, st(1.0));
        let rows = thermo_sweep(&req, &[0.1, 0.3, 1.0, 3.0]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].entropy > w[0].entropy);
        }
    }

    #[test]
    fn rydberg_closed_form() {
        let u = UnitSystem::gaussian_cgs();
        let m = crate::units::cgs::ELECTRON_MASS;
        let a = rydberg_blackbody_shift(&st(300.0), m, &u).unwrap();
        let b = rydberg_blackbody_shift(&st(600.0), m, &u).unwrap();
        assert_eq!(b / a, 4.0);
        assert!(a > 0.0);
        // frozen regression value for an electron at 300 K (erg)
        assert!((a / 5.337_665_649_403_332e-24 - 1.0).abs() < 1e-12, "{a:e}");
        assert!(matches!(
            rydberg_blackbody_shift(&st(300.0), 1.0, &reduced()),
            Err(Error::Unit(_))
        ));
    }

    #[test]
    fn rydberg_numeric_cross_check() {
        let u = UnitSystem::gaussian_cgs();
        let m = crate::units::cgs::ELECTRON_MASS;
        let c = rydberg_shift_numeric(&st(300.0), m, &u, 1e3, &QuadratureSpec::default()).unwrap();
        assert!(c.agrees(0.05), "{c:?}");
        assert!(c.numeric > 0.0);
    }
}
