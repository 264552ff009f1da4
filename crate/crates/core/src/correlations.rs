//! Fluctuation-dissipation quantities.
//!
//! Position correlations are spectral integrals of `Im α(ω)` weighted by the
//! thermal factor `coth(ħω/2kT)`; force correlations only need `Re μ̃(ω)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_spectral, Oscillation, QuadResult, QuadratureSpec, SpectralIntegrand};
use crate::response::ResponseFunction;
use crate::sampled::SampledFunction;
use crate::units::{Regime, ThermalFactor, ThermalState, UnitSystem};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A response paired with a temperature.
#[derive(Debug, Clone)]
pub struct CorrelationRequest<'a> {
    pub resp: &'a ResponseFunction,
    pub state: ThermalState,
    pub regime: Regime,
    pub quad: QuadratureSpec,
}

/// Which integrand represents `C(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationPath {
    /// `Im α(ω)`
    Susceptibility,
    /// `ω |α(ω)|² Re μ̃(ω)`
    Dissipation,
}

impl<'a> CorrelationRequest<'a> {
    pub fn new(resp: &'a ResponseFunction, state: ThermalState) -> Self {
        CorrelationRequest {
            resp,
            state,
            regime: Regime::Quantum,
            quad: *resp.quadrature(),
        }
    }

    pub fn classical(mut self) -> Self {
        self.regime = Regime::Classical;
        self
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    fn units(&self) -> &UnitSystem {
        &self.resp.system().units
    }

    fn thermal(&self) -> ThermalFactor {
        ThermalFactor::new(&self.state, self.units(), self.regime)
    }

    /// Rough size of `coth` over the response's band.
    fn thermal_size(&self) -> f64 {
        let kt = self.state.energy(self.units());
        (2.0 * kt / (self.units().hbar * self.resp.scale())).max(1.0)
    }

    fn build(&self, path: CorrelationPath, prefactor: f64) -> SpectralIntegrand<'a> {
        let resp = self.resp;
        let mag = prefactor.abs() * resp.im_alpha_magnitude() * self.thermal_size();
        let z = resp.im_alpha_zero_power();
        let q = resp.im_alpha_tail_power();
        let ig = match path {
            CorrelationPath::Susceptibility => resp.integrand(
                move |w: f64| prefactor * resp.im_susceptibility(w).unwrap_or(0.0),
                z,
                q,
                mag,
            ),
            CorrelationPath::Dissipation => resp.integrand(
                move |w: f64| prefactor * resp.dissipative_form(w).unwrap_or(0.0),
                z,
                q,
                mag,
            ),
        };
        ig.thermal(self.thermal())
    }

    /// `C(t) = (ħ/π) ∫ Im α coth(ħω/2kT) cos ωt dω` through the chosen
    /// integrand.
    pub fn position_autocorrelation_via(&self, path: CorrelationPath, t: f64) -> Result<QuadResult> {
        if self.resp.system().is_free() {
            return Err(Error::Divergent(
                "free particle: C(t) diverges at low frequency; use mean_square_displacement".into(),
            ));
        }
        let hbar = self.units().hbar;
        let ig = self.build(path, hbar / PI).oscillation(Oscillation::Cos(t));
        integrate_spectral(&ig, &self.quad)
    }

    /// Symmetrized position autocorrelation, evaluated through the
    /// dissipation form `ω|α|²Re μ̃`.
    pub fn position_autocorrelation(&self, t: f64) -> Result<f64> {
        Ok(self.position_autocorrelation_via(CorrelationPath::Dissipation, t)?.value)
    }

    /// Both evaluation paths, required to agree to `rel_tol`.
    pub fn position_autocorrelation_checked(&self, t: f64, rel_tol: f64) -> Result<f64> {
        let a = self.position_autocorrelation_via(CorrelationPath::Dissipation, t)?.value;
        let b = self.position_autocorrelation_via(CorrelationPath::Susceptibility, t)?.value;
        if (a - b).abs() > rel_tol * a.abs().max(b.abs()) {
            return Err(Error::PathMismatch {
                primary: a,
                alternate: b,
            });
        }
        Ok(a)
    }

    /// `⟨x²⟩ = C(0)`.
    pub fn variance(&self) -> Result<f64> {
        self.position_autocorrelation(0.0)
    }

    /// `s(t) = (2ħ/π) ∫ Im α coth(ħω/2kT) (1 - cos ωt) dω`.
    pub fn mean_square_displacement_full(&self, t: f64) -> Result<QuadResult> {
        let hbar = self.units().hbar;
        let ig = self
            .build(CorrelationPath::Susceptibility, 2.0 * hbar / PI)
            .oscillation(Oscillation::OneMinusCos(t));
        integrate_spectral(&ig, &self.quad)
    }

    pub fn mean_square_displacement(&self, t: f64) -> Result<f64> {
        Ok(self.mean_square_displacement_full(t)?.value.max(0.0))
    }

    /// `ṡ(t)/2 = (ħ/π) ∫ ω Im α coth sin ωt dω`.
    pub fn half_msd_slope(&self, t: f64) -> Result<f64> {
        let hbar = self.units().hbar;
        let resp = self.resp;
        let mag = hbar / PI * resp.im_alpha_magnitude() * resp.scale() * self.thermal_size();
        let ig = resp
            .integrand(
                move |w: f64| hbar / PI * w * resp.im_susceptibility(w).unwrap_or(0.0),
                resp.im_alpha_zero_power() + 1.0,
                resp.im_alpha_tail_power() + 1.0,
                mag,
            )
            .thermal(self.thermal())
            .oscillation(Oscillation::Sin(t));
        Ok(integrate_spectral(&ig, &self.quad)?.value)
    }

    /// `P(ω) = (ħ/π) ω |α|² Re μ̃ coth(ħω/2kT)`.
    pub fn power_spectrum(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("power spectrum needs omega > 0, got {omega}")));
        }
        let hbar = self.units().hbar;
        let p = hbar / PI * self.resp.dissipative_form(omega)? * self.thermal().weight(omega);
        Ok(p.max(0.0))
    }

    /// `∫_0^∞ P(ω) dω`, integrating [`Self::power_spectrum`] itself.
    pub fn spectrum_integral(&self) -> Result<f64> {
        let resp = self.resp;
        let hbar = self.units().hbar;
        let mag = hbar / PI * resp.im_alpha_magnitude() * self.thermal_size();
        let thermal = self.thermal();
        if matches!(thermal, ThermalFactor::Zero) {
            return Ok(0.0);
        }
        let ig = resp.integrand(
            move |w: f64| self.power_spectrum(w).unwrap_or(0.0),
            resp.im_alpha_zero_power() + thermal.zero_power(),
            resp.im_alpha_tail_power() + thermal.tail_power(),
            mag,
        );
        Ok(integrate_spectral(&ig, &self.quad)?.value)
    }

    pub fn autocorrelation_grid(&self, ts: &[f64]) -> Result<SampledFunction> {
        let v: Vec<f64> = ts
            .par_iter()
            .map(|&t| self.position_autocorrelation(t))
            .collect::<Result<_>>()?;
        SampledFunction::real(ts.to_vec(), v)
    }

    pub fn msd_grid(&self, ts: &[f64]) -> Result<SampledFunction> {
        let v: Vec<f64> = ts
            .par_iter()
            .map(|&t| self.mean_square_displacement(t))
            .collect::<Result<_>>()?;
        SampledFunction::real(ts.to_vec(), v)
    }

    pub fn spectrum_grid(&self, omegas: &[f64]) -> Result<SampledFunction> {
        let v: Vec<f64> = omegas
            .par_iter()
            .map(|&w| self.power_spectrum(w))
            .collect::<Result<_>>()?;
        SampledFunction::real(omegas.to_vec(), v)
    }
}

fn force_integrand<'a>(
    bath: &'a BathModel,
    weight: f64,
    extra_power: f64,
) -> Result<SpectralIntegrand<'a>> {
    if let BathModel::Ohmic { .. } = bath {
        return Err(Error::Divergent(
            "Ohmic force correlations are delta-correlated (2ζkT δ(t) classically); \
             use a bath with a cutoff"
                .into(),
        ));
    }
    let scale = bath.characteristic_frequency().unwrap_or(1.0);
    let mut ig = SpectralIntegrand::new(move |w: f64| weight * bath.re_mu(w) * w.powf(extra_power))
        .zero_power(bath.zero_power() + extra_power)
        .tail_power(bath.tail_power() + extra_power)
        .scale(scale)
        .magnitude(weight.abs() * bath.peak_value() * scale.powf(extra_power))
        .breakpoint(scale);
    if let Some(u) = bath.support() {
        ig = ig.support(u);
    }
    Ok(ig)
}

/// `C_FF(t) = (1/π) ∫ Re μ̃ ħω coth(ħω/2kT) cos ωt dω`. Independent of the
/// system: only the bath enters.
pub fn force_autocorrelation(
    bath: &BathModel,
    state: &ThermalState,
    units: &UnitSystem,
    regime: Regime,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let ig = force_integrand(bath, units.hbar / PI, 1.0)?
        .thermal(ThermalFactor::new(state, units, regime))
        .oscillation(Oscillation::Cos(t));
    Ok(integrate_spectral(&ig, quad)?.value)
}

/// `∫ Re μ̃ ω sin ωt dω`; the commutator `[F(t₀+t), F(t₀)]` is `2ħ/(iπ)`
/// times this. Temperature independent and odd in `t`.
pub fn force_commutator(bath: &BathModel, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    let ig = force_integrand(bath, 1.0, 1.0)?.oscillation(Oscillation::Sin(t));
    Ok(integrate_spectral(&ig, quad)?.value)
}

/// Classical free-particle MSD in an Ohmic bath,
/// `s(t) = (2kT/mγ²)(e^{-γt} - 1 + γt)`.
pub fn classical_free_msd(kt: f64, mass: f64, gamma: f64, t: f64) -> f64 {
    let x = gamma * t.abs();
    let shape = if x < 1e-2 {
        // e^{-x} - 1 + x, summed directly to avoid cancellation
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        for k in 3..12 {
            sum += term;
            term *= -x / k as f64;
        }
        sum
    } else {
        x + (-x).exp_m1()
    };
    2.0 * kt / (mass * gamma * gamma) * shape
}

/// Short-time asymptote of the zero-temperature Ohmic MSD,
/// `-(ħζ/πm²) t² {ln(ζt/m) + γ_E - 3/2}`.
pub fn zero_temperature_msd_asymptote(hbar: f64, mass: f64, zeta: f64, t: f64) -> f64 {
    let g = zeta / mass;
    -(hbar * zeta / (PI * mass * mass)) * t * t * ((g * t).ln() + EULER_GAMMA - 1.5)
}

/// Einstein diffusion constant `D = kT/mγ`.
pub fn diffusion_constant(resp: &ResponseFunction, state: &ThermalState) -> Result<f64> {
    let BathModel::Ohmic { zeta } = resp.bath() else {
        return Err(Error::Unsupported("diffusion constant is defined for the Ohmic bath".into()));
    };
    if !resp.system().is_free() {
        return Err(Error::Unsupported("diffusion constant needs a free particle (K = 0)".into()));
    }
    if state.temperature == 0.0 {
        return Err(Error::Unsupported("no classical diffusion constant at T = 0".into()));
    }
    Ok(state.energy(&resp.system().units) / zeta)
}

/// `C_d(t, t') = ⟨x(t)⟩⟨x(t')⟩` for a driven mean motion.
#[derive(Debug, Clone)]
pub struct DrivenCorrelation {
    mean: SampledFunction,
}

pub fn driven_correlation(mean: &SampledFunction) -> Result<DrivenCorrelation> {
    mean.real_values()?;
    Ok(DrivenCorrelation { mean: mean.clone() })
}

impl DrivenCorrelation {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        let x = self.mean.real_values().expect("checked at construction");
        x[i] * x[j]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.at(i, j)).collect()).collect()
    }

    /// `C(t_i, t_j) = C₀(t_i - t_j) + C_d(t_i, t_j)`.
    pub fn full(&self, c0: impl Fn(f64) -> Result<f64>, i: usize, j: usize) -> Result<f64> {
        let t = &self.mean.abscissae;
        Ok(c0(t[i] - t[j])? + self.at(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::SystemConfig;
    use crate::sampled::{linspace, logspace};
    use approx::assert_relative_eq;

    fn reduced() -> UnitSystem {
        UnitSystem::reduced()
    }

    fn oscillator(w0: f64, gamma: f64) -> ResponseFunction {
        let sys = SystemConfig::oscillator(1.0, w0, reduced()).unwrap();
        ResponseFunction::new(sys, BathModel::ohmic(gamma).unwrap()).unwrap()
    }

    fn free(m: f64, gamma: f64) -> ResponseFunction {
        let sys = SystemConfig::free(m, reduced()).unwrap();
        ResponseFunction::new(sys, BathModel::ohmic(m * gamma).unwrap()).unwrap()
    }

    #[test]
    fn oscillator_variance_limits() {
        let w0 = 1.0;
        let r = oscillator(w0, 1e-3);
        let hot = CorrelationRequest::new(&r, ThermalState::new(1e3).unwrap());
        let v = hot.variance().unwrap();
        assert!((v / (1e3 / (w0 * w0)) - 1.0).abs() < 5e-3, "{v}");
        let cold = CorrelationRequest::new(&r, ThermalState::zero());
        let v = cold.variance().unwrap();
        assert!((v / (0.5 / w0) - 1.0).abs() < 5e-3, "{v}");
    }

    #[test]
    fn two_paths_agree() {
        for (w0, g, kt) in [(1.0, 0.1, 0.5), (2.0, 3.0, 0.0), (1.0, 1e-3, 10.0)] {
            let r = oscillator(w0, g);
            let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap())
                .with_quadrature(QuadratureSpec::default().with_rel_tol(1e-12));
            for t in [0.0, 0.7, 5.0] {
                req.position_autocorrelation_checked(t, 1e-10).unwrap();
            }
        }
    }

    #[test]
    fn autocorrelation_is_even() {
        let r = oscillator(1.0, 0.3);
        let req = CorrelationRequest::new(&r, ThermalState::new(0.7).unwrap());
        for t in [0.4, 3.0] {
            assert_eq!(
                req.position_autocorrelation(t).unwrap(),
                req.position_autocorrelation(-t).unwrap()
            );
        }
    }

    #[test]
    fn free_particle_variance_is_rejected() {
        let r = free(1.0, 1.0);
        let req = CorrelationRequest::new(&r, ThermalState::new(1.0).unwrap());
        assert!(matches!(req.variance(), Err(Error::Divergent(_))));
    }

    #[test]
    fn classical_msd_matches_closed_form() {
        let r = free(1.0, 1.0);
        let kt = 100.0;
        let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap()).classical();
        for t in [0.1, 1.0, 10.0] {
            let s = req.mean_square_displacement(t).unwrap();
            let exact = classical_free_msd(kt, 1.0, 1.0, t);
            assert!(((s - exact) / exact).abs() < 1e-8, "t={t}: {s} vs {exact}");
        }
        assert_eq!(req.mean_square_displacement(0.0).unwrap(), 0.0);
    }

    #[test]
    fn einstein_and_ballistic_limits() {
        let kt = 1.0;
        for gamma in [0.5, 2.0] {
            let r = free(1.0, gamma);
            let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap()).classical();
            let t = 100.0 / gamma;
            let s = req.mean_square_displacement(t).unwrap();
            assert!((s / (2.0 * kt / gamma * t) - 1.0).abs() < 0.01);
            let t = 1e-3 / gamma;
            let s = req.mean_square_displacement(t).unwrap();
            assert!((s / (kt * t * t) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn diffusion_constant_forms() {
        let r = free(1.0, 1.0);
        let d = diffusion_constant(&r, &ThermalState::new(1.0).unwrap()).unwrap();
        assert_eq!(d, 1.0);
        let d2 = diffusion_constant(&r, &ThermalState::new(2.0).unwrap()).unwrap();
        assert_eq!(d2, 2.0 * d);
        let req = CorrelationRequest::new(&r, ThermalState::new(1.0).unwrap()).classical();
        let slope = req.half_msd_slope(200.0).unwrap();
        assert!((slope - 1.0).abs() < 5e-3, "{slope}");
        assert!(matches!(
            diffusion_constant(&r, &ThermalState::zero()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn zero_temperature_short_time_window() {
        let (m, zeta) = (1.0, 1.0);
        let r = free(m, zeta);
        let req = CorrelationRequest::new(&r, ThermalState::zero());
        for gt in [1e-3, 1e-2, 0.1] {
            let s = req.mean_square_displacement(gt).unwrap();
            let a = zero_temperature_msd_asymptote(1.0, m, zeta, gt);
            assert!((s / a - 1.0).abs() < 0.01, "γt={gt}: {s} vs {a}");
        }
    }

    #[test]
    fn quantum_bridges_to_classical() {
        let gamma = 1.0;
        let r = free(1.0, gamma);
        let kt = 100.0 * gamma;
        let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap());
        for t in logspace(0.01, 50.0, 12) {
            let s = req.mean_square_displacement(t).unwrap();
            let c = classical_free_msd(kt, 1.0, gamma, t);
            assert!((s / c - 1.0).abs() < 0.01, "t={t}: {s} vs {c}");
        }
    }

    #[test]
    fn spectrum_integrates_to_variance() {
        let r = oscillator(1.0, 1e-2);
        let req = CorrelationRequest::new(&r, ThermalState::new(2.0).unwrap());
        let a = req.spectrum_integral().unwrap();
        let b = req.variance().unwrap();
        assert_relative_eq!(a, b, epsilon = 0.0, max_relative = 1e-6);
        // the peak sits within γ of ω₀
        let ws = linspace(0.9, 1.1, 2001);
        let p = req.spectrum_grid(&ws).unwrap();
        let vals = p.real_values().unwrap();
        let imax = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
        assert!((ws[imax] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn force_correlations() {
        let bath = BathModel::single_relaxation(0.8, 2.0).unwrap();
        let u = reduced();
        let st = ThermalState::new(1.5).unwrap();
        let q = QuadratureSpec::default();
        // classical: C_FF(t) = kT ζ Ω_r e^{-Ω_r |t|}; integral over all t is 2ζkT
        for t in [0.0, 0.5, 2.0] {
            let c = force_autocorrelation(&bath, &st, &u, Regime::Classical, t, &q).unwrap();
            let exact = 1.5 * 0.8 * 2.0 * (-2.0 * t as f64).exp();
            assert_relative_eq!(c, exact, epsilon = 0.0, max_relative = 1e-8);
        }
        let a = force_autocorrelation(&bath, &st, &u, Regime::Quantum, 0.9, &q).unwrap();
        let b = force_autocorrelation(&bath, &st, &u, Regime::Quantum, -0.9, &q).unwrap();
        assert_eq!(a, b);
        assert_eq!(force_commutator(&bath, 0.0, &q).unwrap(), 0.0);
        let c1 = force_commutator(&bath, 1.1, &q).unwrap();
        assert_eq!(c1, -force_commutator(&bath, -1.1, &q).unwrap());
        // ∫ ζΩ_r² ω sin ωt/(ω²+Ω_r²) = (π/2) ζ Ω_r² e^{-Ω_r t}
        assert_relative_eq!(c1, PI / 2.0 * 0.8 * 4.0 * (-2.2f64).exp(), epsilon = 0.0, max_relative = 1e-7);
        assert!(matches!(
            force_autocorrelation(&BathModel::ohmic(1.0).unwrap(), &st, &u, Regime::Quantum, 0.0, &q),
            Err(Error::Divergent(_))
        ));
        assert!(matches!(
            force_autocorrelation(&bath, &st, &u, Regime::Quantum, 0.0, &q),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn driven_rank_one() {
        let mean = SampledFunction::from_fn_uniform(0.0, 0.1, 6, |t| (1.3 * t).sin());
        let d = driven_correlation(&mean).unwrap();
        let m = d.matrix();
        for i in 0..6 {
            for j in 0..6 {
                // every 2x2 minor vanishes
                assert!((m[0][0] * m[i][j] - m[0][j] * m[i][0]).abs() < 1e-15);
            }
        }
        let zero = SampledFunction::from_fn_uniform(0.0, 0.1, 4, |_| 0.0);
        assert!(driven_correlation(&zero).unwrap().matrix().iter().flatten().all(|&v| v == 0.0));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn msd_nonnegative(g in 0.05f64..5.0, w0 in 0.0f64..3.0, kt in 0.0f64..10.0, t in 0.0f64..20.0) {
            let sys = SystemConfig::oscillator(1.0, w0, UnitSystem::reduced()).unwrap();
            let r = ResponseFunction::new(sys, BathModel::ohmic(g).unwrap()).unwrap();
            let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap())
                .with_quadrature(QuadratureSpec::default().with_rel_tol(1e-6));
            let s = req.mean_square_displacement(t).unwrap();
            proptest::prop_assert!(s >= 0.0);
        }

        #[test]
        fn power_spectrum_nonnegative(g in 1e-3f64..5.0, w0 in 0.0f64..3.0, kt in 0.0f64..10.0, w in 1e-3f64..1e2) {
            let sys = SystemConfig::oscillator(1.0, w0, UnitSystem::reduced()).unwrap();
            let r = ResponseFunction::new(sys, BathModel::ohmic(g).unwrap()).unwrap();
            let req = CorrelationRequest::new(&r, ThermalState::new(kt).unwrap());
            proptest::prop_assert!(req.power_spectrum(w).unwrap() >= 0.0);
        }
    }
}
