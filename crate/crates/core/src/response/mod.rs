//! Susceptibility, Green function and mean motion.

mod poles;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{electron_time, BathModel};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_spectral, Oscillation, QuadratureSpec, SpectralIntegrand};
use crate::sampled::{logspace, SampledFunction};
use crate::units::UnitSystem;

pub(crate) use poles::{polynomial_roots, winding_number};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Observed mass (for the radiation bath, the renormalized `M`).
    pub mass: f64,
    pub stiffness: f64,
    pub units: UnitSystem,
}

impl SystemConfig {
    pub fn new(mass: f64, stiffness: f64, units: UnitSystem) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Validation(format!("mass must be > 0, got {mass}")));
        }
        if !(stiffness.is_finite() && stiffness >= 0.0) {
            return Err(Error::Validation(format!("stiffness must be >= 0, got {stiffness}")));
        }
        units.validate()?;
        Ok(SystemConfig {
            mass,
            stiffness,
            units,
        })
    }

    /// Oscillator with natural frequency `omega0`.
    pub fn oscillator(mass: f64, omega0: f64, units: UnitSystem) -> Result<Self> {
        Self::new(mass, mass * omega0 * omega0, units)
    }

    pub fn free(mass: f64, units: UnitSystem) -> Result<Self> {
        Self::new(mass, 0.0, units)
    }

    pub fn omega0(&self) -> f64 {
        (self.stiffness / self.mass).sqrt()
    }

    pub fn is_free(&self) -> bool {
        self.stiffness == 0.0
    }
}

/// A peak of `|α|²`: centre frequency and half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct ResponseFunction {
    system: SystemConfig,
    bath: BathModel,
    inertia: f64,
    scale: f64,
    resonances: Vec<Resonance>,
    quad: QuadratureSpec,
}

impl ResponseFunction {
    pub fn new(system: SystemConfig, bath: BathModel) -> Result<Self> {
        system.units.validate()?;
        let inertia = bath.inertia(system.mass, &system.units)?;
        let mut resp = ResponseFunction {
            system,
            bath,
            inertia,
            scale: 1.0,
            resonances: Vec::new(),
            quad: QuadratureSpec::default(),
        };
        let roots = resp.denominator_roots();
        let mut scale = resp.system.omega0();
        if let Some(w) = resp.bath.characteristic_frequency() {
            scale = scale.max(w);
        }
        if resp.inertia > 0.0 {
            scale = scale.max(resp.bath.peak_value() / resp.inertia);
        }
        match &roots {
            Some(roots) => {
                for r in roots {
                    scale = scale.max(r.norm());
                    if r.re.abs() > 1e-12 * r.norm() {
                        resp.resonances.push(Resonance {
                            center: r.re.abs(),
                            width: r.im.abs(),
                        });
                    } else if r.norm() > 0.0 {
                        resp.resonances.push(Resonance {
                            center: r.norm(),
                            width: r.norm(),
                        });
                    }
                }
            }
            None => {
                resp.resonances = resp.scan_resonances();
                for r in &resp.resonances {
                    scale = scale.max(r.center);
                }
            }
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Validation("system has no finite frequency scale".into()));
        }
        resp.scale = scale;
        if let Some(roots) = &roots {
            let tiny = 1e-12 * scale;
            if let Some(r) = roots.iter().find(|r| r.im > tiny) {
                return Err(Error::Pole(format!("susceptibility pole at {r} in the upper half plane")));
            }
        }
        resp.check_poles()?;
        Ok(resp)
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        self.quad = quad;
        Ok(self)
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn system(&self) -> &SystemConfig {
        &self.system
    }

    pub fn bath(&self) -> &BathModel {
        &self.bath
    }

    /// Coefficient of `-z²` in the denominator: the bare mass for the
    /// radiation bath, the system mass otherwise.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn resonances(&self) -> &[Resonance] {
        &self.resonances
    }

    /// Zeros of `D(z)` for closed-form baths.
    fn denominator_roots(&self) -> Option<Vec<Complex64>> {
        let m = self.inertia;
        let k = self.system.stiffness;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let coef = match &self.bath {
            BathModel::Ohmic { zeta } => vec![c(k, 0.0), c(0.0, -zeta), c(-m, 0.0)],
            BathModel::SingleRelaxation { zeta, omega_r } => vec![
                c(k * omega_r, 0.0),
                c(0.0, -(k + zeta * omega_r)),
                c(-m * omega_r, 0.0),
                c(0.0, m),
            ],
            BathModel::BlackbodyRadiation { mass, cutoff, .. } => vec![
                c(0.0, k * cutoff),
                c(k, 0.0),
                c(0.0, -cutoff * mass),
                c(-m, 0.0),
            ],
            BathModel::Tabulated(_) => return None,
        };
        Some(polynomial_roots(&coef))
    }

    /// Local maxima of `|α|²` on a logarithmic scan.
    fn scan_resonances(&self) -> Vec<Resonance> {
        let hi = self.bath.support().unwrap_or(1.0).max(self.system.omega0()) * 2.0;
        let lo = hi * 1e-8;
        let ws = logspace(lo, hi, 4000);
        let a2: Vec<f64> = ws
            .iter()
            .map(|&w| self.susceptibility(w).map(|a| a.norm_sqr()).unwrap_or(0.0))
            .collect();
        let mut out = Vec::new();
        for i in 1..ws.len() - 1 {
            if a2[i] > a2[i - 1] && a2[i] >= a2[i + 1] {
                let half = 0.5 * a2[i];
                let mut j = i;
                while j + 1 < ws.len() && a2[j] > half {
                    j += 1;
                }
                let width = (ws[j] - ws[i]).max(ws[i + 1] - ws[i]);
                out.push(Resonance {
                    center: ws[i],
                    width,
                });
            }
        }
        out
    }

    /// Argument-principle count of zeros of `D` above the real axis.
    fn check_poles(&self) -> Result<()> {
        let r = 100.0 * self.scale;
        let eps = 1e-9 * self.scale;
        let f = |z: Complex64| self.denominator(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let path = |s: f64| {
            if s <= 0.5 {
                let u = 2.0 * (2.0 * s) - 1.0;
                Complex64::new(r * u * u * u, eps)
            } else {
                let theta = PI * (2.0 * s - 1.0);
                Complex64::new(0.0, eps) + Complex64::from_polar(r, theta)
            }
        };
        let count = winding_number(&f, &path, 4000, 0.3)
            .ok_or_else(|| Error::Pole("denominator vanishes on the contour".into()))?;
        if count.round() != 0.0 {
            return Err(Error::Pole(format!(
                "susceptibility has {} pole(s) in the upper half plane",
                count.round()
            )));
        }
        Ok(())
    }

    /// `D(z) = -m z² - i z μ̃(z) + K`, `Im z ≥ 0`.
    pub fn denominator(&self, z: Complex64) -> Result<Complex64> {
        let mu = self.bath.memory_fourier(z)?;
        Ok(-self.inertia * z * z - Complex64::i() * z * mu + self.system.stiffness)
    }

    /// `α(z)` in the closed upper half plane.
    pub fn susceptibility_at(&self, z: Complex64) -> Result<Complex64> {
        let d = self.denominator(z)?;
        if d.norm() == 0.0 {
            return Err(Error::Pole(format!("susceptibility has a pole at {z}")));
        }
        Ok(1.0 / d)
    }

    /// `α(ω + i0⁺)`.
    pub fn susceptibility(&self, omega: f64) -> Result<Complex64> {
        if omega == 0.0 && self.system.is_free() {
            return Err(Error::Pole("free particle: susceptibility has a pole at omega = 0".into()));
        }
        if !omega.is_finite() {
            return Err(Error::Domain(format!("frequency must be finite, got {omega}")));
        }
        self.susceptibility_at(Complex64::new(omega, 0.0))
    }

    /// `Im α(ω)` from the complex reciprocal.
    pub fn im_susceptibility(&self, omega: f64) -> Result<f64> {
        Ok(self.susceptibility(omega)?.im)
    }

    /// `ω |α(ω)|² Re μ̃(ω)`, assembled from the real and imaginary parts of the
    /// denominator and the spectral distribution.
    pub fn dissipative_form(&self, omega: f64) -> Result<f64> {
        let w = omega.abs();
        let re_mu = match &self.bath {
            BathModel::Tabulated(_) => self.bath.re_mu(w),
            b => b.spectral_distribution(w)?,
        };
        let mu = self.bath.memory_fourier(Complex64::new(w, 0.0))?;
        let d_re = self.system.stiffness - self.inertia * w * w + w * mu.im;
        let d_im = -w * re_mu;
        let denom = d_re * d_re + d_im * d_im;
        if denom == 0.0 {
            return Err(Error::Pole(format!("susceptibility has a pole at {omega}")));
        }
        Ok(omega.signum() * w * re_mu / denom)
    }

    /// Power of `ω` that `Im α` follows as `ω → 0⁺`.
    pub fn im_alpha_zero_power(&self) -> f64 {
        if self.system.is_free() {
            -1.0
        } else {
            1.0 + self.bath.zero_power()
        }
    }

    /// Power of `ω` that `Im α` follows as `ω → ∞`.
    pub fn im_alpha_tail_power(&self) -> f64 {
        let q = self.bath.tail_power();
        if self.inertia > 0.0 {
            q - 3.0
        } else {
            q - 1.0
        }
    }

    /// Typical size of `Im α` near the scale frequency.
    pub fn im_alpha_magnitude(&self) -> f64 {
        if self.inertia > 0.0 {
            1.0 / (self.inertia * self.scale * self.scale)
        } else {
            1.0 / (self.bath.peak_value().max(f64::MIN_POSITIVE) * self.scale)
        }
    }

    /// A spectral integrand carrying this response's scale, resonances and
    /// support.
    pub fn integrand<'a>(
        &self,
        envelope: impl Fn(f64) -> f64 + Sync + Send + 'a,
        zero_power: f64,
        tail_power: f64,
        magnitude: f64,
    ) -> SpectralIntegrand<'a> {
        let mut ig = SpectralIntegrand::new(envelope)
            .zero_power(zero_power)
            .tail_power(tail_power)
            .scale(self.scale)
            .magnitude(magnitude);
        for r in &self.resonances {
            ig = ig.resonance(r.center, r.width);
        }
        if let Some(w) = self.bath.characteristic_frequency() {
            ig = ig.breakpoint(w);
        }
        if let Some(u) = self.bath.support() {
            ig = ig.support(u);
        }
        ig
    }

    fn im_alpha_fn(&self) -> impl Fn(f64) -> f64 + Sync + Send + '_ {
        move |w: f64| self.im_susceptibility(w).unwrap_or(0.0)
    }

    /// Green function `G(t)`: closed form for the Ohmic bath, otherwise the
    /// sine transform `(2/π) ∫ Im α sin ωt dω`.
    pub fn green_function(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain("time is NaN".into()));
        }
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self.ohmic_green(t) {
            Some((g, _)) => Ok(g),
            None => self.green_numeric(t),
        }
    }

    /// `dG/dt`, with `Ġ(0⁺) = 1/m`.
    pub fn green_derivative(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain("time is NaN".into()));
        }
        if t < 0.0 {
            return Ok(0.0);
        }
        if t == 0.0 {
            if self.inertia > 0.0 {
                return Ok(1.0 / self.inertia);
            }
            return Err(Error::Divergent("zero inertia: dG/dt is singular at t = 0".into()));
        }
        match self.ohmic_green(t) {
            Some((_, d)) => Ok(d),
            None => self.green_derivative_numeric(t),
        }
    }

    /// Sine-transform evaluation of `G(t)` regardless of bath.
    pub fn green_numeric(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let ig = self
            .integrand(
                self.im_alpha_fn(),
                self.im_alpha_zero_power(),
                self.im_alpha_tail_power(),
                self.im_alpha_magnitude(),
            )
            .oscillation(Oscillation::Sin(t));
        Ok(2.0 / PI * integrate_spectral(&ig, &self.quad)?.value)
    }

    /// `(2/π) ∫ ω Im α cos ωt dω`.
    pub fn green_derivative_numeric(&self, t: f64) -> Result<f64> {
        let ig = self
            .integrand(
                move |w: f64| w * self.im_susceptibility(w).unwrap_or(0.0),
                self.im_alpha_zero_power() + 1.0,
                self.im_alpha_tail_power() + 1.0,
                self.im_alpha_magnitude() * self.scale,
            )
            .oscillation(Oscillation::Cos(t));
        Ok(2.0 / PI * integrate_spectral(&ig, &self.quad)?.value)
    }

    /// Full inverse transform `(1/π) ∫_0^∞ [Re α cos ωt + Im α sin ωt] dω`,
    /// valid for either sign of `t`. It vanishes for `t < 0` only through
    /// cancellation of its two terms, so it probes causality of `α`.
    pub fn green_two_sided(&self, t: f64) -> Result<f64> {
        let mag = self.im_alpha_magnitude();
        let re_zero = if self.system.is_free() && self.bath.zero_power() > 0.0 { -2.0 } else { 0.0 };
        let re_tail = if self.inertia > 0.0 { -2.0 } else { -2.0 + self.bath.tail_power() };
        let re = self
            .integrand(
                move |w: f64| self.susceptibility(w).map(|a| a.re).unwrap_or(0.0),
                re_zero,
                re_tail,
                mag,
            )
            .oscillation(Oscillation::Cos(t));
        let im = self
            .integrand(
                self.im_alpha_fn(),
                self.im_alpha_zero_power(),
                self.im_alpha_tail_power(),
                mag,
            )
            .oscillation(Oscillation::Sin(t));
        let a = integrate_spectral(&re, &self.quad)?.value;
        let b = integrate_spectral(&im, &self.quad)?.value;
        Ok((a + b) / PI)
    }

    /// Closed-form `(G, Ġ)` for the Ohmic bath at `t > 0`.
    fn ohmic_green(&self, t: f64) -> Option<(f64, f64)> {
        let BathModel::Ohmic { zeta } = self.bath else {
            return None;
        };
        let m = self.inertia;
        let gamma = zeta / m;
        let k = self.system.stiffness;
        if k == 0.0 {
            let e = (-gamma * t).exp_m1();
            return Some((-e / (m * gamma), (-gamma * t).exp() / m));
        }
        let w0sq = k / m;
        let disc = w0sq - 0.25 * gamma * gamma;
        let damp = (-0.5 * gamma * t).exp();
        let x = disc * t * t;
        if x.abs() < 1e-8 {
            // sin(λt)/λ and cos(λt) with λ² = disc (either sign)
            let s = t * (1.0 - x / 6.0 + x * x / 120.0);
            let c = 1.0 - x / 2.0 + x * x / 24.0;
            return Some((damp * s / m, damp * (c - 0.5 * gamma * s) / m));
        }
        if disc > 0.0 {
            let l = disc.sqrt();
            let (sn, cs) = (l * t).sin_cos();
            Some((damp * sn / (m * l), damp * (cs - 0.5 * gamma / l * sn) / m))
        } else {
            let l = (-disc).sqrt();
            // λ - γ/2 = -ω₀² / (λ + γ/2) without cancellation
            let slow = -w0sq / (l + 0.5 * gamma);
            let fast = -(l + 0.5 * gamma);
            let (es, ef) = ((slow * t).exp(), (fast * t).exp());
            let g = (es - ef) / (2.0 * m * l);
            let gd = (slow * es - fast * ef) / (2.0 * m * l);
            Some((g, gd))
        }
    }

    /// `x(t) = m Ġ(t) x₀ + m G(t) v₀`, the mean of the initial-value solution.
    pub fn initial_value_mean(&self, x0: f64, v0: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("initial-value solution needs t >= 0, got {t}")));
        }
        let m = self.inertia;
        let mut x = 0.0;
        if x0 != 0.0 {
            x += m * self.green_derivative(t)? * x0;
        }
        if v0 != 0.0 {
            x += m * self.green_function(t)? * v0;
        }
        Ok(x)
    }

    /// Mean response to a force sampled on a uniform grid,
    /// `⟨x(t_i)⟩ = Σ_j w_j G(t_i - t_j) f(t_j) Δt` (trapezoid weights).
    pub fn driven_mean(&self, force: &SampledFunction) -> Result<SampledFunction> {
        let dt = force.uniform_step()?;
        let f = force.real_values()?;
        let n = f.len();
        let g: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| self.green_function(k as f64 * dt))
            .collect::<Result<_>>()?;
        let x: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return 0.0;
                }
                let mut acc = 0.5 * g[i] * f[0];
                for j in 1..i {
                    acc += g[i - j] * f[j];
                }
                acc * dt
            })
            .collect();
        Ok(SampledFunction::real(force.abscissae.clone(), x)?.with_meta("quantity", "mean position"))
    }

    /// `(2/π) ∫ Im α sin ωt dω`; the commutator `[x(t₀), x(t₀+t)]` is `iħ`
    /// times this. Odd in `t`.
    pub fn position_commutator(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let ig = self
            .integrand(
                self.im_alpha_fn(),
                self.im_alpha_zero_power(),
                self.im_alpha_tail_power(),
                self.im_alpha_magnitude(),
            )
            .oscillation(Oscillation::Sin(t));
        Ok(2.0 / PI * integrate_spectral(&ig, &self.quad)?.value)
    }

    /// `dD/dz` where the bath has a closed-form derivative.
    pub(crate) fn denominator_derivative(&self, z: Complex64) -> Option<Result<Complex64>> {
        let dmu = self.bath.memory_fourier_derivative(z)?;
        Some(self.bath.memory_fourier(z).map(|mu| {
            let i = Complex64::i();
            -2.0 * self.inertia * z - i * mu - i * z * dmu
        }))
    }
}

/// Position and velocity of a radiating charge.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiatingTrajectory {
    pub position: SampledFunction,
    pub velocity: SampledFunction,
    pub tau_e: f64,
}

/// Integrates `M ẍ = f(t) + τ_e ḟ(t)` on the force's uniform grid:
/// `ẋ(t) = v₀ + [∫₀ᵗ f + τ_e (f(t) - f(0))] / M`, and `x` by the trapezoid rule.
pub fn nonrunaway_trajectory(
    mass: f64,
    force: &SampledFunction,
    units: &UnitSystem,
    x0: f64,
    v0: f64,
) -> Result<RadiatingTrajectory> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Validation(format!("mass must be > 0, got {mass}")));
    }
    units.validate()?;
    let dt = force.uniform_step()?;
    let f = force.real_values()?;
    let tau = electron_time(mass, units);
    let n = f.len();
    let mut impulse = 0.0;
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            impulse += 0.5 * dt * (f[i - 1] + f[i]);
        }
        v.push(v0 + (impulse + tau * (f[i] - f[0])) / mass);
    }
    let mut x = Vec::with_capacity(n);
    let mut pos = x0;
    for i in 0..n {
        if i > 0 {
            pos += 0.5 * dt * (v[i - 1] + v[i]);
        }
        x.push(pos);
    }
    Ok(RadiatingTrajectory {
        position: SampledFunction::real(force.abscissae.clone(), x)?.with_meta("quantity", "position"),
        velocity: SampledFunction::real(force.abscissae.clone(), v)?.with_meta("quantity", "velocity"),
        tau_e: tau,
    })
}
