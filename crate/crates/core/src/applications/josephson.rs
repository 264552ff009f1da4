use std::f64::consts::PI;

use serde::Serialize;

use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_spectral, QuadResult, QuadratureSpec, SpectralIntegrand};
use crate::response::SystemConfig;
use crate::units::{coth, Regime, ThermalFactor, ThermalState, UnitSystem};

use super::PRACTICAL;

/// A capacitively and resistively shunted junction, in the units of `units`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JosephsonJunction {
    pub capacitance: f64,
    pub resistance: f64,
    pub bias: f64,
    pub critical: f64,
    pub units: UnitSystem,
}

impl JosephsonJunction {
    pub fn new(capacitance: f64, resistance: f64, bias: f64, critical: f64, units: UnitSystem) -> Result<Self> {
        units.validate()?;
        for (name, v) in [("capacitance", capacitance), ("resistance", resistance), ("critical current", critical)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be > 0, got {v}")));
            }
        }
        if !bias.is_finite() {
            return Err(Error::Validation(format!("bias current must be finite, got {bias}")));
        }
        Ok(JosephsonJunction {
            capacitance,
            resistance,
            bias,
            critical,
            units,
        })
    }

    /// Farads, ohms and amperes, converted to Gaussian CGS.
    pub fn from_practical(farad: f64, ohm: f64, ampere: f64, critical_ampere: f64) -> Result<Self> {
        Self::new(
            farad * PRACTICAL.farad_to_cm,
            ohm * PRACTICAL.ohm_to_s_per_cm,
            ampere * PRACTICAL.ampere_to_statampere,
            critical_ampere * PRACTICAL.ampere_to_statampere,
            UnitSystem::gaussian_cgs(),
        )
    }

    /// `ħ/2e`.
    pub fn flux_quantum(&self) -> f64 {
        self.units.hbar / (2.0 * self.units.e_charge)
    }

    /// `γ = 1/RC`.
    pub fn gamma(&self) -> f64 {
        1.0 / (self.resistance * self.capacitance)
    }

    /// `ω₀² = (2e/Cħ)(I_C² - I²)^{1/2}`.
    pub fn omega0(&self) -> Result<f64> {
        if self.bias.abs() >= self.critical {
            return Err(Error::RunningState {
                bias: self.bias.abs(),
                critical: self.critical,
            });
        }
        let root = ((self.critical - self.bias) * (self.critical + self.bias)).sqrt();
        Ok((root / (self.flux_quantum() * self.capacitance)).sqrt())
    }
}

/// Mechanical equivalent of a junction: the displacement is the phase.
#[derive(Debug, Clone, PartialEq)]
pub struct JosephsonMap {
    pub system: SystemConfig,
    pub bath: BathModel,
    pub omega0: f64,
    pub gamma: f64,
}

/// `m = (ħ/2e)² C`, `ζ = (ħ/2e)²/R`, `K = m ω₀²`.
pub fn josephson_map(j: &JosephsonJunction) -> Result<JosephsonMap> {
    let w0 = j.omega0()?;
    let phi0 = j.flux_quantum();
    let m = phi0 * phi0 * j.capacitance;
    let zeta = phi0 * phi0 / j.resistance;
    Ok(JosephsonMap {
        system: SystemConfig::new(m, m * w0 * w0, j.units)?,
        bath: BathModel::ohmic(zeta)?,
        omega0: w0,
        gamma: j.gamma(),
    })
}

/// `⟨φ²⟩ = (4e²/πCħ) ∫ coth(ħω/2kT) ωγ/[(ω₀²-ω²)² + ω²γ²] dω`.
pub fn josephson_phase_variance_full(
    j: &JosephsonJunction,
    state: &ThermalState,
    quad: &QuadratureSpec,
) -> Result<QuadResult> {
    let w0 = j.omega0()?;
    let g = j.gamma();
    let u = j.units;
    let pre = 4.0 * u.e_charge * u.e_charge / (PI * j.capacitance * u.hbar);
    let w02 = w0 * w0;
    let ig = SpectralIntegrand::new(move |w: f64| {
        let d = w02 - w * w;
        pre * w * g / (d * d + w * w * g * g)
    })
    .thermal(ThermalFactor::new(state, &u, Regime::Quantum))
    .zero_power(1.0)
    .tail_power(-3.0)
    .scale(w0.max(g))
    .magnitude(pre / (w02 * w0.max(g)))
    .resonance(w0, 0.5 * g);
    integrate_spectral(&ig, quad)
}

pub fn josephson_phase_variance(j: &JosephsonJunction, state: &ThermalState, quad: &QuadratureSpec) -> Result<f64> {
    Ok(josephson_phase_variance_full(j, state, quad)?.value)
}

/// Weak-coupling form `(2e²/Cħω₀) coth(ħω₀/2kT)`.
pub fn josephson_phase_variance_weak(j: &JosephsonJunction, state: &ThermalState) -> Result<f64> {
    let w0 = j.omega0()?;
    let u = j.units;
    let kt = state.energy(&u);
    let c = if kt == 0.0 { 1.0 } else { coth(u.hbar * w0 / (2.0 * kt)) };
    Ok(2.0 * u.e_charge * u.e_charge / (j.capacitance * u.hbar * w0) * c)
}
