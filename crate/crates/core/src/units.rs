//! Unit systems, physical constants and the thermal occupation factor.
//!
//! Two modes are offered. Gaussian CGS carries the physical constants needed by
//! the radiation-bath formulas (which are written with `e^2/c^3`). The reduced
//! mode sets `hbar = k_B = 1` and leaves every other scale to the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitMode {
    GaussianCgs,
    Reduced,
}

impl UnitMode {
    pub fn name(self) -> &'static str {
        match self {
            UnitMode::GaussianCgs => "gaussian-cgs",
            UnitMode::Reduced => "reduced",
        }
    }
}

/// Physical constants in force for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub mode: UnitMode,
    /// erg s, or 1
    pub hbar: f64,
    /// erg / K, or 1
    pub kb: f64,
    /// cm / s, or 1
    pub c: f64,
    /// esu, or a dimensionless coupling
    pub e_charge: f64,
}

/// CODATA 2018 values in Gaussian units.
pub mod cgs {
    pub const HBAR: f64 = 1.054_571_817e-27;
    pub const KB: f64 = 1.380_649e-16;
    pub const C: f64 = 2.997_924_58e10;
    pub const E_CHARGE: f64 = 4.803_204_712_570_263e-10;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-28;

    /// One farad expressed in centimetres of capacitance.
    pub const FARAD: f64 = 8.987_551_787_368_176e11;
    /// One ohm expressed in s / cm.
    pub const OHM: f64 = 1.112_650_056_053_618_4e-12;
    /// One ampere expressed in statamperes.
    pub const AMPERE: f64 = 2.997_924_58e9;
}

impl UnitSystem {
    pub fn gaussian_cgs() -> Self {
        UnitSystem {
            mode: UnitMode::GaussianCgs,
            hbar: cgs::HBAR,
            kb: cgs::KB,
            c: cgs::C,
            e_charge: cgs::E_CHARGE,
        }
    }

    pub fn reduced() -> Self {
        UnitSystem {
            mode: UnitMode::Reduced,
            hbar: 1.0,
            kb: 1.0,
            c: 1.0,
            e_charge: 1.0,
        }
    }

    /// Reduced units with explicit `c` and charge; `hbar` and `k_B` stay 1.
    pub fn reduced_with(c: f64, e_charge: f64) -> Result<Self> {
        let u = UnitSystem {
            c,
            e_charge,
            ..Self::reduced()
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("kb", self.kb),
            ("c", self.c),
            ("e_charge", self.e_charge),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Unit(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if self.mode == UnitMode::Reduced && (self.hbar != 1.0 || self.kb != 1.0) {
            return Err(Error::Unit("reduced mode requires hbar = kb = 1".into()));
        }
        Ok(())
    }

    /// `2 e^2 / (3 c^3)`, the radiation-reaction coefficient (`tau_e * M`).
    pub fn radiation_coefficient(&self) -> f64 {
        2.0 * self.e_charge * self.e_charge / (3.0 * self.c.powi(3))
    }

    pub fn require_physical(&self, what: &str) -> Result<()> {
        match self.mode {
            UnitMode::GaussianCgs => Ok(()),
            UnitMode::Reduced => Err(Error::Unit(format!(
                "{what} needs physical constants (gaussian-cgs mode)"
            ))),
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::reduced()
    }
}

/// Bath temperature. `T = 0` is a regular input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub temperature: f64,
}

impl ThermalState {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::Validation(format!(
                "temperature must be finite and >= 0, got {temperature}"
            )));
        }
        Ok(ThermalState { temperature })
    }

    pub fn zero() -> Self {
        ThermalState { temperature: 0.0 }
    }

    /// `k_B T` in energy units.
    pub fn energy(&self, units: &UnitSystem) -> f64 {
        units.kb * self.temperature
    }

    /// Temperature at which `k_B T` equals `energy`.
    pub fn from_energy(energy: f64, units: &UnitSystem) -> Result<Self> {
        Self::new(energy / units.kb)
    }
}

const LAURENT_SWITCH: f64 = 1e-4;

/// `coth(x)` for `x > 0`, switching to the Laurent series near the origin.
pub fn coth(x: f64) -> f64 {
    if x < LAURENT_SWITCH {
        let x2 = x * x;
        1.0 / x + x / 3.0 - x * x2 / 45.0
    } else {
        1.0 / x.tanh()
    }
}

/// `coth(hbar omega / 2 k T)`; exactly 1 at `T = 0`.
pub fn coth_thermal(omega: f64, state: &ThermalState, units: &UnitSystem) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "thermal factor needs omega > 0, got {omega}"
        )));
    }
    if state.temperature == 0.0 {
        return Ok(1.0);
    }
    Ok(coth(units.hbar * omega / (2.0 * state.energy(units))))
}

/// Whether the thermal factor is the full quantum `coth` or its classical
/// high-temperature limit `2kT / hbar omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    #[default]
    Quantum,
    Classical,
}

/// The thermal weight as it enters spectral integrands, pre-reduced to the
/// single number `hbar / 2kT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalFactor {
    /// No thermal factor (or quantum at `T = 0`, where coth is 1).
    Unit,
    Quantum { x_per_omega: f64 },
    Classical { x_per_omega: f64 },
    /// Classical limit at `T = 0`: the weight vanishes identically.
    Zero,
}

impl ThermalFactor {
    pub fn new(state: &ThermalState, units: &UnitSystem, regime: Regime) -> Self {
        let kt = state.energy(units);
        match (regime, kt > 0.0) {
            (Regime::Quantum, false) => ThermalFactor::Unit,
            (Regime::Classical, false) => ThermalFactor::Zero,
            (Regime::Quantum, true) => ThermalFactor::Quantum {
                x_per_omega: units.hbar / (2.0 * kt),
            },
            (Regime::Classical, true) => ThermalFactor::Classical {
                x_per_omega: units.hbar / (2.0 * kt),
            },
        }
    }

    #[inline]
    pub fn weight(&self, omega: f64) -> f64 {
        match *self {
            ThermalFactor::Unit => 1.0,
            ThermalFactor::Zero => 0.0,
            ThermalFactor::Quantum { x_per_omega } => coth(x_per_omega * omega),
            ThermalFactor::Classical { x_per_omega } => 1.0 / (x_per_omega * omega),
        }
    }

    /// Power of omega the factor behaves like near the origin.
    pub fn zero_power(&self) -> f64 {
        match self {
            ThermalFactor::Unit | ThermalFactor::Zero => 0.0,
            _ => -1.0,
        }
    }

    /// Power of omega the factor behaves like at infinity.
    pub fn tail_power(&self) -> f64 {
        match self {
            ThermalFactor::Classical { .. } => -1.0,
            _ => 0.0,
        }
    }

    /// Frequency `2kT / hbar` where the factor changes character, if any.
    pub fn crossover(&self) -> Option<f64> {
        match *self {
            ThermalFactor::Quantum { x_per_omega } | ThermalFactor::Classical { x_per_omega } => {
                Some(1.0 / x_per_omega)
            }
            _ => None,
        }
    }
}
