//! Circuit and detector problems expressed as an oscillator in a bath.

mod detector;
mod josephson;
mod junction;

pub use detector::{detector_noise, DetectorNoise};
pub use josephson::{
    josephson_map, josephson_phase_variance, josephson_phase_variance_weak, JosephsonJunction, JosephsonMap,
};
pub use junction::{junction_charge_variance, TunnelJunction, COVERAGE_THRESHOLD};

/// Multipliers taking practical electrical units to Gaussian CGS.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PracticalConversion {
    pub farad_to_cm: f64,
    pub ohm_to_s_per_cm: f64,
    pub ampere_to_statampere: f64,
}

pub const PRACTICAL: PracticalConversion = PracticalConversion {
    farad_to_cm: crate::units::cgs::FARAD,
    ohm_to_s_per_cm: crate::units::cgs::OHM,
    ampere_to_statampere: crate::units::cgs::AMPERE,
};
