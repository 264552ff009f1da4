use crate::correlations::{CorrelationPath, CorrelationRequest};
use crate::error::Result;
use crate::response::ResponseFunction;
use crate::sampled::SampledFunction;
use crate::units::ThermalState;

/// Displacement noise of a test mass: `P(ω)` on a grid, `⟨x²⟩` from the
/// susceptibility, and `∫₀^∞ P dω` as a consistency check.
#[derive(Debug, Clone)]
pub struct DetectorNoise {
    pub spectrum: SampledFunction,
    pub variance: f64,
    pub spectrum_integral: f64,
}

impl DetectorNoise {
    pub fn relative_mismatch(&self) -> f64 {
        ((self.spectrum_integral - self.variance) / self.variance).abs()
    }
}

pub fn detector_noise(resp: &ResponseFunction, state: &ThermalState, omega_grid: &[f64]) -> Result<DetectorNoise> {
    let req = CorrelationRequest::new(resp, *state);
    let spectrum = req
        .spectrum_grid(omega_grid)?
        .with_meta("quantity", "displacement power spectrum");
    let variance = req
        .position_autocorrelation_via(CorrelationPath::Susceptibility, 0.0)?
        .value;
    let spectrum_integral = req.spectrum_integral()?;
    Ok(DetectorNoise {
        spectrum,
        variance,
        spectrum_integral,
    })
}
