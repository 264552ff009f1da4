use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interp::linear;
use crate::quadrature::{integrate_spectral, QuadratureSpec, SpectralIntegrand};
use crate::sampled::SampledFunction;
use crate::units::{coth, Regime, ThermalFactor, ThermalState, UnitSystem};

use super::PRACTICAL;

/// The integrand at the top of the impedance grid must have fallen below this
/// fraction of its peak.
pub const COVERAGE_THRESHOLD: f64 = 1e-4;

/// A small-capacitance junction attached to an external circuit of impedance
/// `Z(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TunnelJunction {
    pub capacitance: f64,
    omega: Vec<f64>,
    re_z: Vec<f64>,
    im_z: Vec<f64>,
    pub units: UnitSystem,
}

impl TunnelJunction {
    /// `impedance` is complex `Z(ω)` on an increasing grid of `ω ≥ 0`. Below
    /// the first point `Z` is held constant; the grid's last point is the
    /// integration cutoff.
    pub fn new(capacitance: f64, impedance: &SampledFunction, units: UnitSystem) -> Result<Self> {
        units.validate()?;
        if !(capacitance.is_finite() && capacitance > 0.0) {
            return Err(Error::Validation(format!("capacitance must be > 0, got {capacitance}")));
        }
        let z = impedance.complex_values()?;
        if z.len() < 2 {
            return Err(Error::Format("impedance table needs at least two rows".into()));
        }
        if !impedance.is_strictly_increasing() || impedance.abscissae[0] < 0.0 {
            return Err(Error::Format("impedance frequencies must be >= 0 and increasing".into()));
        }
        for (w, v) in impedance.abscissae.iter().zip(z) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Format(format!("non-finite impedance at omega = {w}")));
            }
            if v.re < 0.0 {
                return Err(Error::Validation(format!(
                    "impedance is not passive: Re Z = {:e} < 0 at omega = {w}",
                    v.re
                )));
            }
        }
        Ok(TunnelJunction {
            capacitance,
            omega: impedance.abscissae.clone(),
            re_z: z.iter().map(|v| v.re).collect(),
            im_z: z.iter().map(|v| v.im).collect(),
            units,
        })
    }

    /// Farads and an impedance table in ohms (frequencies in rad/s).
    pub fn from_practical(farad: f64, impedance_ohm: &SampledFunction) -> Result<Self> {
        let z: Vec<Complex64> = impedance_ohm
            .complex_values()?
            .iter()
            .map(|v| v * PRACTICAL.ohm_to_s_per_cm)
            .collect();
        let table = SampledFunction::complex(impedance_ohm.abscissae.clone(), z)?;
        Self::new(farad * PRACTICAL.farad_to_cm, &table, UnitSystem::gaussian_cgs())
    }

    /// A frequency-independent resistor tabulated on `[0, omega_max]`.
    pub fn resistor(capacitance: f64, resistance: f64, omega_max: f64, units: UnitSystem) -> Result<Self> {
        let table = SampledFunction::complex(
            vec![0.0, omega_max],
            vec![Complex64::new(resistance, 0.0); 2],
        )?;
        Self::new(capacitance, &table, units)
    }

    pub fn omega_max(&self) -> f64 {
        *self.omega.last().unwrap()
    }

    /// Linear interpolation of `Re Z` and `Im Z`, constant below the grid.
    pub fn impedance(&self, omega: f64) -> Result<Complex64> {
        let w = omega.max(self.omega[0]);
        Ok(Complex64::new(linear(&self.omega, &self.re_z, w)?, linear(&self.omega, &self.im_z, w)?))
    }

    /// `Re[1/(iωC + Z⁻¹)] = Re[Z/(1 + iωCZ)]`.
    pub fn kernel(&self, omega: f64) -> Result<f64> {
        let z = self.impedance(omega)?;
        let v = z / (1.0 + Complex64::i() * omega * self.capacitance * z);
        Ok(v.re.max(0.0))
    }

    fn is_reactive(&self) -> bool {
        self.re_z.iter().all(|&r| r == 0.0)
    }
}

/// `⟨q²⟩ = ∫ (ħωC²/π) coth(ħω/2kT) Re[1/(iωC + Z⁻¹(ω))] dω` over the tabulated
/// band.
pub fn junction_charge_variance(tj: &TunnelJunction, state: &ThermalState, quad: &QuadratureSpec) -> Result<f64> {
    if tj.is_reactive() {
        return reactive_modes(tj, state);
    }
    let u = tj.units;
    let c = tj.capacitance;
    let hbar = u.hbar;
    let thermal = ThermalFactor::new(state, &u, Regime::Quantum);
    let full = |w: f64| -> f64 {
        if w <= 0.0 {
            return match thermal {
                ThermalFactor::Unit | ThermalFactor::Zero => 0.0,
                _ => 2.0 * state.energy(&u) * c * c / PI * tj.kernel(0.0).unwrap_or(0.0),
            };
        }
        hbar * w * c * c / PI * thermal.weight(w) * tj.kernel(w).unwrap_or(0.0)
    };

    // Coverage: compare the integrand at the cutoff with its peak over the grid.
    let top = tj.omega_max();
    let mut probe: Vec<f64> = tj.omega.clone();
    probe.extend(crate::sampled::logspace(top * 1e-9, top, 1000));
    let peak = probe.iter().map(|&w| full(w)).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let edge = full(top);
    if edge > COVERAGE_THRESHOLD * peak {
        return Err(Error::Coverage {
            suggested_omega_max: top * edge / (COVERAGE_THRESHOLD * peak),
        });
    }

    let scale = 1.0 / (tj.re_z.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE) * c);
    let mut ig = SpectralIntegrand::new(move |w: f64| hbar * w * c * c / PI * tj.kernel(w).unwrap_or(0.0))
        .thermal(thermal)
        .zero_power(1.0)
        .tail_power(f64::NEG_INFINITY)
        .scale(scale.min(top))
        .magnitude(peak / scale.min(top))
        .support(top);
    for &w in &tj.omega {
        if w > 0.0 && w < top {
            ig = ig.breakpoint(w);
        }
    }
    Ok(integrate_spectral(&ig, quad)?.value)
}

/// Purely reactive circuits: `Re[1/(i h(ω) + 0⁺)] = π δ(h)`, with
/// `h(ω) = ωC - Im(1/Z)`, so each real zero `ω_k` of `h` contributes
/// `ħω_k C² coth(ħω_k/2kT)/|h'(ω_k)|`.
fn reactive_modes(tj: &TunnelJunction, state: &ThermalState) -> Result<f64> {
    let c = tj.capacitance;
    let h = |w: f64| -> Result<f64> {
        let z = tj.impedance(w)?;
        Ok(w * c + (1.0 / z).im)
    };
    let u = tj.units;
    let kt = state.energy(&u);
    let mut total = 0.0;
    let nodes = &tj.omega;
    for k in 0..nodes.len() - 1 {
        let fine = crate::sampled::linspace(nodes[k].max(nodes[k + 1] * 1e-12), nodes[k + 1], 65);
        for pair in fine.windows(2) {
            let (mut a, mut b) = (pair[0], pair[1]);
            let (mut ha, hb) = (h(a)?, h(b)?);
            if !(ha.is_finite() && hb.is_finite()) || ha == 0.0 || ha.signum() == hb.signum() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let hm = h(m)?;
                if hm.signum() == ha.signum() {
                    a = m;
                    ha = hm;
                } else {
                    b = m;
                }
                if b - a <= 1e-15 * b {
                    break;
                }
            }
            let w = 0.5 * (a + b);
            let dw = 1e-6 * w;
            let slope = ((h(w + dw)? - h(w - dw)?) / (2.0 * dw)).abs();
            let th = if kt == 0.0 { 1.0 } else { coth(u.hbar * w / (2.0 * kt)) };
            total += u.hbar * w * c * c * th / slope;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::linspace;
    use approx::assert_relative_eq;

    #[test]
    fn resistor_equipartition() {
        let (c, r) = (1.0, 1.0);
        let kt = 100.0 / (r * c);
        let st = ThermalState::new(kt).unwrap();
        let tj = TunnelJunction::resistor(c, r, 1e3 / (r * c), UnitSystem::reduced()).unwrap();
        let q2 = junction_charge_variance(&tj, &st, &QuadratureSpec::default()).unwrap();
        assert!((q2 / (c * kt) - 1.0).abs() < 0.01, "{q2}");
        let tj2 = TunnelJunction::resistor(2.0 * c, r, 1e3 / (r * c), UnitSystem::reduced()).unwrap();
        let q2b = junction_charge_variance(&tj2, &st, &QuadratureSpec::default()).unwrap();
        assert!((q2b / q2 - 2.0).abs() < 0.02);
    }

    #[test]
    fn resistor_against_closed_integral() {
        // with coth → 1 (T = 0): (ħC²R/π) ∫₀^W ω/(1 + ω²τ²) = (ħC²R/2πτ²) ln(1 + W²τ²)
        let (c, r, w) = (1.0, 2.0, 2e4);
        let tj = TunnelJunction::resistor(c, r, w, UnitSystem::reduced()).unwrap();
        let q2 = junction_charge_variance(&tj, &ThermalState::zero(), &QuadratureSpec::default()).unwrap();
        let tau = r * c;
        let exact = c * c * r / (2.0 * PI * tau * tau) * (1.0 + w * w * tau * tau).ln();
        assert_relative_eq!(q2, exact, epsilon = 0.0, max_relative = 1e-8);
    }

    #[test]
    fn coverage_error() {
        let tj = TunnelJunction::resistor(1.0, 1.0, 5.0, UnitSystem::reduced()).unwrap();
        match junction_charge_variance(&tj, &ThermalState::new(100.0).unwrap(), &QuadratureSpec::default()) {
            Err(Error::Coverage { suggested_omega_max }) => assert!(suggested_omega_max > 5.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lc_single_mode() {
        let (c, l) = (0.5, 2.0);
        let ws = linspace(0.0, 10.0, 1001);
        let z: Vec<Complex64> = ws.iter().map(|&w| Complex64::new(0.0, w * l)).collect();
        let tj = TunnelJunction::new(c, &SampledFunction::complex(ws, z).unwrap(), UnitSystem::reduced()).unwrap();
        let w0 = 1.0 / (l * c).sqrt();
        for kt in [0.0, 0.3, 50.0] {
            let st = ThermalState::new(kt).unwrap();
            let q2 = junction_charge_variance(&tj, &st, &QuadratureSpec::default()).unwrap();
            let th = if kt == 0.0 { 1.0 } else { coth(w0 / (2.0 * kt)) };
            assert_relative_eq!(q2, 0.5 * w0 * c * th, epsilon = 0.0, max_relative = 1e-6);
        }
        let hot = junction_charge_variance(&tj, &ThermalState::new(1e4).unwrap(), &QuadratureSpec::default()).unwrap();
        assert!((hot / (c * 1e4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_active_impedance() {
        let z = SampledFunction::complex(vec![0.0, 1.0], vec![Complex64::new(-1.0, 0.0); 2]).unwrap();
        assert!(matches!(
            TunnelJunction::new(1.0, &z, UnitSystem::reduced()),
            Err(Error::Validation(_))
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn kernel_nonnegative(c in 1e-3f64..10.0, re in 0.0f64..10.0, im in -10.0f64..10.0, w in 0.0f64..100.0) {
            let z = SampledFunction::complex(vec![0.0, 200.0], vec![Complex64::new(re, im); 2]).unwrap();
            let tj = TunnelJunction::new(c, &z, UnitSystem::reduced()).unwrap();
            proptest::prop_assert!(tj.kernel(w).unwrap() >= 0.0);
        }
    }
}
