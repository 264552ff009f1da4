//! Heat-bath models.
//!
//! A bath is fully characterised by its spectral distribution
//! `Re μ̃(ω + i0⁺)`. Each model also exposes the continuation `μ̃(z)` into the
//! upper half plane and, where one exists, the time-domain memory kernel.

mod kramers_kronig;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::sampled::SampledFunction;
use crate::units::UnitSystem;
use kramers_kronig::Continuation;

/// Spectral distribution held on a grid of non-negative frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBath {
    table: SampledFunction,
    cubic: MonotoneCubic,
    continuation: Continuation,
}

impl TabulatedBath {
    pub fn new(table: SampledFunction) -> Result<Self> {
        let ys = table.real_values()?;
        let xs = &table.abscissae;
        if !table.is_strictly_increasing() {
            return Err(Error::Format("tabulated frequencies must be strictly increasing".into()));
        }
        if xs[0] < 0.0 {
            return Err(Error::Format("tabulated frequencies must be >= 0".into()));
        }
        if let Some(y) = ys.iter().find(|y| !(**y >= 0.0)) {
            return Err(Error::Validation(format!(
                "spectral distribution must be non-negative, found {y}"
            )));
        }
        let cubic = MonotoneCubic::new(xs, ys)?;
        let continuation = Continuation::new(cubic.clone(), ys[0]);
        Ok(TabulatedBath {
            table,
            cubic,
            continuation,
        })
    }

    pub fn table(&self) -> &SampledFunction {
        &self.table
    }

    pub fn omega_min(&self) -> f64 {
        self.cubic.lo()
    }

    pub fn omega_max(&self) -> f64 {
        self.cubic.hi()
    }

    /// Interpolated value, held constant below the grid and zero above it.
    fn extended(&self, omega: f64) -> f64 {
        if omega <= self.cubic.lo() {
            self.table.real_values().map(|v| v[0]).unwrap_or(0.0)
        } else if omega > self.cubic.hi() {
            0.0
        } else {
            self.cubic.eval(omega).unwrap_or(0.0).max(0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathModel {
    Ohmic {
        zeta: f64,
    },
    SingleRelaxation {
        zeta: f64,
        omega_r: f64,
    },
    /// Blackbody radiation bath for a charge of observed mass `mass`.
    BlackbodyRadiation {
        mass: f64,
        cutoff: f64,
        /// `2e²/3c³`
        coefficient: f64,
    },
    Tabulated(TabulatedBath),
}

/// How the delta term of a kernel is counted by a one-sided time integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaSupport {
    /// `∫_0^∞ δ(t) dt = 1`; the delta sits just inside `t > 0`.
    OneSided,
    /// `∫_0^∞ δ(t) dt = 1/2`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmoothKernel {
    Zero,
    /// `amplitude · exp(-rate t)`
    Exponential { amplitude: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryKernel {
    pub delta_weight: f64,
    pub delta_support: DeltaSupport,
    pub smooth: SmoothKernel,
}

impl MemoryKernel {
    pub fn smooth_at(&self, t: f64) -> f64 {
        match self.smooth {
            SmoothKernel::Zero => 0.0,
            SmoothKernel::Exponential { amplitude, rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    amplitude * (-rate * t).exp()
                }
            }
        }
    }

    /// Weight the delta contributes to `∫_0^∞ μ(t) e^{izt} dt`.
    pub fn effective_delta(&self) -> f64 {
        match self.delta_support {
            DeltaSupport::OneSided => self.delta_weight,
            DeltaSupport::Symmetric => 0.5 * self.delta_weight,
        }
    }

    /// `∫_0^∞ μ(t) e^{izt} dt`, analytic in the smooth part.
    pub fn fourier(&self, z: Complex64) -> Complex64 {
        let smooth = match self.smooth {
            SmoothKernel::Zero => Complex64::new(0.0, 0.0),
            SmoothKernel::Exponential { amplitude, rate } => {
                amplitude / (Complex64::new(rate, 0.0) - Complex64::i() * z)
            }
        };
        smooth + self.effective_delta()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// `M = m + 2e²Ω/3c³`.
pub fn renormalize_mass(bare_mass: f64, cutoff: f64, units: &UnitSystem) -> Result<f64> {
    if !(bare_mass.is_finite() && bare_mass >= 0.0) {
        return Err(Error::Validation(format!("bare mass must be >= 0, got {bare_mass}")));
    }
    if !(cutoff.is_finite() && cutoff >= 0.0) {
        return Err(Error::Validation(format!("cutoff must be >= 0, got {cutoff}")));
    }
    let m = bare_mass + units.radiation_coefficient() * cutoff;
    positive("renormalized mass", m)?;
    Ok(m)
}

/// `m = M(1 - τ_e Ω)` with `τ_e = 2e²/3Mc³`.
pub fn bare_mass(mass: f64, cutoff: f64, units: &UnitSystem) -> Result<f64> {
    positive("mass", mass)?;
    if !(cutoff.is_finite() && cutoff >= 0.0) {
        return Err(Error::Validation(format!("cutoff must be >= 0, got {cutoff}")));
    }
    let tau = units.radiation_coefficient() / mass;
    let ratio = tau * cutoff;
    if ratio > 1.0 {
        return Err(Error::Causality(format!(
            "cutoff {cutoff:e} exceeds 1/tau_e = {:e}",
            1.0 / tau
        )));
    }
    Ok(mass * (1.0 - ratio))
}

/// `τ_e = 2e²/3Mc³`.
pub fn electron_time(mass: f64, units: &UnitSystem) -> f64 {
    units.radiation_coefficient() / mass
}

impl BathModel {
    pub fn ohmic(zeta: f64) -> Result<Self> {
        positive("zeta", zeta)?;
        Ok(BathModel::Ohmic { zeta })
    }

    pub fn single_relaxation(zeta: f64, omega_r: f64) -> Result<Self> {
        positive("zeta", zeta)?;
        positive("omega_r", omega_r)?;
        Ok(BathModel::SingleRelaxation { zeta, omega_r })
    }

    /// Radiation bath for observed mass `mass`; requires `Ω ≤ 1/τ_e`.
    pub fn blackbody(mass: f64, cutoff: f64, units: &UnitSystem) -> Result<Self> {
        units.validate()?;
        positive("mass", mass)?;
        positive("cutoff", cutoff)?;
        bare_mass(mass, cutoff, units)?;
        Ok(BathModel::BlackbodyRadiation {
            mass,
            cutoff,
            coefficient: units.radiation_coefficient(),
        })
    }

    pub fn tabulated(table: SampledFunction) -> Result<Self> {
        Ok(BathModel::Tabulated(TabulatedBath::new(table)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BathModel::Ohmic { .. } => "ohmic",
            BathModel::SingleRelaxation { .. } => "single-relaxation",
            BathModel::BlackbodyRadiation { .. } => "blackbody",
            BathModel::Tabulated(_) => "tabulated",
        }
    }

    /// `Re μ̃(ω + i0⁺)` for `ω ≥ 0`.
    pub fn spectral_distribution(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) || omega.is_infinite() {
            return Err(Error::Domain(format!(
                "spectral distribution needs omega >= 0, got {omega}"
            )));
        }
        Ok(match self {
            BathModel::Ohmic { zeta } => *zeta,
            BathModel::SingleRelaxation { zeta, omega_r } => {
                zeta * omega_r * omega_r / (omega * omega + omega_r * omega_r)
            }
            BathModel::BlackbodyRadiation {
                cutoff,
                coefficient,
                ..
            } => {
                let w2 = omega * omega;
                coefficient * w2 * cutoff * cutoff / (w2 + cutoff * cutoff)
            }
            BathModel::Tabulated(tab) => tab.cubic.eval(omega)?.max(0.0),
        })
    }

    /// `Re μ̃` for any real `ω` (even extension). Tabulated baths are held
    /// constant below their grid and vanish above it.
    pub(crate) fn re_mu(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match self {
            BathModel::Tabulated(tab) => tab.extended(w),
            _ => self.spectral_distribution(w).unwrap_or(0.0),
        }
    }

    /// `μ̃(z)` for `Im z ≥ 0`.
    pub fn memory_fourier(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im >= 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!(
                "memory function is defined for Im z >= 0, got {z}"
            )));
        }
        let i = Complex64::i();
        Ok(match self {
            BathModel::Ohmic { zeta } => Complex64::new(*zeta, 0.0),
            BathModel::SingleRelaxation { zeta, omega_r } => {
                zeta * omega_r / (Complex64::new(*omega_r, 0.0) - i * z)
            }
            BathModel::BlackbodyRadiation {
                cutoff,
                coefficient,
                ..
            } => coefficient * cutoff * cutoff * z / (z + i * cutoff),
            BathModel::Tabulated(tab) => {
                if z == Complex64::new(0.0, 0.0) {
                    return Ok(Complex64::new(tab.extended(0.0), 0.0));
                }
                // μ(t) is real, so μ̃(-z*) = μ̃(z)*
                let flip = z.re < 0.0;
                let zz = if flip { -z.conj() } else { z };
                let mut v = tab.continuation.eval(zz);
                if zz.im == 0.0 {
                    v.re = tab.extended(zz.re);
                }
                if flip {
                    v.conj()
                } else {
                    v
                }
            }
        })
    }

    /// `dμ̃/dz` where a closed form exists.
    pub(crate) fn memory_fourier_derivative(&self, z: Complex64) -> Option<Complex64> {
        let i = Complex64::i();
        match self {
            BathModel::Ohmic { .. } => Some(Complex64::new(0.0, 0.0)),
            BathModel::SingleRelaxation { zeta, omega_r } => {
                let d = Complex64::new(*omega_r, 0.0) - i * z;
                Some(i * zeta * omega_r / (d * d))
            }
            BathModel::BlackbodyRadiation {
                cutoff,
                coefficient,
                ..
            } => {
                let d = z + i * cutoff;
                Some(coefficient * cutoff * cutoff * i * cutoff / (d * d))
            }
            BathModel::Tabulated(_) => None,
        }
    }

    pub fn memory_kernel(&self) -> Result<MemoryKernel> {
        match self {
            BathModel::Ohmic { zeta } => Ok(MemoryKernel {
                delta_weight: *zeta,
                delta_support: DeltaSupport::OneSided,
                smooth: SmoothKernel::Zero,
            }),
            BathModel::SingleRelaxation { zeta, omega_r } => Ok(MemoryKernel {
                delta_weight: 0.0,
                delta_support: DeltaSupport::OneSided,
                smooth: SmoothKernel::Exponential {
                    amplitude: zeta * omega_r,
                    rate: *omega_r,
                },
            }),
            BathModel::BlackbodyRadiation {
                mass,
                cutoff,
                coefficient,
            } => {
                let tau = coefficient / mass;
                let w2 = cutoff * cutoff;
                Ok(MemoryKernel {
                    delta_weight: 2.0 * mass * w2 * tau,
                    delta_support: DeltaSupport::Symmetric,
                    smooth: SmoothKernel::Exponential {
                        amplitude: -mass * w2 * cutoff * tau,
                        rate: *cutoff,
                    },
                })
            }
            BathModel::Tabulated(_) => Err(Error::Unsupported(
                "tabulated baths have no closed-form memory kernel".into(),
            )),
        }
    }

    /// Frequency scale of the spectral distribution.
    pub fn characteristic_frequency(&self) -> Option<f64> {
        match self {
            BathModel::Ohmic { .. } => None,
            BathModel::SingleRelaxation { omega_r, .. } => Some(*omega_r),
            BathModel::BlackbodyRadiation { cutoff, .. } => Some(*cutoff),
            BathModel::Tabulated(tab) => Some(tab.omega_max()),
        }
    }

    /// `p` with `Re μ̃ ~ ω^p` as `ω → 0`.
    pub fn zero_power(&self) -> f64 {
        match self {
            BathModel::BlackbodyRadiation { .. } => 2.0,
            BathModel::Tabulated(tab) if tab.extended(0.0) == 0.0 => {
                let (a, b) = (tab.omega_min().max(1e-300), tab.omega_max());
                let w1 = a + 1e-3 * (b - a);
                let w2 = a + 2e-3 * (b - a);
                let (f1, f2) = (tab.extended(w1), tab.extended(w2));
                if f1 > 0.0 && f2 > 0.0 && a == 0.0 {
                    ((f2 / f1).ln() / 2f64.ln()).clamp(0.0, 4.0)
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// `q` with `Re μ̃ ~ ω^q` as `ω → ∞` (`-inf` for compact support).
    pub fn tail_power(&self) -> f64 {
        match self {
            BathModel::Ohmic { .. } | BathModel::BlackbodyRadiation { .. } => 0.0,
            BathModel::SingleRelaxation { .. } => -2.0,
            BathModel::Tabulated(_) => f64::NEG_INFINITY,
        }
    }

    /// Upper end of the support of `Re μ̃`, when compact.
    pub fn support(&self) -> Option<f64> {
        match self {
            BathModel::Tabulated(tab) => Some(tab.omega_max()),
            _ => None,
        }
    }

    /// Largest value of `Re μ̃`, used as a magnitude scale.
    pub fn peak_value(&self) -> f64 {
        match self {
            BathModel::Ohmic { zeta } | BathModel::SingleRelaxation { zeta, .. } => *zeta,
            BathModel::BlackbodyRadiation {
                cutoff,
                coefficient,
                ..
            } => coefficient * cutoff * cutoff,
            BathModel::Tabulated(tab) => tab
                .table
                .real_values()
                .map(|v| v.iter().cloned().fold(0.0, f64::max))
                .unwrap_or(0.0),
        }
    }

    /// Effective inertia entering `α(z)`: the bare mass for the radiation
    /// bath, otherwise `mass` itself.
    pub(crate) fn inertia(&self, mass: f64, units: &UnitSystem) -> Result<f64> {
        match self {
            BathModel::BlackbodyRadiation {
                mass: m_obs,
                cutoff,
                coefficient,
            } => {
                if (mass - m_obs).abs() > 1e-12 * m_obs {
                    return Err(Error::Validation(format!(
                        "system mass {mass:e} differs from the bath's observed mass {m_obs:e}"
                    )));
                }
                let _ = units;
                let ratio = coefficient / m_obs * cutoff;
                Ok(m_obs * (1.0 - ratio))
            }
            _ => Ok(mass),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::logspace;
    use crate::units::cgs;
    use approx::assert_relative_eq;

    fn bbr_reduced() -> BathModel {
        let u = UnitSystem::reduced_with(2.0, 1.0).unwrap();
        BathModel::blackbody(1.0, 5.0, &u).unwrap()
    }

    #[test]
    fn ohmic_is_flat() {
        let b = BathModel::ohmic(2.5).unwrap();
        for w in [0.0, 1e-3, 7.0, 1e9] {
            assert_eq!(b.spectral_distribution(w).unwrap(), 2.5);
        }
        let z = b.memory_fourier(Complex64::new(3.0, 0.0)).unwrap();
        assert_eq!(z, Complex64::new(2.5, 0.0));
        assert!(matches!(b.spectral_distribution(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn blackbody_limits() {
        let b = bbr_reduced();
        let BathModel::BlackbodyRadiation { cutoff, coefficient, .. } = b else { unreachable!() };
        assert_eq!(b.spectral_distribution(0.0).unwrap(), 0.0);
        let plateau = coefficient * cutoff * cutoff;
        let v = b.spectral_distribution(100.0 * cutoff).unwrap();
        assert!((v / plateau - 1.0).abs() < 1.1e-4);
        let at_i = b.memory_fourier(Complex64::new(0.0, cutoff)).unwrap();
        assert_relative_eq!(at_i.re, 0.5 * plateau, epsilon = 0.0, max_relative = 1e-15);
        assert!(at_i.im.abs() < 1e-15 * plateau);
    }

    #[test]
    fn blackbody_structure_constant() {
        let b = bbr_reduced();
        let BathModel::BlackbodyRadiation { cutoff, .. } = b else { unreachable!() };
        let reference = {
            let z = Complex64::new(1.0, 1.0);
            b.memory_fourier(z).unwrap() * (z + Complex64::i() * cutoff) / z
        };
        for (re, im) in [(0.3, 0.0), (-4.0, 2.0), (17.0, 0.1), (0.0, 9.0)] {
            let z = Complex64::new(re, im);
            let v = b.memory_fourier(z).unwrap() * (z + Complex64::i() * cutoff) / z;
            assert!((v - reference).norm() < 1e-14 * reference.norm());
        }
    }

    #[test]
    fn single_relaxation_real_part_matches() {
        let b = BathModel::single_relaxation(1.7, 3.0).unwrap();
        for w in logspace(1e-4, 1e4, 60) {
            let z = b.memory_fourier(Complex64::new(w, 0.0)).unwrap();
            assert_relative_eq!(z.re, b.spectral_distribution(w).unwrap(), epsilon = 0.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn mass_renormalization() {
        let u = UnitSystem::gaussian_cgs();
        assert_eq!(renormalize_mass(3.0, 0.0, &u).unwrap(), 3.0);
        let m = cgs::ELECTRON_MASS;
        let tau = electron_time(m, &u);
        assert!((tau / 6e-24 - 1.0).abs() < 0.05);
        assert!((1.0 / tau / 1.6e23 - 1.0).abs() < 0.01);
        assert_eq!(bare_mass(m, 1.0 / tau, &u).unwrap(), 0.0);
        assert!(matches!(bare_mass(m, 1.01 / tau, &u), Err(Error::Causality(_))));
        let bare = bare_mass(m, 1e22, &u).unwrap();
        assert_relative_eq!(renormalize_mass(bare, 1e22, &u).unwrap(), m, epsilon = 0.0, max_relative = 1e-14);
    }

    #[test]
    fn kernels() {
        let k = BathModel::ohmic(0.4).unwrap().memory_kernel().unwrap();
        assert_eq!(k.delta_weight, 0.4);
        assert_eq!(k.smooth_at(1.0), 0.0);
        let b = bbr_reduced();
        let k = b.memory_kernel().unwrap();
        assert!(k.smooth_at(200.0).abs() < 1e-200);
        assert!(matches!(
            BathModel::tabulated(SampledFunction::real(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap())
                .unwrap()
                .memory_kernel(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn kernel_transform_round_trip() {
        // Fourier transform of the kernel, done by quadrature on the smooth part
        // plus the delta weight, against memory_fourier.
        use crate::quadrature::gauss_kronrod::gauss10_complex;
        for b in [bbr_reduced(), BathModel::single_relaxation(1.3, 0.7).unwrap()] {
            let k = b.memory_kernel().unwrap();
            for w in [0.1, 1.0, 4.0, 30.0] {
                let z = Complex64::new(w, 0.0);
                let rate = match k.smooth {
                    SmoothKernel::Exponential { rate, .. } => rate,
                    SmoothKernel::Zero => 1.0,
                };
                let tmax = 60.0 / rate;
                let n = 20_000;
                let h = tmax / n as f64;
                let mut f = |t: f64| Complex64::from_polar(k.smooth_at(t), w * t);
                let mut acc = Complex64::new(k.effective_delta(), 0.0);
                for j in 0..n {
                    acc += gauss10_complex(&mut f, j as f64 * h, (j + 1) as f64 * h);
                }
                let exact = b.memory_fourier(z).unwrap();
                assert!((acc - exact).norm() < 1e-6 * exact.norm(), "{acc} vs {exact}");
            }
        }
    }

    #[test]
    fn tabulated_continuation_of_relaxation_bath() {
        let (zeta, wr) = (1.0, 2.0);
        let sr = BathModel::single_relaxation(zeta, wr).unwrap();
        let mut xs = vec![0.0];
        xs.extend(logspace(1e-3, 2e3, 3000));
        let ys: Vec<f64> = xs.iter().map(|&w| sr.spectral_distribution(w).unwrap()).collect();
        let tab = BathModel::tabulated(SampledFunction::real(xs, ys).unwrap()).unwrap();
        for (re, im) in [(0.5, 0.0), (2.0, 0.0), (7.5, 0.0), (1.0, 1.0), (0.0, 3.0), (-2.0, 0.0)] {
            let z = Complex64::new(re, im);
            let a = tab.memory_fourier(z).unwrap();
            let b = sr.memory_fourier(z).unwrap();
            // the table ends at 2e3: the missing tail is O(ζ Ω_r²/ω_max) ~ 1e-3 absolute
            assert!((a - b).norm() < 1e-3 * b.norm(), "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        let b = BathModel::single_relaxation(1.0, 1.0).unwrap();
        assert!(matches!(b.memory_fourier(Complex64::new(1.0, -1e-3)), Err(Error::Domain(_))));
    }

    proptest::proptest! {
        #[test]
        fn spectral_distribution_nonnegative(
            zeta in 1e-3f64..1e3, wr in 1e-3f64..1e3, w in 0.0f64..1e6, cut in 1e-3f64..0.4
        ) {
            let u = UnitSystem::reduced();
            for b in [
                BathModel::ohmic(zeta).unwrap(),
                BathModel::single_relaxation(zeta, wr).unwrap(),
                BathModel::blackbody(1.0, cut, &u).unwrap(),
            ] {
                proptest::prop_assert!(b.spectral_distribution(w).unwrap() >= 0.0);
            }
        }

        #[test]
        fn no_upper_half_plane_zeros_or_poles(
            zeta in 1e-2f64..1e2, wr in 1e-2f64..1e2, re in -1e3f64..1e3, im in 1e-3f64..1e3
        ) {
            let u = UnitSystem::reduced();
            let z = Complex64::new(re, im);
            for b in [
                BathModel::single_relaxation(zeta, wr).unwrap(),
                BathModel::blackbody(1.0, 0.5, &u).unwrap(),
            ] {
                let v = b.memory_fourier(z).unwrap();
                proptest::prop_assert!(v.norm() > 0.0 && v.norm().is_finite());
            }
        }

        #[test]
        fn boundary_value_limit(zeta in 1e-2f64..1e2, wr in 1e-2f64..1e2, w in 1e-3f64..1e3) {
            let b = BathModel::single_relaxation(zeta, wr).unwrap();
            let target = b.spectral_distribution(w).unwrap();
            let mut last = f64::INFINITY;
            for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
                let d = (b.memory_fourier(Complex64::new(w, eps * wr)).unwrap().re - target).abs();
                proptest::prop_assert!(d <= last * (1.0 + 1e-9) + 1e-15);
                last = d;
            }
            proptest::prop_assert!(last <= 1e-3 * target + 1e-14);
        }
    }
}
