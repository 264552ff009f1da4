//! Semi-infinite spectral integrals.
//!
//! Every quantity in the toolkit reduces to integrals of the shape
//!
//! ```text
//!     ∫_0^∞ dω  envelope(ω) · thermal(ω) · oscillation(ω t)
//! ```
//!
//! where the thermal factor is `coth(ħω/2kT)` (or its classical limit) and the
//! oscillation is `cos ωt`, `sin ωt` or `1 - cos ωt`. The engine splits the
//! half line at a break frequency `ω_b`:
//!
//! * `(0, ω_b]` is covered by a globally adaptive 21-point Gauss-Kronrod
//!   scheme. The initial partition is graded geometrically towards the origin
//!   and refined around declared resonances. The sliver next to the origin is
//!   integrated from the declared power law, so the thermal factor is never
//!   evaluated at zero.
//! * Non-oscillatory tails are mapped onto `(0, 1]` with `ω = ω_b / u` and join
//!   the same adaptive pool.
//! * Oscillatory tails are cut at the zeros of the oscillating factor and the
//!   resulting alternating half-period series is summed with Euler's
//!   transformation, or (optionally) replaced by its asymptotic expansion.

mod filon;
pub(crate) mod gauss_kronrod;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::ThermalFactor;
use gauss_kronrod::qk21;

pub use filon::{inverse_cos_transform, SpectrumTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oscillation {
    None,
    Cos(f64),
    Sin(f64),
    OneMinusCos(f64),
}

impl Oscillation {
    fn time(&self) -> f64 {
        match *self {
            Oscillation::None => 0.0,
            Oscillation::Cos(t) | Oscillation::Sin(t) | Oscillation::OneMinusCos(t) => t,
        }
    }

    #[inline]
    fn factor(&self, w: f64) -> f64 {
        match *self {
            Oscillation::None => 1.0,
            Oscillation::Cos(t) => (w * t).cos(),
            Oscillation::Sin(t) => (w * t).sin(),
            Oscillation::OneMinusCos(t) => {
                let s = (0.5 * w * t).sin();
                2.0 * s * s
            }
        }
    }

    fn zero_power(&self) -> f64 {
        match self {
            Oscillation::None | Oscillation::Cos(_) => 0.0,
            Oscillation::Sin(_) => 1.0,
            Oscillation::OneMinusCos(_) => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailStrategy {
    /// Mapped algebraic tail, or half-period panels summed with Euler's
    /// transformation when the integrand oscillates.
    #[default]
    ExponentialTail,
    /// Integration-by-parts asymptotic series at a far cut.
    AsymptoticFilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// Absolute tolerance, measured in units of the integrand's declared
    /// `magnitude * scale`.
    pub abs_tol: f64,
    pub max_panels: usize,
    pub tail_strategy: TailStrategy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 50_000,
            tail_strategy: TailStrategy::ExponentialTail,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    pub fn with_tail(mut self, tail: TailStrategy) -> Self {
        self.tail_strategy = tail;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Validation("quadrature tolerances must be positive".into()));
        }
        if self.max_panels < 64 {
            return Err(Error::Validation("max_panels must be at least 64".into()));
        }
        Ok(())
    }
}

type Envelope<'a> = Box<dyn Fn(f64) -> f64 + Sync + Send + 'a>;

/// One spectral integral. Built with the chained setters.
pub struct SpectralIntegrand<'a> {
    envelope: Envelope<'a>,
    thermal: ThermalFactor,
    oscillation: Oscillation,
    envelope_zero_power: f64,
    envelope_tail_power: f64,
    scale: f64,
    magnitude: f64,
    breakpoints: Vec<f64>,
    upper: Option<f64>,
}

impl<'a> SpectralIntegrand<'a> {
    pub fn new(envelope: impl Fn(f64) -> f64 + Sync + Send + 'a) -> Self {
        SpectralIntegrand {
            envelope: Box::new(envelope),
            thermal: ThermalFactor::Unit,
            oscillation: Oscillation::None,
            envelope_zero_power: 0.0,
            envelope_tail_power: f64::NEG_INFINITY,
            scale: 1.0,
            magnitude: 1.0,
            breakpoints: Vec::new(),
            upper: None,
        }
    }

    pub fn thermal(mut self, thermal: ThermalFactor) -> Self {
        self.thermal = thermal;
        self
    }

    pub fn oscillation(mut self, oscillation: Oscillation) -> Self {
        self.oscillation = oscillation;
        self
    }

    /// Power `p` with `envelope ~ ω^p` as `ω → 0`.
    pub fn zero_power(mut self, p: f64) -> Self {
        self.envelope_zero_power = p;
        self
    }

    /// Power `q` with `envelope ~ ω^q` as `ω → ∞` (`-inf` for faster than any power).
    pub fn tail_power(mut self, q: f64) -> Self {
        self.envelope_tail_power = q;
        self
    }

    /// Characteristic frequency of the envelope.
    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Typical size of `envelope · thermal`; the absolute tolerance is relative to
    /// `magnitude * scale`.
    pub fn magnitude(mut self, magnitude: f64) -> Self {
        self.magnitude = magnitude;
        self
    }

    pub fn breakpoint(mut self, w: f64) -> Self {
        if w.is_finite() && w > 0.0 {
            self.breakpoints.push(w);
        }
        self
    }

    /// Adds breakpoints clustered around a peak of the given half width.
    pub fn resonance(mut self, center: f64, width: f64) -> Self {
        if !(center.is_finite() && center > 0.0) {
            return self;
        }
        let width = if width.is_finite() && width > 0.0 {
            width.min(center)
        } else {
            1e-3 * center
        };
        self.breakpoints.push(center);
        for k in [0.5, 1.0, 2.0, 5.0, 12.0, 30.0, 80.0, 200.0] {
            self.breakpoints.push(center + k * width);
            if center - k * width > 0.0 {
                self.breakpoints.push(center - k * width);
            }
        }
        self
    }

    /// Restricts the integral to `[0, upper]` (compactly supported envelopes).
    pub fn support(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self
    }

    #[inline]
    fn base(&self, w: f64) -> f64 {
        let e = (self.envelope)(w);
        if e == 0.0 {
            return 0.0;
        }
        e * self.thermal.weight(w)
    }

    #[inline]
    fn full(&self, w: f64) -> f64 {
        let b = self.base(w);
        if b == 0.0 {
            return 0.0;
        }
        b * self.oscillation.factor(w)
    }

    /// Evaluates `envelope · thermal · oscillation` at `w`.
    pub fn eval(&self, w: f64) -> f64 {
        self.full(w)
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper
    }

    pub fn oscillation_kind(&self) -> Oscillation {
        self.oscillation
    }

    pub fn characteristic_scale(&self) -> f64 {
        self.scale
    }

    fn effective_tail_power(&self) -> f64 {
        self.envelope_tail_power + self.thermal.tail_power()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub evaluations: usize,
    pub spec: QuadratureSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PanelKind {
    Direct,
    /// `ω = ω_b / u` on `u ∈ (a, b]`.
    Mapped,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    kind: PanelKind,
    value: f64,
    error: f64,
    depth: u32,
}

struct HeapEntry {
    error: f64,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

const MAX_DEPTH: u32 = 80;
const SLIVER: f64 = 1e-14;

/// Integrates a spectral integrand over `[0, ∞)` (or its declared support).
pub fn integrate_spectral(ig: &SpectralIntegrand, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if !(ig.scale.is_finite() && ig.scale > 0.0) {
        return Err(Error::Validation(format!("integrand scale must be positive, got {}", ig.scale)));
    }
    if !(ig.magnitude.is_finite() && ig.magnitude > 0.0) {
        return Err(Error::Validation("integrand magnitude must be positive".into()));
    }
    let done = |value: f64| QuadResult {
        value,
        error_estimate: 0.0,
        panels: 0,
        evaluations: 0,
        spec: *spec,
    };

    let t = ig.oscillation.time();
    if !t.is_finite() {
        return Err(Error::Domain("oscillation time must be finite".into()));
    }
    let (osc, sign) = match ig.oscillation {
        Oscillation::Cos(t) if t == 0.0 => (Oscillation::None, 1.0),
        Oscillation::Cos(t) => (Oscillation::Cos(t.abs()), 1.0),
        Oscillation::Sin(t) if t == 0.0 => return Ok(done(0.0)),
        Oscillation::Sin(t) => (Oscillation::Sin(t.abs()), t.signum()),
        Oscillation::OneMinusCos(t) if t == 0.0 => return Ok(done(0.0)),
        Oscillation::OneMinusCos(t) => (Oscillation::OneMinusCos(t.abs()), 1.0),
        Oscillation::None => (Oscillation::None, 1.0),
    };
    if matches!(ig.thermal, ThermalFactor::Zero) {
        return Ok(done(0.0));
    }
    let t = t.abs();

    let p_eff = ig.envelope_zero_power + ig.thermal.zero_power() + osc.zero_power();
    if !(p_eff > -1.0) {
        return Err(Error::Divergent(format!(
            "integrand behaves like ω^{p_eff} at the origin"
        )));
    }

    let q = ig.effective_tail_power();
    if ig.upper.is_none() {
        let need_absolute = matches!(osc, Oscillation::None | Oscillation::OneMinusCos(_));
        if need_absolute && !(q < -1.0) {
            return Err(Error::Divergent(format!(
                "integrand decays like ω^{q} at infinity; not integrable"
            )));
        }
        if !need_absolute && !(q < 0.0) {
            return Err(Error::Divergent(format!(
                "oscillatory integrand grows like ω^{q} at infinity"
            )));
        }
    }

    let mut engine = Engine {
        ig,
        osc,
        spec,
        evaluations: 0,
    };
    let r = engine.run(t)?;
    Ok(QuadResult {
        value: sign * r.0,
        error_estimate: r.1,
        panels: r.2,
        evaluations: engine.evaluations,
        spec: *spec,
    })
}

struct Engine<'s, 'a> {
    ig: &'s SpectralIntegrand<'a>,
    osc: Oscillation,
    spec: &'s QuadratureSpec,
    evaluations: usize,
}

impl Engine<'_, '_> {
    fn full(&self, w: f64) -> f64 {
        let b = self.ig.base(w);
        if b == 0.0 {
            0.0
        } else {
            b * self.osc.factor(w)
        }
    }

    /// Oscillating part of the tail: the `cos` of `1 - cos` is split off
    /// from the mapped non-oscillatory part.
    fn tail_integrand(&self, w: f64) -> f64 {
        let b = self.ig.base(w);
        if b == 0.0 {
            return 0.0;
        }
        match self.osc {
            Oscillation::OneMinusCos(t) => b * (w * t).cos(),
            _ => b * self.osc.factor(w),
        }
    }

    fn run(&mut self, t: f64) -> Result<(f64, f64, usize)> {
        let ig = self.ig;
        let oscillatory = !matches!(self.osc, Oscillation::None);
        let reference = ig.magnitude * ig.scale;

        let break_w = match ig.upper {
            Some(u) => {
                if !(u.is_finite() && u > 0.0) {
                    return Err(Error::Validation("support must be positive".into()));
                }
                u
            }
            None => {
                let mut wb = 10.0 * ig.scale;
                for &b in &ig.breakpoints {
                    wb = wb.max(2.0 * b);
                }
                if let Some(c) = ig.thermal.crossover() {
                    wb = wb.max(2.0 * c.min(1e3 * ig.scale));
                }
                if oscillatory {
                    let cut = if self.spec.tail_strategy == TailStrategy::AsymptoticFilon {
                        200.0
                    } else {
                        50.0
                    };
                    wb = wb.max(cut / t);
                    align_to_zero(wb, t, self.osc)
                } else {
                    wb
                }
            }
        };

        // Initial partition of the head.
        let w0 = break_w * SLIVER;
        let mut pts = vec![w0, break_w];
        let mut w = break_w;
        while w > w0 * 10.0 {
            w /= 10.0;
            pts.push(w);
        }
        pts.extend(ig.breakpoints.iter().copied());
        if let Some(c) = ig.thermal.crossover() {
            pts.extend([0.1 * c, c, 10.0 * c]);
        }
        if oscillatory {
            let period = 2.0 * std::f64::consts::PI / t;
            let chunk = 2.0 * period;
            let n = (break_w / chunk).ceil() as usize;
            let n = n.min(self.spec.max_panels / 4);
            if n > 1 {
                let step = break_w / n as f64;
                pts.extend((1..n).map(|i| step * i as f64));
            }
        }
        pts.retain(|&p| p >= w0 && p <= break_w && p.is_finite());
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.abs().max(b.abs()));

        let mut panels: Vec<Panel> = Vec::new();
        for win in pts.windows(2) {
            panels.push(self.make_panel(win[0], win[1], PanelKind::Direct, 0, break_w));
        }
        let needs_mapped = ig.upper.is_none()
            && matches!(self.osc, Oscillation::None | Oscillation::OneMinusCos(_));
        if needs_mapped {
            for win in [0.0, 0.05, 0.25, 0.5, 1.0].windows(2) {
                panels.push(self.make_panel(win[0], win[1], PanelKind::Mapped, 0, break_w));
            }
        }

        // Sliver [0, w0] from the declared power law.
        let p_eff = ig.envelope_zero_power + ig.thermal.zero_power() + self.osc.zero_power();
        let f0 = self.full(w0);
        self.evaluations += 1;
        let sliver = if f0.is_finite() { f0 * w0 / (p_eff + 1.0) } else { 0.0 };

        let (value, error, count) = self.adapt(&mut panels, break_w, reference, sliver)?;

        // Oscillatory tail beyond the break.
        let (tail_value, tail_error) = if ig.upper.is_none() && oscillatory {
            let tol = 0.25
                * (self.spec.abs_tol * reference).max(self.spec.rel_tol * (value + sliver).abs());
            let (v, e) = match self.spec.tail_strategy {
                TailStrategy::ExponentialTail => self.euler_tail(break_w, t, tol)?,
                TailStrategy::AsymptoticFilon => self.asymptotic_tail(break_w, t),
            };
            match self.osc {
                Oscillation::OneMinusCos(_) => (-v, e),
                _ => (v, e),
            }
        } else {
            (0.0, 0.0)
        };

        Ok((sliver + value + tail_value, error + tail_error + sliver.abs() * 1e-3, count))
    }

    fn make_panel(&mut self, a: f64, b: f64, kind: PanelKind, depth: u32, break_w: f64) -> Panel {
        let r = match kind {
            PanelKind::Direct => {
                let mut f = |w: f64| self.full(w);
                qk21(&mut f, a, b)
            }
            PanelKind::Mapped => {
                // Non-oscillatory part of the tail: ∫ base(ω_b/u) ω_b/u² du.
                let mut f = |u: f64| {
                    let w = break_w / u;
                    let v = self.ig.base(w);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * break_w / (u * u)
                    }
                };
                qk21(&mut f, a, b)
            }
        };
        self.evaluations += 21;
        Panel {
            a,
            b,
            kind,
            value: r.value,
            error: r.error,
            depth,
        }
    }

    fn adapt(
        &mut self,
        panels: &mut Vec<Panel>,
        break_w: f64,
        reference: f64,
        sliver: f64,
    ) -> Result<(f64, f64, usize)> {
        let mut heap: BinaryHeap<HeapEntry> = panels
            .iter()
            .enumerate()
            .map(|(index, p)| HeapEntry {
                error: p.error,
                index,
            })
            .collect();
        let mut total: f64 = panels.iter().map(|p| p.value).sum();
        let mut err: f64 = panels.iter().map(|p| p.error).sum();
        let mut live = vec![true; panels.len()];

        loop {
            let tol = (self.spec.abs_tol * reference).max(self.spec.rel_tol * (total + sliver).abs());
            if err <= 0.5 * tol {
                break;
            }
            let Some(entry) = heap.pop() else { break };
            let p = panels[entry.index];
            let mid = 0.5 * (p.a + p.b);
            let splittable = p.depth < MAX_DEPTH && mid > p.a && mid < p.b;
            if !splittable {
                continue;
            }
            if panels.len() + 2 > self.spec.max_panels {
                let (v, e) = fixed_sum(panels, &live);
                return Err(Error::Convergence {
                    value: v + sliver,
                    estimate: e,
                    panels: panels.len(),
                });
            }
            let left = self.make_panel(p.a, mid, p.kind, p.depth + 1, break_w);
            let right = self.make_panel(mid, p.b, p.kind, p.depth + 1, break_w);
            live[entry.index] = false;
            total += left.value + right.value - p.value;
            err += left.error + right.error - p.error;
            for child in [left, right] {
                panels.push(child);
                live.push(true);
                heap.push(HeapEntry {
                    error: child.error,
                    index: panels.len() - 1,
                });
            }
            if !total.is_finite() {
                return Err(Error::Domain("integrand is not finite on the integration range".into()));
            }
            // Periodically resum to limit drift in the running totals.
            if panels.len() % 1024 == 0 {
                let (v, e) = fixed_sum(panels, &live);
                total = v;
                err = e;
            }
        }
        let (v, e) = fixed_sum(panels, &live);
        let count = live.iter().filter(|&&l| l).count();
        Ok((v, e, count))
    }

    fn euler_tail(&mut self, start: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
        let h = std::f64::consts::PI / t;
        let mut partial = Vec::with_capacity(64);
        let mut sum = 0.0;
        let mut last_estimate: Option<f64> = None;
        let mut small_run = 0;
        const MAX_TERMS: usize = 2000;
        for k in 0..MAX_TERMS {
            let a = start + h * k as f64;
            let term = self.lobe(a, a + h, tol * 1e-3);
            sum += term;
            partial.push(sum);
            if term.abs() <= tol * 1e-3 {
                small_run += 1;
            } else {
                small_run = 0;
            }
            if small_run >= 4 && k >= 4 {
                return Ok((sum, term.abs() * 4.0 + tol * 1e-3));
            }
            if k >= 5 {
                let est = euler_average(&partial);
                if let Some(prev) = last_estimate {
                    let diff = (est - prev).abs();
                    if diff <= tol && k >= 8 {
                        return Ok((est, diff));
                    }
                }
                last_estimate = Some(est);
            }
        }
        Err(Error::Convergence {
            value: last_estimate.unwrap_or(sum),
            estimate: f64::INFINITY,
            panels: MAX_TERMS,
        })
    }

    /// One half-period lobe, adaptively bisected to a local tolerance.
    fn lobe(&mut self, a: f64, b: f64, tol: f64) -> f64 {
        let mut stack = vec![(a, b, 0u32)];
        let mut acc = 0.0;
        while let Some((a, b, d)) = stack.pop() {
            let mut f = |w: f64| self.tail_integrand(w);
            let r = qk21(&mut f, a, b);
            self.evaluations += 21;
            if r.error <= tol.max(1e-15 * r.value.abs()) || d >= 12 {
                acc += r.value;
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, d + 1));
                stack.push((a, m, d + 1));
            }
        }
        acc
    }

    /// Asymptotic expansion `-Σ (-1)^k g^(k)(a) / (it)^{k+1}` of the tail.
    fn asymptotic_tail(&mut self, a: f64, t: f64) -> (f64, f64) {
        use num_complex::Complex64;
        let h = 0.02 * a;
        let g: Vec<f64> = (-4..=4).map(|j| self.ig.base(a + h * j as f64)).collect();
        self.evaluations += 9;
        let d1 = (g[2] - 8.0 * g[3] + 8.0 * g[5] - g[6]) / (12.0 * h);
        let d2 = (-g[2] + 16.0 * g[3] - 30.0 * g[4] + 16.0 * g[5] - g[6]) / (12.0 * h * h);
        let d3 = (-g[1] + 8.0 * g[2] - 13.0 * g[3] + 13.0 * g[5] - 8.0 * g[6] + g[7])
            / (8.0 * h * h * h);
        let derivs = [g[4], d1, d2, d3];
        let it = Complex64::new(0.0, t);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut last = 0.0;
        let mut pow = it;
        for (k, d) in derivs.iter().enumerate() {
            let term = *d * if k % 2 == 0 { 1.0 } else { -1.0 } / pow;
            sum += term;
            last = term.norm();
            pow *= it;
        }
        let total = -Complex64::from_polar(1.0, a * t) * sum;
        let v = match self.osc {
            Oscillation::Sin(_) => total.im,
            _ => total.re,
        };
        (v, last + 1e-7 * derivs[1].abs() / (t * t))
    }
}

fn fixed_sum(panels: &[Panel], live: &[bool]) -> (f64, f64) {
    let mut order: Vec<&Panel> = panels
        .iter()
        .zip(live)
        .filter(|(_, &l)| l)
        .map(|(p, _)| p)
        .collect();
    order.sort_by(|x, y| {
        (x.kind == PanelKind::Mapped)
            .cmp(&(y.kind == PanelKind::Mapped))
            .then(x.a.total_cmp(&y.a))
    });
    let values: Vec<f64> = order.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = order.iter().map(|p| p.error).collect();
    (pairwise_sum(&values), pairwise_sum(&errors))
}

/// Pairwise (tree) summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Euler transform of an alternating series, from its partial sums, by
/// repeated averaging of neighbouring partial sums.
fn euler_average(partial: &[f64]) -> f64 {
    let mut row = partial.to_vec();
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    row[0]
}

/// First zero of the oscillating factor at or beyond `w`.
fn align_to_zero(w: f64, t: f64, osc: Oscillation) -> f64 {
    let h = std::f64::consts::PI / t;
    match osc {
        Oscillation::Cos(_) | Oscillation::OneMinusCos(_) => ((w / h - 0.5).ceil() + 0.5) * h,
        _ => (w / h).ceil() * h,
    }
}

/// Integrates many points in parallel, keeping input order.
pub fn integrate_batch<'a, F>(ts: &[f64], spec: &QuadratureSpec, make: F) -> Result<Vec<QuadResult>>
where
    F: Fn(f64) -> Result<SpectralIntegrand<'a>> + Sync,
{
    use rayon::prelude::*;
    ts.par_iter()
        .map(|&t| integrate_spectral(&make(t)?, spec))
        .collect()
}
