//! Run configuration: a TOML file with sections, plus `section.key=value`
//! overrides from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qle_core::quadrature::{QuadratureSpec, TailStrategy};
use qle_core::sampled::{linspace, logspace};
use qle_core::simulate::Scheme;
use qle_core::units::{Regime, UnitSystem};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bath,
    Response,
    Correlate,
    Msd,
    Spectrum,
    FreeEnergy,
    Josephson,
    Junction,
    Detector,
    Radiate,
    Simulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bath => "bath",
            Command::Response => "response",
            Command::Correlate => "correlate",
            Command::Msd => "msd",
            Command::Spectrum => "spectrum",
            Command::FreeEnergy => "free-energy",
            Command::Josephson => "josephson",
            Command::Junction => "junction",
            Command::Detector => "detector",
            Command::Radiate => "radiate",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub units: UnitsSection,
    pub system: SystemSection,
    pub bath: BathSection,
    pub thermal: ThermalSection,
    pub quadrature: QuadratureSection,
    pub grid: GridSection,
    pub response: ResponseSection,
    pub josephson: JosephsonSection,
    pub junction: JunctionSection,
    pub radiate: RadiateSection,
    pub simulate: SimulateSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitsMode {
    Reduced,
    GaussianCgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnitsSection {
    pub mode: UnitsMode,
    /// Speed of light and charge in reduced mode.
    pub c: f64,
    pub e_charge: f64,
}

impl Default for UnitsSection {
    fn default() -> Self {
        UnitsSection {
            mode: UnitsMode::Reduced,
            c: 1.0,
            e_charge: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub mass: f64,
    pub stiffness: Option<f64>,
    pub omega0: Option<f64>,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            mass: 1.0,
            stiffness: None,
            omega0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathKind {
    Ohmic,
    SingleRelaxation,
    Blackbody,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathSection {
    pub model: BathKind,
    pub zeta: f64,
    pub omega_r: Option<f64>,
    pub cutoff: Option<f64>,
    /// CSV with columns `omega, re_mu`.
    pub table: Option<PathBuf>,
}

impl Default for BathSection {
    fn default() -> Self {
        BathSection {
            model: BathKind::Ohmic,
            zeta: 1.0,
            omega_r: None,
            cutoff: None,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalSection {
    /// Kelvin in gaussian-cgs mode, energy in reduced mode.
    pub temperature: f64,
    pub regime: Regime,
}

impl Default for ThermalSection {
    fn default() -> Self {
        ThermalSection {
            temperature: 1.0,
            regime: Regime::Quantum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub tail: TailStrategy,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureSection {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_panels: q.max_panels,
            tail: q.tail_strategy,
        }
    }
}

impl QuadratureSection {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec::default()
            .with_rel_tol(self.rel_tol)
            .with_abs_tol(self.abs_tol)
            .with_max_panels(self.max_panels)
            .with_tail(self.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Abscissae: times, frequencies or temperatures depending on the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Explicit values; when present the range keys are ignored.
    pub values: Option<Vec<f64>>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            start: 0.1,
            stop: 10.0,
            points: 50,
            spacing: Spacing::Linear,
            values: None,
        }
    }
}

impl GridSection {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if let Some(v) = &self.values {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(CliError::config("grid.values", "must be a non-empty list of finite numbers"));
            }
            return Ok(v.clone());
        }
        if self.points == 0 {
            return Err(CliError::config("grid.points", "must be at least 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return Err(CliError::config("grid.stop", "range must be finite with stop >= start"));
        }
        Ok(match self.spacing {
            Spacing::Linear => linspace(self.start, self.stop, self.points),
            Spacing::Log => {
                if self.start <= 0.0 {
                    return Err(CliError::config("grid.start", "log spacing needs start > 0"));
                }
                logspace(self.start, self.stop, self.points)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseQuantity {
    Susceptibility,
    Green,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResponseSection {
    pub quantity: ResponseQuantity,
}

impl Default for ResponseSection {
    fn default() -> Self {
        ResponseSection {
            quantity: ResponseQuantity::Susceptibility,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JosephsonSection {
    pub capacitance: f64,
    pub resistance: f64,
    pub bias: f64,
    pub critical: f64,
    /// Farad, ohm and ampere; implies gaussian-cgs.
    pub practical: bool,
}

impl Default for JosephsonSection {
    fn default() -> Self {
        JosephsonSection {
            capacitance: 1.0,
            resistance: 1.0,
            bias: 0.0,
            critical: 1.0,
            practical: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JunctionSection {
    pub capacitance: f64,
    /// Pure resistor environment, used when no impedance table is given.
    pub resistance: f64,
    pub omega_max: Option<f64>,
    /// CSV with columns `omega, re_Z, im_Z`.
    pub impedance: Option<PathBuf>,
    pub practical: bool,
}

impl Default for JunctionSection {
    fn default() -> Self {
        JunctionSection {
            capacitance: 1.0,
            resistance: 1.0,
            omega_max: None,
            impedance: None,
            practical: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RadiateSection {
    /// CSV with columns `t, f` on a uniform grid.
    pub force: Option<PathBuf>,
    pub x0: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    Equilibrium,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub dt: f64,
    pub steps: usize,
    pub paths: usize,
    pub scheme: Scheme,
    pub initial: Initial,
    pub x0: f64,
    pub v0: f64,
    pub record_stride: usize,
    /// Also write every path to `paths.bin`.
    pub dump: bool,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            dt: 1e-3,
            steps: 1000,
            paths: 1000,
            scheme: Scheme::StrongOrder1,
            initial: Initial::Equilibrium,
            x0: 0.0,
            v0: 0.0,
            record_stride: 10,
            dump: false,
        }
    }
}

impl RunConfig {
    /// Parses a config document and applies `key=value` overrides before
    /// checking the schema.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Validation(format!("config: {}", e.message())))?;
        Ok(cfg)
    }

    pub fn unit_system(&self) -> Result<UnitSystem, CliError> {
        match self.units.mode {
            UnitsMode::GaussianCgs => Ok(UnitSystem::gaussian_cgs()),
            UnitsMode::Reduced => UnitSystem::reduced_with(self.units.c, self.units.e_charge).map_err(CliError::from),
        }
    }

    /// Input files referenced by the config.
    pub fn inputs(&self) -> Vec<(&'static str, &Path)> {
        let mut v = Vec::new();
        if let Some(p) = &self.bath.table {
            v.push(("bath.table", p.as_path()));
        }
        if let Some(p) = &self.junction.impedance {
            v.push(("junction.impedance", p.as_path()));
        }
        if let Some(p) = &self.radiate.force {
            v.push(("radiate.force", p.as_path()));
        }
        v
    }

    /// Makes input paths absolute so a manifest can be replayed from anywhere.
    pub fn resolve_paths(&mut self, base: &Path) -> Result<(), CliError> {
        for (key, slot) in [
            ("bath.table", &mut self.bath.table),
            ("junction.impedance", &mut self.junction.impedance),
            ("radiate.force", &mut self.radiate.force),
        ] {
            if let Some(p) = slot {
                let full = if p.is_absolute() { p.clone() } else { base.join(&p) };
                let canon = full
                    .canonicalize()
                    .map_err(|e| CliError::config(key, &format!("{}: {e}", full.display())))?;
                *slot = Some(canon);
            }
        }
        Ok(())
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let Some((key, raw)) = item.split_once('=') else {
        return Err(CliError::Validation(format!("override `{item}` is not of the form key=value")));
    };
    let key = key.trim();
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Validation(format!("override key `{key}` is malformed")));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(CliError::Validation(format!("override key `{key}`: `{part}` is not a section"))),
        };
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = RunConfig::parse("seed = 3\n[system]\nmass = 2.0\n", &[]).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.system.mass, 2.0);
        assert_eq!(c.bath, BathSection::default());
    }

    #[test]
    fn overrides_win() {
        let c = RunConfig::parse(
            "[bath]\nzeta = 2.0\n",
            &["bath.zeta=5".into(), "thermal.regime=classical".into(), "grid.values=[1, 2.5]".into()],
        )
        .unwrap();
        assert_eq!(c.bath.zeta, 5.0);
        assert_eq!(c.thermal.regime, Regime::Classical);
        assert_eq!(c.grid.values, Some(vec![1.0, 2.5]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::parse("[bath]\nzetta = 2.0\n", &[]).unwrap_err();
        assert!(matches!(e, CliError::Validation(ref m) if m.contains("zetta")), "{e:?}");
        assert!(RunConfig::parse("", &["nosuch.key=1".into()]).is_err());
        assert!(RunConfig::parse("[grid]\nspacing = \"cubic\"\n", &[]).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = RunConfig::parse("[simulate]\nscheme = \"euler-maruyama\"\n", &[]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn grids() {
        let g = GridSection {
            start: 1.0,
            stop: 100.0,
            points: 3,
            spacing: Spacing::Log,
            values: None,
        };
        let v = g.values().unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12);
        let bad = GridSection { start: 0.0, ..g };
        assert!(bad.values().is_err());
    }
}
