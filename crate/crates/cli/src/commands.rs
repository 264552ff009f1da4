//! One runner per command. Runners compute everything in memory; nothing is
//! written until the whole run has succeeded.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use qle_core::applications::{
    detector_noise, josephson_phase_variance, josephson_phase_variance_weak, junction_charge_variance,
    JosephsonJunction, TunnelJunction, PRACTICAL,
};
use qle_core::bath::BathModel;
use qle_core::correlations::{classical_free_msd, CorrelationPath, CorrelationRequest};
use qle_core::io::{read_force, read_impedance, read_spectral_distribution};
use qle_core::quadrature::QuadratureSpec;
use qle_core::response::{nonrunaway_trajectory, ResponseFunction, SystemConfig};
use qle_core::simulate::{
    ensemble_msd, fit_diffusion_shape, integrate_langevin, write_path_dump, InitialCondition, SimulationPlan,
};
use qle_core::thermo::{thermo_sweep, FreeEnergyRequest};
use qle_core::units::{Regime, ThermalState, UnitSystem};

use crate::config::{BathKind, Command, Initial, ResponseQuantity, RunConfig};
use crate::CliError;

/// A CSV table plus its JSON mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub comments: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub scalars: BTreeMap<String, f64>,
    pub binaries: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn table(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Artifacts {
            tables: vec![Table {
                name: name.to_string(),
                columns: columns.iter().map(|s| s.to_string()).collect(),
                rows,
                comments: Vec::new(),
            }],
            ..Default::default()
        }
    }

    fn scalar(mut self, key: &str, value: f64) -> Self {
        self.scalars.insert(key.to_string(), value);
        self
    }
}

/// Raw bytes of every input file, keyed as in [`RunConfig::inputs`].
pub type Inputs = BTreeMap<String, Vec<u8>>;

struct Context<'a> {
    cfg: &'a RunConfig,
    inputs: &'a Inputs,
    units: UnitSystem,
    quad: QuadratureSpec,
    workers: Option<usize>,
}

pub fn run(command: Command, cfg: &RunConfig, inputs: &Inputs, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let ctx = Context {
        cfg,
        inputs,
        units: cfg.unit_system()?,
        quad: cfg.quadrature.spec(),
        workers,
    };
    ctx.quad.validate()?;
    match command {
        Command::Bath => ctx.bath(),
        Command::Response => ctx.response(),
        Command::Correlate => ctx.correlate(),
        Command::Msd => ctx.msd(),
        Command::Spectrum => ctx.spectrum(),
        Command::FreeEnergy => ctx.free_energy(),
        Command::Josephson => ctx.josephson(),
        Command::Junction => ctx.junction(),
        Command::Detector => ctx.detector(),
        Command::Radiate => ctx.radiate(),
        Command::Simulate => ctx.simulate(),
    }
}

fn collect<T: Send>(xs: &[f64], f: impl Fn(f64) -> qle_core::Result<T> + Sync) -> Result<Vec<T>, CliError> {
    xs.par_iter().map(|&x| f(x)).collect::<qle_core::Result<Vec<T>>>().map_err(CliError::from)
}

impl Context<'_> {
    fn input(&self, key: &str) -> Result<&[u8], CliError> {
        self.inputs
            .get(key)
            .map(|v| v.as_slice())
            .ok_or_else(|| CliError::config(key, "this command needs an input file"))
    }

    fn state(&self) -> Result<ThermalState, CliError> {
        Ok(ThermalState::new(self.cfg.thermal.temperature)?)
    }

    fn system(&self) -> Result<SystemConfig, CliError> {
        let s = &self.cfg.system;
        Ok(match (s.stiffness, s.omega0) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("system.omega0", "give either stiffness or omega0, not both"))
            }
            (Some(k), None) => SystemConfig::new(s.mass, k, self.units)?,
            (None, Some(w)) => SystemConfig::oscillator(s.mass, w, self.units)?,
            (None, None) => SystemConfig::free(s.mass, self.units)?,
        })
    }

    fn bath_model(&self) -> Result<BathModel, CliError> {
        let b = &self.cfg.bath;
        Ok(match b.model {
            BathKind::Ohmic => BathModel::ohmic(b.zeta)?,
            BathKind::SingleRelaxation => {
                let wr = b
                    .omega_r
                    .ok_or_else(|| CliError::config("bath.omega_r", "required for single-relaxation"))?;
                BathModel::single_relaxation(b.zeta, wr)?
            }
            BathKind::Blackbody => {
                let cutoff = b
                    .cutoff
                    .ok_or_else(|| CliError::config("bath.cutoff", "required for blackbody"))?;
                BathModel::blackbody(self.cfg.system.mass, cutoff, &self.units)?
            }
            BathKind::Tabulated => {
                let table = read_spectral_distribution(self.input("bath.table")?)?;
                BathModel::tabulated(table)?
            }
        })
    }

    fn response_function(&self) -> Result<ResponseFunction, CliError> {
        Ok(ResponseFunction::new(self.system()?, self.bath_model()?)?.with_quadrature(self.quad)?)
    }

    fn correlation<'r>(&self, resp: &'r ResponseFunction) -> Result<CorrelationRequest<'r>, CliError> {
        Ok(CorrelationRequest::new(resp, self.state()?)
            .with_regime(self.cfg.thermal.regime)
            .with_quadrature(self.quad))
    }

    fn bath(&self) -> Result<Artifacts, CliError> {
        let bath = self.bath_model()?;
        let grid = self.cfg.grid.values()?;
        let rows = collect(&grid, |w| {
            let mu = bath.memory_fourier(Complex64::new(w, 0.0))?;
            Ok(vec![w, bath.spectral_distribution(w)?, mu.re, mu.im])
        })?;
        Ok(Artifacts::table("bath", &["omega", "spectral_distribution", "re_mu", "im_mu"], rows))
    }

    fn response(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let grid = self.cfg.grid.values()?;
        Ok(match self.cfg.response.quantity {
            ResponseQuantity::Susceptibility => {
                let rows = collect(&grid, |w| {
                    let a = resp.susceptibility(w)?;
                    Ok(vec![w, a.re, a.im, resp.dissipative_form(w)?])
                })?;
                Artifacts::table("response", &["omega", "re_alpha", "im_alpha", "dissipative_form"], rows)
            }
            ResponseQuantity::Green => {
                let rows = collect(&grid, |t| Ok(vec![t, resp.green_function(t)?]))?;
                Artifacts::table("response", &["t", "green"], rows)
            }
        })
    }

    fn correlate(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let req = self.correlation(&resp)?;
        let grid = self.cfg.grid.values()?;
        let rows = collect(&grid, |t| {
            let q = req.position_autocorrelation_via(CorrelationPath::Dissipation, t)?;
            Ok(vec![t, q.value, q.error_estimate])
        })?;
        Ok(Artifacts::table("correlate", &["t", "correlation", "error_estimate"], rows))
    }

    fn msd(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let req = self.correlation(&resp)?;
        let grid = self.cfg.grid.values()?;
        let closed = match (resp.bath(), resp.system().is_free(), self.cfg.thermal.regime) {
            (BathModel::Ohmic { zeta }, true, Regime::Classical) => {
                let m = resp.system().mass;
                Some((self.state()?.energy(&self.units), m, zeta / m))
            }
            _ => None,
        };
        let rows = collect(&grid, |t| {
            let q = req.mean_square_displacement_full(t)?;
            let mut row = vec![t, q.value.max(0.0), q.error_estimate];
            if let Some((kt, m, gamma)) = closed {
                row.push(classical_free_msd(kt, m, gamma, t));
            }
            Ok(row)
        })?;
        let mut columns = vec!["t", "msd", "error_estimate"];
        if closed.is_some() {
            columns.push("closed_form");
        }
        Ok(Artifacts::table("msd", &columns, rows))
    }

    fn spectrum(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let req = self.correlation(&resp)?;
        let grid = self.cfg.grid.values()?;
        let rows = collect(&grid, |w| Ok(vec![w, req.power_spectrum(w)?]))?;
        Ok(Artifacts::table("spectrum", &["omega", "power_spectrum"], rows))
    }

    fn free_energy(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let req = FreeEnergyRequest::new(&resp, self.state()?).with_quadrature(self.quad);
        let temps = self.cfg.grid.values()?;
        let rows = thermo_sweep(&req, &temps)?
            .into_iter()
            .map(|p| vec![p.temperature, p.free_energy, p.energy, p.entropy])
            .collect();
        Ok(Artifacts::table(
            "free-energy",
            &["temperature", "free_energy", "energy", "entropy"],
            rows,
        ))
    }

    fn josephson(&self) -> Result<Artifacts, CliError> {
        let j = &self.cfg.josephson;
        let junction = if j.practical {
            JosephsonJunction::from_practical(j.capacitance, j.resistance, j.bias, j.critical)?
        } else {
            JosephsonJunction::new(j.capacitance, j.resistance, j.bias, j.critical, self.units)?
        };
        let state = self.state()?;
        let w0 = junction.omega0()?;
        let full = josephson_phase_variance(&junction, &state, &self.quad)?;
        let weak = josephson_phase_variance_weak(&junction, &state)?;
        Ok(Artifacts::table(
            "josephson",
            &["omega0", "gamma", "phase_variance", "phase_variance_weak"],
            vec![vec![w0, junction.gamma(), full, weak]],
        ))
    }

    fn junction(&self) -> Result<Artifacts, CliError> {
        let j = &self.cfg.junction;
        let (tj, units, c) = match (self.inputs.get("junction.impedance"), j.practical) {
            (Some(bytes), true) => {
                let z = read_impedance(bytes.as_slice())?;
                let c = j.capacitance * PRACTICAL.farad_to_cm;
                (TunnelJunction::from_practical(j.capacitance, &z)?, UnitSystem::gaussian_cgs(), c)
            }
            (Some(bytes), false) => {
                let z = read_impedance(bytes.as_slice())?;
                (TunnelJunction::new(j.capacitance, &z, self.units)?, self.units, j.capacitance)
            }
            (None, practical) => {
                let (c, r, units) = if practical {
                    (
                        j.capacitance * PRACTICAL.farad_to_cm,
                        j.resistance * PRACTICAL.ohm_to_s_per_cm,
                        UnitSystem::gaussian_cgs(),
                    )
                } else {
                    (j.capacitance, j.resistance, self.units)
                };
                let omega_max = j.omega_max.unwrap_or(1e3 / (r * c));
                (TunnelJunction::resistor(c, r, omega_max, units)?, units, c)
            }
        };
        let state = self.state()?;
        let q2 = junction_charge_variance(&tj, &state, &self.quad)?;
        Ok(Artifacts::table(
            "junction",
            &["omega_max", "charge_variance", "classical_limit"],
            vec![vec![tj.omega_max(), q2, c * state.energy(&units)]],
        ))
    }

    fn detector(&self) -> Result<Artifacts, CliError> {
        let resp = self.response_function()?;
        let grid = self.cfg.grid.values()?;
        let noise = detector_noise(&resp, &self.state()?, &grid)?;
        let p = noise.spectrum.real_values()?;
        let rows = grid.iter().zip(p).map(|(&w, &v)| vec![w, v]).collect();
        Ok(Artifacts::table("detector", &["omega", "power_spectrum"], rows)
            .scalar("variance", noise.variance)
            .scalar("spectrum_integral", noise.spectrum_integral)
            .scalar("relative_mismatch", noise.relative_mismatch()))
    }

    fn radiate(&self) -> Result<Artifacts, CliError> {
        let force = read_force(self.input("radiate.force")?)?;
        let r = &self.cfg.radiate;
        let traj = nonrunaway_trajectory(self.cfg.system.mass, &force, &self.units, r.x0, r.v0)?;
        let x = traj.position.real_values()?;
        let v = traj.velocity.real_values()?;
        let rows = force
            .abscissae
            .iter()
            .zip(x.iter().zip(v))
            .map(|(&t, (&x, &v))| vec![t, x, v])
            .collect();
        Ok(Artifacts::table("radiate", &["t", "position", "velocity"], rows).scalar("tau_e", traj.tau_e))
    }

    fn simulate(&self) -> Result<Artifacts, CliError> {
        let s = &self.cfg.simulate;
        let initial = match s.initial {
            Initial::Equilibrium => InitialCondition::Equilibrium { x0: s.x0 },
            Initial::Fixed => InitialCondition::Fixed { x0: s.x0, v0: s.v0 },
        };
        let mut plan = SimulationPlan::new(
            self.system()?,
            self.bath_model()?,
            self.state()?,
            s.dt,
            s.steps,
            s.paths,
            self.cfg.seed,
        )
        .with_scheme(s.scheme)
        .with_initial(initial)
        .with_record_stride(s.record_stride);
        if let Some(w) = self.workers {
            plan = plan.with_workers(w);
        }
        plan.validate()?;
        let ens = integrate_langevin(&plan)?;
        let msd = ensemble_msd(&ens)?;
        let rows = (0..msd.t.len())
            .map(|i| vec![msd.t[i], msd.mean[i], msd.standard_error[i]])
            .collect();
        let mut out = Artifacts::table("simulate", &["t", "msd", "standard_error"], rows);
        if let (BathModel::Ohmic { zeta }, true) = (&plan.bath, plan.system.is_free()) {
            if let Ok(d) = fit_diffusion_shape(&msd, zeta / plan.system.mass) {
                out = out.scalar("diffusion_fit", d);
            }
        }
        if s.dump {
            let mut bytes = Vec::new();
            write_path_dump(&ens, &mut bytes)?;
            out.binaries.push(("paths.bin".to_string(), bytes));
        }
        Ok(out)
    }
}
