//! Classical Langevin trajectories: `m ẍ = -Kx - ∫ μ(t-s) ẋ(s) ds + F(t)`.
//!
//! Ohmic baths give a two-variable SDE. The single-relaxation kernel
//! `ζΩ_r e^{-Ω_r t}` is carried by an auxiliary force `u` with
//! `du = -Ω_r u dt - ζΩ_r v dt + Ω_r √(2ζkT) dW`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::response::SystemConfig;
use crate::units::ThermalState;

const OVERFLOW_GUARD: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    EulerMaruyama,
    /// Stochastic Heun; strong order one for additive noise.
    StrongOrder1,
}

/// Starting point of every path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    Fixed { x0: f64, v0: f64 },
    /// Velocity (and, for a bound particle, position) drawn from the Gibbs
    /// distribution; `x0` is used for a free particle.
    Equilibrium { x0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub system: SystemConfig,
    pub bath: BathModel,
    pub state: ThermalState,
    pub dt: f64,
    pub steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub initial: InitialCondition,
    /// Keep every `record_stride`-th step.
    pub record_stride: usize,
    /// Thread cap; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SimulationPlan {
    pub fn new(system: SystemConfig, bath: BathModel, state: ThermalState, dt: f64, steps: usize, n_paths: usize, seed: u64) -> Self {
        SimulationPlan {
            system,
            bath,
            state,
            dt,
            steps,
            n_paths,
            seed,
            scheme: Scheme::StrongOrder1,
            initial: InitialCondition::Equilibrium { x0: 0.0 },
            record_stride: 1,
            workers: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Fastest rate in the problem: `γ`, `ω₀`, `Ω_r`.
    pub fn fastest_rate(&self) -> f64 {
        let m = self.system.mass;
        let mut r = self.system.omega0();
        match self.bath {
            BathModel::Ohmic { zeta } => r = r.max(zeta / m),
            BathModel::SingleRelaxation { zeta, omega_r } => {
                r = r.max(omega_r).max((zeta * omega_r / m).sqrt()).max(zeta / m)
            }
            _ => {}
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        self.system.units.validate()?;
        if !matches!(self.bath, BathModel::Ohmic { .. } | BathModel::SingleRelaxation { .. }) {
            return Err(Error::Unsupported(format!(
                "trajectory simulation supports ohmic and single-relaxation baths, not {}",
                self.bath.kind()
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Validation(format!("dt must be > 0, got {}", self.dt)));
        }
        let r = self.fastest_rate();
        if self.dt * r >= 0.1 {
            return Err(Error::Validation(format!(
                "dt = {} is too coarse: dt * max rate = {} must be < 0.1",
                self.dt,
                self.dt * r
            )));
        }
        if self.steps == 0 || self.n_paths == 0 {
            return Err(Error::Validation("steps and n_paths must be positive".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Validation("record_stride must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Validation("workers must be positive".into()));
        }
        match self.initial {
            InitialCondition::Fixed { x0, v0 } if !(x0.is_finite() && v0.is_finite()) => {
                Err(Error::Validation("initial condition must be finite".into()))
            }
            InitialCondition::Equilibrium { x0 } if !x0.is_finite() => {
                Err(Error::Validation("initial position must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn recorded_times(&self) -> Vec<f64> {
        (0..=self.steps / self.record_stride)
            .map(|k| (k * self.record_stride) as f64 * self.dt)
            .collect()
    }
}

/// Which RNG stream produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathProvenance {
    pub path: usize,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub t_grid: Vec<f64>,
    /// `positions[path][k]`
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub provenance: Vec<PathProvenance>,
}

impl TrajectoryEnsemble {
    pub fn n_paths(&self) -> usize {
        self.positions.len()
    }

    pub fn n_points(&self) -> usize {
        self.t_grid.len()
    }
}

/// `dy = A y dt + b dW` in up to three variables `(x, v, u)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinearSde {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub dim: usize,
}

impl LinearSde {
    pub(crate) fn from_plan(plan: &SimulationPlan) -> Result<Self> {
        let m = plan.system.mass;
        let k = plan.system.stiffness;
        let kt = plan.state.energy(&plan.system.units);
        match plan.bath {
            BathModel::Ohmic { zeta } => Ok(LinearSde {
                a: [[0.0, 1.0, 0.0], [-k / m, -zeta / m, 0.0], [0.0; 3]],
                b: [0.0, (2.0 * zeta * kt).sqrt() / m, 0.0],
                dim: 2,
            }),
            BathModel::SingleRelaxation { zeta, omega_r } => Ok(LinearSde {
                a: [
                    [0.0, 1.0, 0.0],
                    [-k / m, 0.0, 1.0 / m],
                    [0.0, -zeta * omega_r, -omega_r],
                ],
                b: [0.0, 0.0, omega_r * (2.0 * zeta * kt).sqrt()],
                dim: 3,
            }),
            _ => Err(Error::Unsupported("no Markovian embedding for this bath".into())),
        }
    }

    fn drift(&self, y: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.a[i][j] * y[j];
            }
        }
        out
    }

    /// One step with Wiener increment `dw`.
    pub(crate) fn step(&self, scheme: Scheme, y: &mut [f64; 3], dt: f64, dw: f64) {
        let f0 = self.drift(y);
        match scheme {
            Scheme::EulerMaruyama => {
                for i in 0..self.dim {
                    y[i] += f0[i] * dt + self.b[i] * dw;
                }
            }
            Scheme::StrongOrder1 => {
                let mut pred = *y;
                for i in 0..self.dim {
                    pred[i] += f0[i] * dt + self.b[i] * dw;
                }
                let f1 = self.drift(&pred);
                for i in 0..self.dim {
                    y[i] += 0.5 * (f0[i] + f1[i]) * dt + self.b[i] * dw;
                }
            }
        }
    }
}

fn initial_state(plan: &SimulationPlan, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let m = plan.system.mass;
    let k = plan.system.stiffness;
    let kt = plan.state.energy(&plan.system.units);
    match plan.initial {
        InitialCondition::Fixed { x0, v0 } => [x0, v0, 0.0],
        InitialCondition::Equilibrium { x0 } => {
            let mut g = || -> f64 { StandardNormal.sample(rng) };
            let v = (kt / m).sqrt() * g();
            let x = if k > 0.0 { (kt / k).sqrt() * g() } else { x0 };
            let u = match plan.bath {
                BathModel::SingleRelaxation { zeta, omega_r } => (kt * zeta * omega_r).sqrt() * g(),
                _ => 0.0,
            };
            [x, v, u]
        }
    }
}

pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

struct PathRecord {
    x: Vec<f64>,
    v: Vec<f64>,
}

fn run_path(plan: &SimulationPlan, sde: &LinearSde, path: usize) -> Result<PathRecord> {
    let mut rng = path_rng(plan.seed, path);
    let mut y = initial_state(plan, &mut rng);
    let n_rec = plan.steps / plan.record_stride + 1;
    let mut x = Vec::with_capacity(n_rec);
    let mut v = Vec::with_capacity(n_rec);
    x.push(y[0]);
    v.push(y[1]);
    let sq = plan.dt.sqrt();
    for step in 1..=plan.steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        sde.step(plan.scheme, &mut y, plan.dt, sq * z);
        if step % plan.record_stride == 0 {
            if !y[..sde.dim].iter().all(|c| c.is_finite() && c.abs() < OVERFLOW_GUARD) {
                return Err(Error::BlowUp { path, step });
            }
            x.push(y[0]);
            v.push(y[1]);
        }
    }
    if !y[..sde.dim].iter().all(|c| c.is_finite() && c.abs() < OVERFLOW_GUARD) {
        return Err(Error::BlowUp { path, step: plan.steps });
    }
    Ok(PathRecord { x, v })
}

/// Integrates `n_paths` independent trajectories. Path `p` draws from stream
/// `p` of a ChaCha8 generator seeded with `plan.seed`, so results do not
/// depend on the number of workers.
pub fn integrate_langevin(plan: &SimulationPlan) -> Result<TrajectoryEnsemble> {
    plan.validate()?;
    let sde = LinearSde::from_plan(plan)?;
    let work = || -> Result<Vec<PathRecord>> {
        (0..plan.n_paths)
            .into_par_iter()
            .map(|p| run_path(plan, &sde, p))
            .collect()
    };
    let records = match plan.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Validation(format!("cannot build thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut positions = Vec::with_capacity(plan.n_paths);
    let mut velocities = Vec::with_capacity(plan.n_paths);
    for r in records {
        positions.push(r.x);
        velocities.push(r.v);
    }
    Ok(TrajectoryEnsemble {
        t_grid: plan.recorded_times(),
        positions,
        velocities,
        provenance: (0..plan.n_paths)
            .map(|p| PathProvenance {
                path: p,
                seed: plan.seed,
                stream: p as u64,
            })
            .collect(),
    })
}
