//! Classical Monte Carlo: colored noise, Langevin trajectories and ensemble
//! statistics.

mod dump;
mod langevin;
mod noise;
mod stats;

pub use dump::{read_path_dump, write_path_dump, MAGIC};
pub use langevin::{
    integrate_langevin, InitialCondition, PathProvenance, Scheme, SimulationPlan, TrajectoryEnsemble,
};
pub use noise::{
    force_covariance, generate_colored_noise, generate_colored_noise_with, CirculantSampler, EmbeddingPolicy,
};
pub use stats::{
    ensemble_msd, ensemble_position_variance, ensemble_velocity_variance, fit_diffusion_shape,
    fit_diffusion_slope, jackknife_mean, time_average, EnsembleEstimate, MIN_PATHS,
};
