//! Quantum Langevin equation toolkit: heat-bath models, response functions,
//! fluctuation-dissipation correlations, free energies and a classical Monte
//! Carlo cross-check.

pub mod bath;
pub mod applications;
pub mod correlations;
pub mod error;
pub mod interp;
pub mod io;
pub mod quadrature;
pub mod response;
pub mod sampled;
pub mod simulate;
pub mod thermo;
pub mod units;

pub use error::{Error, Result};
