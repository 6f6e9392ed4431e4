//! Jeffreys-type priors for finite mixtures: Fisher information by
//! quadrature, prior evaluation, hierarchical priors and MCMC.

pub mod error;
pub mod experiments;
pub mod fisher;
pub mod hierarchical;
pub mod jeffreys;
pub mod mcmc;
pub mod mixture;
pub mod quadrature;

pub use error::{Error, Result};
