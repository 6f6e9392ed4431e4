//! Mixture families, parameter containers and likelihood evaluation.

mod dataset;
mod family;
mod likelihood;
mod params;
mod reparam;
mod simulate;

pub use dataset::{sidecar_path, Dataset, DatasetMeta, Transform};
pub use family::ComponentFamily;
pub use likelihood::{
    brute_force_log_likelihood, complete_log_likelihood, log_density, log_likelihood, log_sum_exp,
    BRUTE_FORCE_LIMIT,
};
pub use params::{AllocationVector, MixtureParams, SIMPLEX_TOL};
pub use reparam::{from_reparam, natural_jacobian, to_reparam, ReparamParams};
pub use simulate::simulate;

pub(crate) use dataset::quantile_sorted;
pub(crate) use likelihood::log_density_unchecked;
pub(crate) use simulate::draw;
