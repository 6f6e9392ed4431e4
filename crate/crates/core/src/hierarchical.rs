//! Three-level prior for location-scale mixtures: Gaussian locations and
//! half-uniform/half-inverse scales sharing the hyperparameter `ζ0`, the
//! conditional Jeffreys prior on the weights, and `1/ζ0` on the top level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::IntegratorConfig;
use crate::jeffreys::log_jeffreys_weights;
use crate::mixture::MixtureParams;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalHyper {
    pub mu0: f64,
    /// Standard deviation of the location level and break point of the scale level.
    pub zeta0: f64,
}

impl HierarchicalHyper {
    pub fn new(mu0: f64, zeta0: f64) -> Result<Self> {
        let h = Self { mu0, zeta0 };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta0 > 0.0 && self.zeta0.is_finite()) || !self.mu0.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "hyperparameters need finite mu0 and zeta0 > 0, got ({}, {})",
                self.mu0, self.zeta0
            )));
        }
        Ok(())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

/// `1/(2ζ0)` on `(0, ζ0]` and `ζ0/(2σ²)` above; each half carries mass ½.
pub fn log_sigma_prior(sigma: f64, zeta0: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_positive("zeta0", zeta0)?;
    Ok(if sigma <= zeta0 {
        -(2.0 * zeta0).ln()
    } else {
        zeta0.ln() - (2.0 * sigma * sigma).ln()
    })
}

/// `ln N(μ; μ0, ζ0²)`.
pub fn log_mu_prior(mu: f64, mu0: f64, zeta0: f64) -> Result<f64> {
    check_positive("zeta0", zeta0)?;
    let z = (mu - mu0) / zeta0;
    Ok(-LN_SQRT_2PI - zeta0.ln() - 0.5 * z * z)
}

/// `-ln ζ0`; flat in `μ0`.
pub fn log_hyperprior(_mu0: f64, zeta0: f64) -> Result<f64> {
    check_positive("zeta0", zeta0)?;
    Ok(-zeta0.ln())
}

/// Location and scale levels summed over components.
pub fn log_component_levels(params: &MixtureParams, hyper: &HierarchicalHyper) -> Result<f64> {
    let mut total = 0.0;
    for (&m, &s) in params.locations.iter().zip(&params.scales) {
        total += log_mu_prior(m, hyper.mu0, hyper.zeta0)? + log_sigma_prior(s, hyper.zeta0)?;
    }
    Ok(total)
}

/// Full log prior: component levels, conditional Jeffreys weights term
/// (unnormalized) and hyperprior.
pub fn log_hier_prior(
    params: &MixtureParams,
    hyper: &HierarchicalHyper,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    params.validate()?;
    hyper.validate()?;
    let weights = log_jeffreys_weights(&params.weights, params, cfg)?.value;
    Ok(log_component_levels(params, hyper)? + weights + log_hyperprior(hyper.mu0, hyper.zeta0)?)
}
