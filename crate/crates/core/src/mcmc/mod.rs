//! Adaptive Metropolis-within-Gibbs sampling of mixture posteriors.

mod chain;
mod diagnostics;
mod kernels;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::IntegratorConfig;
use crate::hierarchical::HierarchicalHyper;

pub use chain::{
    log_posterior, log_prior, run_chain, BlockAcceptance, ChainTrace, DataSummary, Draw, ScaleSnapshot,
};
pub use diagnostics::{batch_means_se, diagnose, relabel, relabel_draw, DiagnosticsReport};
pub use kernels::{
    adapt_scales, log_truncation_mass, propose_weights, sample_truncated_normal, ADAPT_FACTOR,
    SCALE_FLOOR,
};

/// Prior placed on the mixture parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    /// Gaussian locations, half-uniform/half-inverse scales, conditional
    /// Jeffreys weights and `1/ζ0` on top.
    #[default]
    Hierarchical,
    /// Jeffreys prior on all parameters jointly.
    FullJeffreys,
    /// Jeffreys prior on `(p, μ, τ, δ)` for fixed scale ratios, with the
    /// proper prior ½U(0,1) + ½·1/U(0,1) on each ratio.
    CondSigmaProper,
}

impl std::str::FromStr for PriorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hierarchical" => Ok(PriorMode::Hierarchical),
            "full-jeffreys" => Ok(PriorMode::FullJeffreys),
            "cond-sigma-proper" => Ok(PriorMode::CondSigmaProper),
            _ => Err(Error::Argument(format!(
                "unknown prior {s:?}; expected hierarchical, full-jeffreys or cond-sigma-proper"
            ))),
        }
    }
}

impl std::fmt::Display for PriorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PriorMode::Hierarchical => "hierarchical",
            PriorMode::FullJeffreys => "full-jeffreys",
            PriorMode::CondSigmaProper => "cond-sigma-proper",
        })
    }
}

/// Thresholds for flagging stuck or diverging chains, relative to the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DivergenceThresholds {
    /// A scale below this multiple of the data SD counts as collapsed.
    pub sigma_stuck_rel: f64,
    /// Consecutive collapsed draws needed to flag a chain as stuck.
    pub stuck_run_length: usize,
    /// A location further than this multiple of the data range from the
    /// data midpoint counts as diverged.
    pub mu_diverge_mult: f64,
}

impl Default for DivergenceThresholds {
    fn default() -> Self {
        Self {
            sigma_stuck_rel: 1e-3,
            stuck_run_length: 500,
            mu_diverge_mult: 10.0,
        }
    }
}

impl DivergenceThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_stuck_rel > 0.0 && self.mu_diverge_mult > 0.0) || self.stuck_run_length == 0
        {
            return Err(Error::Argument(
                "divergence thresholds must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Starting proposal scales. Location-type scales default to a tenth of the
/// data SD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelScales {
    pub weights: f64,
    pub locations: Option<f64>,
    /// SD of the log-normal kernel on each σ.
    pub log_scales: f64,
    pub mu0: Option<f64>,
    pub log_zeta0: f64,
}

impl Default for KernelScales {
    fn default() -> Self {
        Self {
            weights: 0.05,
            locations: None,
            log_scales: 0.1,
            mu0: None,
            log_zeta0: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcConfig {
    /// Total iterations, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    /// Iterations between scale adaptations (burn-in only).
    pub adaptation_window: usize,
    pub target_acceptance: (f64, f64),
    pub initial_scales: KernelScales,
    pub prior_mode: PriorMode,
    pub thresholds: DivergenceThresholds,
    pub integrator: IntegratorConfig,
    /// Keep every `thin`-th post-burn-in draw.
    pub thin: usize,
    /// Hold the hyperparameters at these values instead of sampling them
    /// (hierarchical prior only).
    pub fixed_hyper: Option<HierarchicalHyper>,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            burn_in: 5_000,
            adaptation_window: 50,
            target_acceptance: (0.20, 0.40),
            initial_scales: KernelScales::default(),
            prior_mode: PriorMode::Hierarchical,
            thresholds: DivergenceThresholds::default(),
            integrator: IntegratorConfig::default(),
            thin: 1,
            fixed_hyper: None,
            seed: 1,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::Argument(format!(
                "need 0 <= burn_in < iterations, got burn_in={} iterations={}",
                self.burn_in, self.iterations
            )));
        }
        if self.adaptation_window == 0 || self.thin == 0 {
            return Err(Error::Argument(
                "adaptation window and thinning must be at least 1".into(),
            ));
        }
        let (lo, hi) = self.target_acceptance;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::Argument(format!(
                "target acceptance band ({lo}, {hi}) must satisfy 0 < lo < hi < 1"
            )));
        }
        let s = &self.initial_scales;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(s.weights) && positive(s.log_scales) && positive(s.log_zeta0))
            || s.locations.is_some_and(|v| !positive(v))
            || s.mu0.is_some_and(|v| !positive(v))
        {
            return Err(Error::Argument(
                "initial kernel scales must be positive".into(),
            ));
        }
        if let Some(h) = &self.fixed_hyper {
            h.validate()?;
        }
        self.thresholds.validate()?;
        self.integrator.validate()
    }
}

/// Seed of replication `index` under `master` (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(McmcConfig::default().validate().is_ok());
        let bad = McmcConfig {
            burn_in: 100,
            iterations: 100,
            ..McmcConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = McmcConfig {
            target_acceptance: (0.5, 0.4),
            ..McmcConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn prior_mode_names_round_trip() {
        for m in [
            PriorMode::Hierarchical,
            PriorMode::FullJeffreys,
            PriorMode::CondSigmaProper,
        ] {
            assert_eq!(m.to_string().parse::<PriorMode>().unwrap(), m);
        }
        assert!("flat".parse::<PriorMode>().is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), s.len());
        assert_eq!(derive_seed(7, 3), s[3]);
    }
}
