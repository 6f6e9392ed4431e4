use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{IntegratorConfig, Scenario};
use crate::mcmc::{McmcConfig, PriorMode};
use crate::mixture::{ComponentFamily, MixtureParams};

/// Version of every JSON document written by this module.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Two-component fits to standard normal samples.
    #[default]
    OverfitNull,
    /// Fits with increasing `k` to a two-component truth.
    OverfitK,
    WeightsPriorShape,
    Improperness,
    IntegratorBenchmark,
}

impl StudyKind {
    pub const ALL: [StudyKind; 5] = [
        StudyKind::OverfitNull,
        StudyKind::OverfitK,
        StudyKind::WeightsPriorShape,
        StudyKind::Improperness,
        StudyKind::IntegratorBenchmark,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::OverfitNull => "overfit-null",
            StudyKind::OverfitK => "overfit-k",
            StudyKind::WeightsPriorShape => "weights-prior-shape",
            StudyKind::Improperness => "improperness",
            StudyKind::IntegratorBenchmark => "integrator-benchmark",
        }
    }
}

impl std::fmt::Display for StudyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StudyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = StudyKind::ALL.iter().map(|k| k.name()).collect();
                Error::Argument(format!(
                    "unknown study {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Generative model and fitted `k` for one improperness scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImproperScenario {
    pub name: String,
    pub truth: MixtureParams,
    pub k: usize,
}

impl ImproperScenario {
    pub fn new(name: &str, weights: &[f64], locations: &[f64], k: usize) -> Self {
        Self {
            name: name.into(),
            truth: MixtureParams::gaussian(weights, locations, &vec![1.0; weights.len()])
                .expect("scenario parameters are valid"),
            k,
        }
    }

    /// Close and separated means for `k` in {2, 3}.
    pub fn defaults() -> Vec<Self> {
        let half = [0.5, 0.5];
        let third = [1.0 / 3.0; 3];
        vec![
            Self::new("close", &half, &[-1.0, 1.0], 2),
            Self::new("separated", &half, &[-5.0, 5.0], 2),
            Self::new("close", &third, &[-1.0, 0.0, 1.0], 3),
            Self::new("separated", &third, &[-5.0, 0.0, 5.0], 3),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpropernessConfig {
    pub sample_size: usize,
    pub replications: usize,
    pub prior_modes: Vec<PriorMode>,
    pub scenarios: Vec<ImproperScenario>,
}

impl Default for ImpropernessConfig {
    fn default() -> Self {
        Self {
            sample_size: 10,
            replications: 50,
            prior_modes: vec![
                PriorMode::FullJeffreys,
                PriorMode::CondSigmaProper,
                PriorMode::Hierarchical,
            ],
            scenarios: ImproperScenario::defaults(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub model: MixtureParams,
    pub scenario: Scenario,
    pub mc_samples: Vec<usize>,
    pub riemann_points: Vec<usize>,
    pub replications: usize,
    /// Tolerance of the Gauss–Kronrod reference.
    pub reference_rel_tol: f64,
}

impl BenchmarkConfig {
    /// 0.25 N(-10, 1) + 0.10 N(0, 5) + 0.65 N(15, 7).
    pub fn three_component_model() -> MixtureParams {
        MixtureParams::gaussian(&[0.25, 0.10, 0.65], &[-10.0, 0.0, 15.0], &[1.0, 5.0, 7.0])
            .expect("valid model")
    }
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            model: Self::three_component_model(),
            scenario: Scenario::weights_only(3),
            mc_samples: (500..=1700).step_by(200).collect(),
            riemann_points: vec![100, 250, 400, 550, 700, 850],
            replications: 100,
            reference_rel_tol: 1e-10,
        }
    }
}

/// A pair of components whose conditional weights prior is traced over `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub label: String,
    pub locations: [f64; 2],
    pub scales: [f64; 2],
    pub families: [ComponentFamily; 2],
}

impl ShapeSpec {
    pub fn new(
        label: &str,
        first: (ComponentFamily, f64, f64),
        second: (ComponentFamily, f64, f64),
    ) -> Self {
        Self {
            label: label.into(),
            locations: [first.1, second.1],
            scales: [first.2, second.2],
            families: [first.0, second.0],
        }
    }

    pub fn components(&self, p: f64) -> Result<MixtureParams> {
        MixtureParams::heterogeneous(
            vec![p, 1.0 - p],
            self.locations.to_vec(),
            self.scales.to_vec(),
            self.families.to_vec(),
        )
    }

    /// Gaussian against Student-t pairs, including a df sweep.
    pub fn defaults() -> Vec<Self> {
        let n = ComponentFamily::Gaussian;
        let t = |df: f64| ComponentFamily::StudentT { df };
        vec![
            Self::new("N(-10,1) vs N(10,1)", (n, -10.0, 1.0), (n, 10.0, 1.0)),
            Self::new("N(-10,1) vs t1(10,1)", (n, -10.0, 1.0), (t(1.0), 10.0, 1.0)),
            Self::new("N(-1,1) vs t1(1,1)", (n, -1.0, 1.0), (t(1.0), 1.0, 1.0)),
            Self::new(
                "N(-10,1) vs t1(10,10)",
                (n, -10.0, 1.0),
                (t(1.0), 10.0, 10.0),
            ),
            Self::new("N(-10,1) vs t5(10,1)", (n, -10.0, 1.0), (t(5.0), 10.0, 1.0)),
            Self::new(
                "N(-10,1) vs t30(10,1)",
                (n, -10.0, 1.0),
                (t(30.0), 10.0, 1.0),
            ),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeConfig {
    pub specs: Vec<ShapeSpec>,
    /// Midpoint grid on (0, 1).
    pub grid_points: usize,
    pub integrator: IntegratorConfig,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self {
            specs: ShapeSpec::defaults(),
            grid_points: 99,
            integrator: IntegratorConfig::gauss_kronrod(1e-8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub schema_version: u32,
    pub kind: StudyKind,
    pub sample_sizes: Vec<usize>,
    /// Replications `M` per cell.
    pub replications: usize,
    pub ks: Vec<usize>,
    pub mcmc: McmcConfig,
    pub output_dir: Option<PathBuf>,
    /// Master seed; every cell seed is derived from it.
    pub seed: u64,
    /// Points of the predictive-density grid.
    pub grid_points: usize,
    pub improperness: ImpropernessConfig,
    pub benchmark: BenchmarkConfig,
    pub shape: ShapeConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: StudyKind::default(),
            sample_sizes: vec![100, 1000],
            replications: 5,
            ks: vec![2],
            mcmc: McmcConfig::default(),
            output_dir: None,
            seed: 1,
            grid_points: 200,
            improperness: ImpropernessConfig::default(),
            benchmark: BenchmarkConfig::default(),
            shape: ShapeConfig::default(),
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Argument(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.replications == 0 {
            return Err(Error::Argument("replications must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(Error::Argument(
                "sample_sizes must be non-empty and every n at least 1".into(),
            ));
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::Argument(
                "ks must be non-empty and every k at least 1".into(),
            ));
        }
        if self.grid_points < 2 {
            return Err(Error::Argument("grid_points must be at least 2".into()));
        }
        self.mcmc.validate()?;
        let imp = &self.improperness;
        if imp.sample_size == 0 || imp.replications == 0 {
            return Err(Error::Argument(
                "improperness sample_size and replications must be at least 1".into(),
            ));
        }
        for s in &imp.scenarios {
            s.truth.validate()?;
            if s.k == 0 {
                return Err(Error::Argument(format!(
                    "scenario {}: k must be >= 1",
                    s.name
                )));
            }
        }
        let b = &self.benchmark;
        b.model.validate()?;
        if b.replications == 0 || b.mc_samples.contains(&0) || b.riemann_points.contains(&0) {
            return Err(Error::Argument(
                "benchmark sizes and replications must be at least 1".into(),
            ));
        }
        if self.shape.grid_points < 2 {
            return Err(Error::Argument(
                "shape grid_points must be at least 2".into(),
            ));
        }
        self.shape.integrator.validate()
    }
}
