//! Reproducible studies: overfitting, dataset analyses, prior shapes,
//! improperness, integrator benchmarks and Bayes factors.

mod bayes;
mod config;
mod output;
mod studies;
mod summary;
pub mod svg;

pub use bayes::{
    bayes_factor, log_marginal_likelihood, BayesFactor, BridgeConfig, MarginalLikelihood, ModelSpec,
};
pub use config::{
    BenchmarkConfig, ImproperScenario, ImpropernessConfig, ShapeConfig, ShapeSpec, StudyConfig,
    StudyKind, SCHEMA_VERSION,
};
pub use output::{to_csv, to_json, write_artifacts, write_atomic, Artifacts, LongRow};
pub use studies::{
    dataset_analysis, improperness_study, integrator_benchmark, overfit_k_study, overfit_k_truth,
    overfit_null_study, run_study, shape_rows, shape_svg, weights_prior_shape_study, BenchRow,
    BenchmarkTable, DatasetAnalysis, ImproperCell, ImproperRow, ImpropernessTable, OverfitCell,
    OverfitTable, PriorCurve, StudyResult,
};
pub use summary::{
    data_grid, linear_grid, mixture_density, predictive_density, ComponentSummary, Moments,
    PosteriorSummary, PredictiveDensity, TailRow, CREDIBLE_LEVEL, DETECTION_THRESHOLD,
    DISPLAY_THRESHOLD,
};
