use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BenchmarkConfig, ImpropernessConfig, ShapeConfig, StudyConfig, StudyKind};
use super::output::LongRow;
use super::summary::{
    data_grid, linear_grid, mixture_density, predictive_density, PosteriorSummary,
    PredictiveDensity,
};
use super::svg::{box_chart, line_chart, Band, Series};
use crate::error::Result;
use crate::fisher::{fim, IntegratorConfig, Method};
use crate::jeffreys::log_jeffreys_weights;
use crate::mcmc::{derive_seed, run_chain, DiagnosticsReport, McmcConfig, PriorMode};
use crate::mixture::{simulate, ComponentFamily, Dataset, MixtureParams};

/// Seeds of one replication: the data seed depends on `(n, replication)`
/// only, the chain seed also on `k`.
fn cell_seeds(master: u64, n: usize, k: usize, replication: usize) -> (u64, u64) {
    let base = derive_seed(master, n as u64);
    let data = derive_seed(base, 2 * replication as u64);
    (data, derive_seed(data, k as u64))
}

/// One fitted replication of an overfitting study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfitCell {
    pub n: usize,
    pub k: usize,
    pub replication: usize,
    pub data_seed: u64,
    pub chain_seed: u64,
    /// Posterior-mean weights of the relabelled chain, largest first. Empty
    /// when the chain failed.
    pub weights: Vec<f64>,
    pub report: Option<DiagnosticsReport>,
    pub predictive: Option<PredictiveDensity>,
    /// L1 distance between the predictive mean and the true density.
    pub l1_to_truth: Option<f64>,
    pub error: Option<String>,
}

impl OverfitCell {
    pub fn max_weight(&self) -> Option<f64> {
        self.weights.first().copied()
    }

    /// Sum of the `m` smallest posterior-mean weights.
    pub fn smallest_sum(&self, m: usize) -> Option<f64> {
        (!self.weights.is_empty()).then(|| self.weights.iter().rev().take(m).sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfitTable {
    pub study: StudyKind,
    pub truth: MixtureParams,
    pub cells: Vec<OverfitCell>,
}

fn median(v: &mut [f64]) -> f64 {
    quantile(v, 0.5)
}

fn quantile(v: &mut [f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    crate::mixture::quantile_sorted(v, q)
}

impl OverfitTable {
    pub fn cells_for(&self, n: usize, k: usize) -> impl Iterator<Item = &OverfitCell> {
        self.cells.iter().filter(move |c| c.n == n && c.k == k)
    }

    pub fn max_weights(&self, n: usize, k: usize) -> Vec<f64> {
        self.cells_for(n, k)
            .filter_map(|c| c.max_weight())
            .collect()
    }

    pub fn median_max_weight(&self, n: usize, k: usize) -> f64 {
        median(&mut self.max_weights(n, k))
    }

    pub fn max_weight_iqr(&self, n: usize, k: usize) -> f64 {
        let mut v = self.max_weights(n, k);
        quantile(&mut v, 0.75) - quantile(&mut v, 0.25)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        let study = self.study.name();
        let mut rows = Vec::new();
        for c in &self.cells {
            for (l, w) in c.weights.iter().enumerate() {
                rows.push(
                    LongRow::new(study, "weight", *w)
                        .cell(c.n, c.k, c.replication)
                        .component(l + 1),
                );
            }
            if let Some(d) = c.l1_to_truth {
                rows.push(LongRow::new(study, "l1_to_truth", d).cell(c.n, c.k, c.replication));
            }
        }
        rows
    }

    /// Box plots of the largest posterior-mean weight per `(n, k)`.
    pub fn svg(&self) -> String {
        let mut keys: Vec<(usize, usize)> = self.cells.iter().map(|c| (c.k, c.n)).collect();
        keys.sort_unstable();
        keys.dedup();
        let multi_k = keys.iter().any(|&(k, _)| k != keys[0].0);
        let groups: Vec<(String, Vec<f64>)> = keys
            .iter()
            .map(|&(k, n)| {
                let label = if multi_k {
                    format!("k={k} n={n}")
                } else {
                    format!("n={n}")
                };
                (label, self.max_weights(n, k))
            })
            .collect();
        box_chart(
            &format!("{}: largest posterior-mean weight", self.study),
            "weight",
            &groups,
        )
    }
}

fn fit_cell(
    truth: &MixtureParams,
    n: usize,
    k: usize,
    replication: usize,
    master: u64,
    mcmc: &McmcConfig,
    grid: Option<&[f64]>,
) -> OverfitCell {
    let (data_seed, chain_seed) = cell_seeds(master, n, k, replication);
    let mut cell = OverfitCell {
        n,
        k,
        replication,
        data_seed,
        chain_seed,
        weights: Vec::new(),
        report: None,
        predictive: None,
        l1_to_truth: None,
        error: None,
    };
    let cfg = McmcConfig {
        seed: chain_seed,
        ..mcmc.clone()
    };
    let run = simulate(n, truth, data_seed)
        .and_then(|data| run_chain(&data, k, truth.family, &cfg))
        .and_then(|trace| {
            let summary = PosteriorSummary::from_trace(&trace)?;
            let predictive = grid.map(|g| predictive_density(&trace, g)).transpose()?;
            Ok((trace.report, summary, predictive))
        });
    match run {
        Ok((report, summary, predictive)) => {
            cell.weights = summary.mean_weights();
            cell.report = Some(report);
            cell.l1_to_truth = predictive
                .as_ref()
                .map(|p| p.l1_distance(|x| mixture_density(truth, x)));
            cell.predictive = predictive;
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

fn overfit_table(
    cfg: &StudyConfig,
    study: StudyKind,
    truth: MixtureParams,
    ks: &[usize],
    grid: Option<Vec<f64>>,
) -> Result<OverfitTable> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize, usize)> = cfg
        .sample_sizes
        .iter()
        .flat_map(|&n| {
            ks.iter()
                .flat_map(move |&k| (0..cfg.replications).map(move |r| (n, k, r)))
        })
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(n, k, r)| fit_cell(&truth, n, k, r, cfg.seed, &cfg.mcmc, grid.as_deref()))
        .collect();
    Ok(OverfitTable {
        study,
        truth,
        cells,
    })
}

/// Standard normal data fitted with `k = 2` under the hierarchical prior.
pub fn overfit_null_study(cfg: &StudyConfig) -> Result<OverfitTable> {
    let truth = MixtureParams::gaussian(&[1.0], &[0.0], &[1.0])?;
    let mcmc = McmcConfig {
        prior_mode: PriorMode::Hierarchical,
        ..cfg.mcmc.clone()
    };
    let cfg = StudyConfig {
        mcmc,
        ..cfg.clone()
    };
    overfit_table(&cfg, StudyKind::OverfitNull, truth, &[2], None)
}

/// The two-component truth of the `k` study: 0.5 N(-3, 1) + 0.5 N(3, 1).
pub fn overfit_k_truth() -> MixtureParams {
    MixtureParams::gaussian(&[0.5, 0.5], &[-3.0, 3.0], &[1.0, 1.0]).expect("valid truth")
}

/// Fits every `k` in `cfg.ks` to the same data sets from
/// [`overfit_k_truth`], with predictive densities on `[-8, 8]`.
pub fn overfit_k_study(cfg: &StudyConfig) -> Result<OverfitTable> {
    let grid = linear_grid(-8.0, 8.0, cfg.grid_points);
    overfit_table(
        cfg,
        StudyKind::OverfitK,
        overfit_k_truth(),
        &cfg.ks,
        Some(grid),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetAnalysis {
    pub dataset: String,
    pub n: usize,
    pub k: usize,
    pub family: ComponentFamily,
    pub prior_mode: PriorMode,
    pub seed: u64,
    pub detected: usize,
    pub summary: PosteriorSummary,
    pub predictive: PredictiveDensity,
    pub report: DiagnosticsReport,
}

impl DatasetAnalysis {
    pub fn long_rows(&self) -> Vec<LongRow> {
        let study = format!("analysis:{}", self.dataset);
        let mut rows = Vec::new();
        for (l, c) in self.summary.components.iter().enumerate() {
            for (name, m) in [
                ("weight", c.weight),
                ("location", c.location),
                ("scale", c.scale),
            ] {
                for (stat, v) in [
                    ("mean", m.mean),
                    ("sd", m.sd),
                    ("lower", m.lower),
                    ("upper", m.upper),
                ] {
                    let mut r = LongRow::new(&study, format!("{name}_{stat}"), v).component(l + 1);
                    r.n = Some(self.n);
                    r.k = Some(self.k);
                    rows.push(r);
                }
            }
        }
        rows
    }

    pub fn svg(&self) -> String {
        let p = &self.predictive;
        line_chart(
            &format!("{}: predictive density (k={})", self.dataset, self.k),
            "x",
            "density",
            &[Series {
                label: "posterior mean",
                x: &p.grid,
                y: &p.mean,
            }],
            Some(Band {
                x: &p.grid,
                lower: &p.lower,
                upper: &p.upper,
            }),
        )
    }

    /// Table rows: displayed components, then the folded tail.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{} (n={}, k={}, {}): {} components with weight > 0.02\n",
            self.dataset,
            self.n,
            self.k,
            self.family.name(),
            self.detected
        );
        out.push_str("  weight (sd)        location (sd)      sigma (sd)\n");
        for c in self.summary.displayed() {
            out.push_str(&format!(
                "  {:.3} ({:.3})      {:8.3} ({:.3})   {:.3} ({:.3})\n",
                c.weight.mean,
                c.weight.sd,
                c.location.mean,
                c.location.sd,
                c.scale.mean,
                c.scale.sd
            ));
        }
        if let Some(t) = self.summary.tail() {
            out.push_str(&format!(
                "  {:.3}  remaining {} components\n",
                t.weight, t.components
            ));
        }
        out
    }
}

/// Fit a `k`-component mixture to `data` and summarize it.
pub fn dataset_analysis(
    data: &Dataset,
    k: usize,
    family: ComponentFamily,
    cfg: &McmcConfig,
    grid_points: usize,
) -> Result<DatasetAnalysis> {
    let trace = run_chain(data, k, family, cfg)?;
    let summary = PosteriorSummary::from_trace(&trace)?;
    let predictive = predictive_density(&trace, &data_grid(&trace, grid_points))?;
    Ok(DatasetAnalysis {
        dataset: data.name.clone(),
        n: data.len(),
        k,
        family,
        prior_mode: cfg.prior_mode,
        seed: cfg.seed,
        detected: summary.detected(),
        summary,
        predictive,
        report: trace.report,
    })
}

/// Conditional weights prior of one component pair, normalized on its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorCurve {
    pub label: String,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl PriorCurve {
    fn step(&self) -> f64 {
        1.0 / self.grid.len() as f64
    }

    pub fn mass_above_half(&self) -> f64 {
        let h = self.step();
        self.grid
            .iter()
            .zip(&self.density)
            .map(|(&p, &d)| {
                if p > 0.5 {
                    d * h
                } else if p == 0.5 {
                    0.5 * d * h
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `|mass above ½ − mass below ½|`.
    pub fn asymmetry(&self) -> f64 {
        (2.0 * self.mass_above_half() - 1.0).abs()
    }

    /// Largest relative gap between the curve at `p` and at `1 - p`.
    pub fn max_reflection_error(&self) -> f64 {
        let n = self.density.len();
        (0..n)
            .map(|i| {
                let a = self.density[i];
                let b = self.density[n - 1 - i];
                (a - b).abs() / a.abs().max(b.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Grid-normalized conditional Jeffreys priors of the first weight for
/// two-component specs, on the midpoint grid of `(0, 1)`.
pub fn weights_prior_shape_study(cfg: &ShapeConfig) -> Result<Vec<PriorCurve>> {
    let h = 1.0 / cfg.grid_points as f64;
    let grid: Vec<f64> = (0..cfg.grid_points).map(|i| (i as f64 + 0.5) * h).collect();
    cfg.specs
        .iter()
        .map(|spec| {
            let log: Vec<f64> = grid
                .par_iter()
                .map(|&p| {
                    let comps = spec.components(p)?;
                    log_jeffreys_weights(&comps.weights, &comps, &cfg.integrator).map(|v| v.value)
                })
                .collect::<Result<_>>()?;
            let top = log.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let raw: Vec<f64> = log.iter().map(|v| (v - top).exp()).collect();
            let z = raw.iter().sum::<f64>() * h;
            Ok(PriorCurve {
                label: spec.label.clone(),
                grid: grid.clone(),
                density: raw.iter().map(|v| v / z).collect(),
            })
        })
        .collect()
}

pub fn shape_rows(curves: &[PriorCurve]) -> Vec<LongRow> {
    let mut rows = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        for (&p, &d) in c.grid.iter().zip(&c.density) {
            let mut r = LongRow::new(
                StudyKind::WeightsPriorShape.name(),
                format!("density[{}]@{p:.6}", c.label),
                d,
            );
            r.component = Some(i + 1);
            rows.push(r);
        }
    }
    rows
}

pub fn shape_svg(curves: &[PriorCurve]) -> String {
    let series: Vec<Series> = curves
        .iter()
        .map(|c| Series {
            label: &c.label,
            x: &c.grid,
            y: &c.density,
        })
        .collect();
    line_chart("conditional weights prior", "p", "density", &series, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImproperCell {
    pub prior_mode: PriorMode,
    pub scenario: String,
    pub k: usize,
    pub replication: usize,
    pub seed: u64,
    pub stuck: bool,
    pub diverged: bool,
    pub longest_collapsed_run: usize,
    pub max_location_excursion: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImproperRow {
    pub prior_mode: PriorMode,
    pub scenario: String,
    pub k: usize,
    pub n: usize,
    pub replications: usize,
    pub failed: usize,
    pub stuck: f64,
    pub diverged: f64,
    pub stuck_or_diverged: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpropernessTable {
    pub rows: Vec<ImproperRow>,
    pub cells: Vec<ImproperCell>,
}

impl ImpropernessTable {
    pub fn row(&self, mode: PriorMode, scenario: &str, k: usize) -> Option<&ImproperRow> {
        self.rows
            .iter()
            .find(|r| r.prior_mode == mode && r.scenario == scenario && r.k == k)
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        let study = StudyKind::Improperness.name();
        let mut rows = Vec::new();
        for r in &self.rows {
            for (name, v) in [
                ("stuck", r.stuck),
                ("diverged", r.diverged),
                ("stuck_or_diverged", r.stuck_or_diverged),
            ] {
                let mut row =
                    LongRow::new(study, format!("{}:{}:{name}", r.prior_mode, r.scenario), v);
                row.n = Some(r.n);
                row.k = Some(r.k);
                rows.push(row);
            }
        }
        rows
    }

    pub fn svg(&self) -> String {
        let groups: Vec<(String, Vec<f64>)> = self
            .rows
            .iter()
            .map(|r| {
                (
                    format!("{} {} k={}", r.prior_mode, r.scenario, r.k),
                    vec![r.stuck_or_diverged],
                )
            })
            .collect();
        box_chart(
            "proportion of stuck or diverged chains",
            "proportion",
            &groups,
        )
    }
}

/// Proportions of stuck and diverged chains per prior and scenario.
pub fn improperness_study(
    cfg: &ImpropernessConfig,
    mcmc: &McmcConfig,
    master: u64,
) -> Result<ImpropernessTable> {
    let jobs: Vec<(PriorMode, usize, usize)> = cfg
        .prior_modes
        .iter()
        .flat_map(|&m| {
            (0..cfg.scenarios.len())
                .flat_map(move |s| (0..cfg.replications).map(move |r| (m, s, r)))
        })
        .collect();
    let cells: Vec<ImproperCell> = jobs
        .par_iter()
        .map(|&(mode, s, r)| {
            let sc = &cfg.scenarios[s];
            // identical data for every prior, distinct per scenario
            let data_seed = derive_seed(derive_seed(master, s as u64), r as u64);
            let seed = derive_seed(data_seed, 1);
            let mut cell = ImproperCell {
                prior_mode: mode,
                scenario: sc.name.clone(),
                k: sc.k,
                replication: r,
                seed,
                stuck: false,
                diverged: false,
                longest_collapsed_run: 0,
                max_location_excursion: 0.0,
                error: None,
            };
            let chain_cfg = McmcConfig {
                prior_mode: mode,
                seed,
                ..mcmc.clone()
            };
            match simulate(cfg.sample_size, &sc.truth, data_seed)
                .and_then(|d| run_chain(&d, sc.k, sc.truth.family, &chain_cfg))
            {
                Ok(t) => {
                    cell.stuck = t.report.stuck;
                    cell.diverged = t.report.diverged;
                    cell.longest_collapsed_run = t.report.longest_collapsed_run;
                    cell.max_location_excursion = t.report.max_location_excursion;
                }
                Err(e) => cell.error = Some(e.to_string()),
            }
            cell
        })
        .collect();
    let mut rows = Vec::new();
    for &mode in &cfg.prior_modes {
        for sc in &cfg.scenarios {
            let group: Vec<&ImproperCell> = cells
                .iter()
                .filter(|c| c.prior_mode == mode && c.scenario == sc.name && c.k == sc.k)
                .collect();
            let ok: Vec<&&ImproperCell> = group.iter().filter(|c| c.error.is_none()).collect();
            let m = ok.len().max(1) as f64;
            let count =
                |f: &dyn Fn(&ImproperCell) -> bool| ok.iter().filter(|c| f(c)).count() as f64;
            rows.push(ImproperRow {
                prior_mode: mode,
                scenario: sc.name.clone(),
                k: sc.k,
                n: cfg.sample_size,
                replications: group.len(),
                failed: group.len() - ok.len(),
                stuck: count(&|c| c.stuck) / m,
                diverged: count(&|c| c.diverged) / m,
                stuck_or_diverged: count(&|c| c.stuck || c.diverged) / m,
            });
        }
    }
    Ok(ImpropernessTable { rows, cells })
}

/// Distribution of one integrator setting over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub values: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Largest `|value - reference|`.
    pub max_abs_error: f64,
}

impl BenchRow {
    fn new(method: Method, values: Vec<f64>, reference: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 && values.iter().any(|v| *v != values[0]) {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let max_abs_error = values
            .iter()
            .map(|v| (v - reference).abs())
            .fold(0.0, f64::max);
        Self {
            method,
            values,
            mean,
            sd,
            max_abs_error,
        }
    }
}

/// `½ ln det I` under each integrator, against a Gauss–Kronrod reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub model: MixtureParams,
    pub reference: f64,
    pub riemann: Vec<BenchRow>,
    pub monte_carlo: Vec<BenchRow>,
}

impl BenchmarkTable {
    pub fn mc_sd(&self, samples: usize) -> Option<f64> {
        self.monte_carlo
            .iter()
            .find(|r| r.method == Method::MonteCarlo { samples })
            .map(|r| r.sd)
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        let study = StudyKind::IntegratorBenchmark.name();
        let mut rows = vec![LongRow::new(study, "reference", self.reference)];
        for r in self.riemann.iter().chain(&self.monte_carlo) {
            for (i, v) in r.values.iter().enumerate() {
                let mut row = LongRow::new(study, r.method.to_string(), *v);
                row.replication = Some(i);
                rows.push(row);
            }
        }
        rows
    }

    pub fn svg(&self) -> String {
        let groups: Vec<(String, Vec<f64>)> = self
            .riemann
            .iter()
            .chain(&self.monte_carlo)
            .map(|r| (r.method.to_string(), r.values.clone()))
            .collect();
        box_chart("log-prior estimates by integrator", "1/2 ln det I", &groups)
    }
}

fn half_log_det(
    params: &MixtureParams,
    cfg: &BenchmarkConfig,
    icfg: &IntegratorConfig,
) -> Result<f64> {
    Ok(fim(params, &cfg.scenario, icfg)?.half_log_det()?.value)
}

/// Replicated prior estimates for each Riemann knot count and Monte Carlo
/// sample size. Riemann rules are deterministic; Monte Carlo replication `r`
/// uses seed `derive_seed(master, r)`.
pub fn integrator_benchmark(cfg: &BenchmarkConfig, master: u64) -> Result<BenchmarkTable> {
    cfg.model.validate()?;
    let fixed = IntegratorConfig::with_method;
    let reference = half_log_det(
        &cfg.model,
        cfg,
        &fixed(Method::GaussKronrod {
            rel_tol: cfg.reference_rel_tol,
        }),
    )?;
    let riemann = cfg
        .riemann_points
        .iter()
        .map(|&points| {
            let method = Method::Riemann { points };
            let v = half_log_det(&cfg.model, cfg, &fixed(method))?;
            Ok(BenchRow::new(method, vec![v; cfg.replications], reference))
        })
        .collect::<Result<_>>()?;
    let monte_carlo = cfg
        .mc_samples
        .iter()
        .map(|&samples| {
            let method = Method::MonteCarlo { samples };
            let values = (0..cfg.replications)
                .into_par_iter()
                .map(|r| {
                    let icfg = IntegratorConfig {
                        seed: derive_seed(master, r as u64),
                        ..fixed(method)
                    };
                    half_log_det(&cfg.model, cfg, &icfg)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(BenchRow::new(method, values, reference))
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkTable {
        model: cfg.model.clone(),
        reference,
        riemann,
        monte_carlo,
    })
}

/// Output of [`run_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "kebab-case")]
pub enum StudyResult {
    OverfitNull(OverfitTable),
    OverfitK(OverfitTable),
    WeightsPriorShape(Vec<PriorCurve>),
    Improperness(ImpropernessTable),
    IntegratorBenchmark(BenchmarkTable),
}

impl StudyResult {
    pub fn kind(&self) -> StudyKind {
        match self {
            StudyResult::OverfitNull(_) => StudyKind::OverfitNull,
            StudyResult::OverfitK(_) => StudyKind::OverfitK,
            StudyResult::WeightsPriorShape(_) => StudyKind::WeightsPriorShape,
            StudyResult::Improperness(_) => StudyKind::Improperness,
            StudyResult::IntegratorBenchmark(_) => StudyKind::IntegratorBenchmark,
        }
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        match self {
            StudyResult::OverfitNull(t) | StudyResult::OverfitK(t) => t.long_rows(),
            StudyResult::WeightsPriorShape(c) => shape_rows(c),
            StudyResult::Improperness(t) => t.long_rows(),
            StudyResult::IntegratorBenchmark(t) => t.long_rows(),
        }
    }

    pub fn svg(&self) -> String {
        match self {
            StudyResult::OverfitNull(t) | StudyResult::OverfitK(t) => t.svg(),
            StudyResult::WeightsPriorShape(c) => shape_svg(c),
            StudyResult::Improperness(t) => t.svg(),
            StudyResult::IntegratorBenchmark(t) => t.svg(),
        }
    }

    /// One-line description for terminals.
    pub fn headline(&self) -> String {
        match self {
            StudyResult::OverfitNull(t) | StudyResult::OverfitK(t) => {
                let mut keys: Vec<(usize, usize)> = t.cells.iter().map(|c| (c.k, c.n)).collect();
                keys.sort_unstable();
                keys.dedup();
                let parts: Vec<String> = keys
                    .iter()
                    .map(|&(k, n)| {
                        format!(
                            "k={k} n={n}: median max weight {:.3}",
                            t.median_max_weight(n, k)
                        )
                    })
                    .collect();
                format!(
                    "{} ({} failed cells); {}",
                    t.study,
                    t.failures(),
                    parts.join("; ")
                )
            }
            StudyResult::WeightsPriorShape(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .map(|c| format!("{}: mass above 1/2 {:.3}", c.label, c.mass_above_half()))
                    .collect();
                format!("weights-prior-shape; {}", parts.join("; "))
            }
            StudyResult::Improperness(t) => {
                let parts: Vec<String> = t
                    .rows
                    .iter()
                    .map(|r| {
                        format!(
                            "{} {} k={}: stuck {:.2} diverged {:.2}",
                            r.prior_mode, r.scenario, r.k, r.stuck, r.diverged
                        )
                    })
                    .collect();
                format!("improperness; {}", parts.join("; "))
            }
            StudyResult::IntegratorBenchmark(t) => {
                let parts: Vec<String> = t
                    .monte_carlo
                    .iter()
                    .map(|r| format!("{} sd {:.2e}", r.method, r.sd))
                    .collect();
                format!(
                    "integrator-benchmark; reference {:.6}; {}",
                    t.reference,
                    parts.join("; ")
                )
            }
        }
    }
}

/// Run the study selected by `cfg.kind`.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    Ok(match cfg.kind {
        StudyKind::OverfitNull => StudyResult::OverfitNull(overfit_null_study(cfg)?),
        StudyKind::OverfitK => StudyResult::OverfitK(overfit_k_study(cfg)?),
        StudyKind::WeightsPriorShape => {
            StudyResult::WeightsPriorShape(weights_prior_shape_study(&cfg.shape)?)
        }
        StudyKind::Improperness => {
            StudyResult::Improperness(improperness_study(&cfg.improperness, &cfg.mcmc, cfg.seed)?)
        }
        StudyKind::IntegratorBenchmark => {
            StudyResult::IntegratorBenchmark(integrator_benchmark(&cfg.benchmark, cfg.seed)?)
        }
    })
}
