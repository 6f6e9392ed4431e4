use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use jeffmix::experiments::{
    bayes_factor, dataset_analysis, integrator_benchmark, run_study, svg, write_artifacts,
    Artifacts, BenchmarkConfig, BridgeConfig, LongRow, ModelSpec, PosteriorSummary,
    StudyConfig, StudyKind,
};
use jeffmix::fisher::{fim, select_integrator, FisherMatrix, IntegratorConfig, Method, Scenario};
use jeffmix::hierarchical::HierarchicalHyper;
use jeffmix::jeffreys::{log_dirichlet_half, log_jeffreys_weights};
use jeffmix::mcmc::{
    diagnose, log_prior, run_chain, ChainTrace, DiagnosticsReport, DivergenceThresholds,
    McmcConfig, PriorMode,
};
use jeffmix::mixture::{ComponentFamily, Dataset, MixtureParams, Transform};

const DEFAULT_OUT: &str = "jeffmix-out";

/// Failure classes mapped to exit codes 2 and 1.
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<jeffmix::Error> for CliError {
    fn from(e: jeffmix::Error) -> Self {
        match e {
            jeffmix::Error::Argument(_) | jeffmix::Error::ParameterDomain(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.into()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "jeffmix",
    version,
    about = "Jeffreys priors for finite mixtures: Fisher information, prior evaluation, MCMC and studies"
)]
pub struct Cli {
    /// Worker threads for parallel cells (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (falls back to the config, then $JEFFMIX_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row, or the name of a bundled data set (galaxy).
    #[arg(long)]
    data: String,
    /// Transform applied on load; overrides a sidecar `<file>.meta.json`.
    #[arg(long, value_enum)]
    transform: Option<TransformArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    None,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Weights,
    Locations,
    All,
    /// All parameters in the reference chart (p, μ, τ, δ, s).
    Reference,
}

impl ScenarioArg {
    fn build(self, k: usize) -> Scenario {
        match self {
            ScenarioArg::Weights => Scenario::weights_only(k),
            ScenarioArg::Locations => Scenario::locations_only(k),
            ScenarioArg::All => Scenario::all_params(k),
            ScenarioArg::Reference => Scenario::reference(k),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fisher information matrix and log Jeffreys value of a model.
    Fim {
        #[command(flatten)]
        common: Common,
        /// Mixture parameters as JSON.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        scenario: ScenarioArg,
        /// riemann:N | mc:N | gk:TOL | auto
        #[arg(long)]
        method: Option<Method>,
    },
    /// Log prior density of a model under one of the prior modes.
    PriorEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// hierarchical | full-jeffreys | cond-sigma-proper
        #[arg(long, default_value = "hierarchical")]
        prior: PriorMode,
        #[arg(long)]
        method: Option<Method>,
        /// Hierarchical hyperparameter μ0.
        #[arg(long, default_value_t = 0.0)]
        mu0: f64,
        /// Hierarchical hyperparameter ζ0.
        #[arg(long, default_value_t = 1.0)]
        zeta0: f64,
    },
    /// Run one MCMC chain and store the trace.
    Sample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        /// gaussian | gumbel | student-t:DF
        #[arg(long, default_value = "gaussian")]
        family: ComponentFamily,
        #[arg(long)]
        prior: Option<PriorMode>,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Fit a mixture to a data set and write a summary table and predictive density.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value = "gaussian")]
        family: ComponentFamily,
        #[arg(long)]
        prior: Option<PriorMode>,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
        /// Points of the predictive-density grid.
        #[arg(long, default_value_t = 200)]
        grid_points: usize,
    },
    /// Run a study from a configuration file.
    Study {
        #[command(flatten)]
        common: Common,
        /// overfit-null | overfit-k | weights-prior-shape | improperness | integrator-benchmark
        #[arg(long)]
        kind: Option<StudyKind>,
    },
    /// Flag stuck or diverging chains in a stored trace.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// JSON written by `sample`.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Stability of Riemann and Monte Carlo prior estimates against Gauss–Kronrod.
    BenchmarkIntegrators {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Bayes factor of two mixture specifications by bridge sampling.
    BayesFactor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// K:FAMILY, e.g. 2:gumbel
        #[arg(long)]
        model_a: String,
        #[arg(long)]
        model_b: String,
        #[arg(long)]
        prior: Option<PriorMode>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
}

pub fn run(cli: Cli) -> CliResult<String> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    match cli.command {
        Command::Fim {
            common,
            model,
            scenario,
            method,
        } => cmd_fim(&common, &model, scenario, method),
        Command::PriorEval {
            common,
            model,
            prior,
            method,
            mu0,
            zeta0,
        } => cmd_prior_eval(&common, &model, prior, method, mu0, zeta0),
        Command::Sample {
            common,
            data,
            k,
            family,
            prior,
            method,
            iterations,
            burn_in,
        } => {
            let cfg = mcmc_config(&common, prior, method, iterations, burn_in)?;
            cmd_sample(&common, &data, k, family, &cfg)
        }
        Command::Analyze {
            common,
            data,
            k,
            family,
            prior,
            method,
            iterations,
            burn_in,
            grid_points,
        } => {
            let cfg = mcmc_config(&common, prior, method, iterations, burn_in)?;
            cmd_analyze(&common, &data, k, family, &cfg, grid_points)
        }
        Command::Study { common, kind } => cmd_study(&common, kind),
        Command::Diagnose { common, trace } => cmd_diagnose(&common, &trace),
        Command::BenchmarkIntegrators {
            common,
            model,
            replications,
        } => cmd_benchmark(&common, model.as_deref(), replications),
        Command::BayesFactor {
            common,
            data,
            model_a,
            model_b,
            prior,
            iterations,
            burn_in,
        } => cmd_bayes_factor(&common, &data, &model_a, &model_b, prior, iterations, burn_in),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {what} {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        CliError::Usage(format!(
            "invalid {what} {} at `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}

fn load_config<T: DeserializeOwned + Default>(common: &Common) -> CliResult<T> {
    match &common.config {
        Some(p) => read_json(p, "config"),
        None => Ok(T::default()),
    }
}

fn load_model(path: &Path) -> CliResult<MixtureParams> {
    let m: MixtureParams = read_json(path, "model")?;
    m.validate()?;
    Ok(m)
}

fn load_data(args: &DataArgs) -> CliResult<Dataset> {
    let transform = args.transform.map(|t| match t {
        TransformArg::None => Transform::None,
        TransformArg::Log => Transform::Log,
    });
    let path = Path::new(&args.data);
    if !path.exists() {
        if let Some(d) = Dataset::bundled(&args.data) {
            return Ok(match transform {
                Some(t) if t != d.transform => {
                    Dataset::with_transform(d.name.clone(), d.values().to_vec(), t)?
                }
                _ => d,
            });
        }
        return Err(CliError::Runtime(anyhow!(
            "dataset file not found: {}",
            path.display()
        )));
    }
    Dataset::load(path, transform).map_err(|e| CliError::Runtime(e.into()))
}

fn out_dir(common: &Common, from_config: Option<&Path>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| from_config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os("JEFFMIX_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn mcmc_config(
    common: &Common,
    prior: Option<PriorMode>,
    method: Option<Method>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
) -> CliResult<McmcConfig> {
    let mut cfg: McmcConfig = load_config(common)?;
    if let Some(p) = prior {
        cfg.prior_mode = p;
    }
    if let Some(m) = method {
        cfg.integrator.method = m;
    }
    if let Some(n) = iterations {
        cfg.iterations = n;
    }
    if let Some(b) = burn_in {
        cfg.burn_in = b;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn written(a: &Artifacts) -> String {
    let mut s = format!("{}, {}", a.json.display(), a.csv.display());
    if let Some(p) = &a.svg {
        let _ = write!(s, ", {}", p.display());
    }
    s
}

fn runtime(e: jeffmix::Error) -> CliError {
    CliError::Runtime(e.into())
}

#[derive(Serialize)]
struct FimOutput<'a> {
    model: &'a MixtureParams,
    scenario: &'a Scenario,
    method: Method,
    matrix: &'a FisherMatrix,
    log_jeffreys: f64,
    jittered: bool,
}

fn cmd_fim(
    common: &Common,
    model: &Path,
    scenario: ScenarioArg,
    method: Option<Method>,
) -> CliResult<String> {
    let mut icfg: IntegratorConfig = load_config(common)?;
    if let Some(m) = method {
        icfg.method = m;
    }
    if let Some(s) = common.seed {
        icfg.seed = s;
    }
    icfg.validate()?;
    let params = load_model(model)?;
    let scenario = scenario.build(params.k());
    let m = fim(&params, &scenario, &icfg)?;
    let h = m.half_log_det().map_err(runtime)?;
    let resolved = select_integrator(&params, &icfg).method;
    let out = FimOutput {
        model: &params,
        scenario: &scenario,
        method: resolved,
        matrix: &m,
        log_jeffreys: h.value,
        jittered: h.jittered,
    };
    let mut rows = Vec::new();
    for i in 0..m.dim {
        for j in 0..m.dim {
            rows.push(LongRow::new(
                "fim",
                format!("I[{},{}]", m.ordering[i], m.ordering[j]),
                m.get(i, j),
            ));
        }
    }
    rows.push(LongRow::new("fim", "log_jeffreys", h.value));
    let a = write_artifacts(&out_dir(common, None), "fim", "fim", &out, &rows, None)
        .map_err(runtime)?;
    let mut text = String::new();
    let names: Vec<String> = m.ordering.iter().map(|p| format!("{:>12}", p.to_string())).collect();
    let _ = writeln!(text, "{:>8}{}", "", names.concat());
    for i in 0..m.dim {
        let _ = write!(text, "{:>8}", m.ordering[i].to_string());
        for j in 0..m.dim {
            let _ = write!(text, "{:>12.5e}", m.get(i, j));
        }
        text.push('\n');
    }
    let _ = write!(
        text,
        "fim: {}x{} ({resolved}), log Jeffreys {:.6}{}; wrote {}",
        m.dim,
        m.dim,
        h.value,
        if h.jittered { " (clamped)" } else { "" },
        written(&a)
    );
    Ok(text)
}

#[derive(Serialize)]
struct PriorEvalOutput<'a> {
    model: &'a MixtureParams,
    prior: PriorMode,
    hyper: Option<HierarchicalHyper>,
    log_prior: f64,
    log_jeffreys_weights: Option<f64>,
    log_dirichlet_half: Option<f64>,
}

fn cmd_prior_eval(
    common: &Common,
    model: &Path,
    prior: PriorMode,
    method: Option<Method>,
    mu0: f64,
    zeta0: f64,
) -> CliResult<String> {
    let mut icfg: IntegratorConfig = load_config(common)?;
    if let Some(m) = method {
        icfg.method = m;
    }
    if let Some(s) = common.seed {
        icfg.seed = s;
    }
    icfg.validate()?;
    let params = load_model(model)?;
    let hyper = HierarchicalHyper::new(mu0, zeta0)?;
    let value = log_prior(&params, &hyper, prior, &icfg);
    let (weights, dirichlet) = if params.k() >= 2 {
        (
            Some(log_jeffreys_weights(&params.weights, &params, &icfg).map_err(runtime)?.value),
            log_dirichlet_half(&params.weights).ok(),
        )
    } else {
        (None, None)
    };
    let out = PriorEvalOutput {
        model: &params,
        prior,
        hyper: (prior == PriorMode::Hierarchical).then_some(hyper),
        log_prior: value,
        log_jeffreys_weights: weights,
        log_dirichlet_half: dirichlet,
    };
    let mut rows = vec![LongRow::new("prior-eval", format!("log_prior:{prior}"), value)];
    if let Some(w) = weights {
        rows.push(LongRow::new("prior-eval", "log_jeffreys_weights", w));
    }
    if let Some(d) = dirichlet {
        rows.push(LongRow::new("prior-eval", "log_dirichlet_half", d));
    }
    let a = write_artifacts(
        &out_dir(common, None),
        "prior-eval",
        "prior-eval",
        &out,
        &rows,
        None,
    )
    .map_err(runtime)?;
    Ok(format!(
        "prior-eval: {prior} log prior {value:.6}{}; wrote {}",
        weights
            .map(|w| format!(", log Jeffreys weights {w:.6}"))
            .unwrap_or_default(),
        written(&a)
    ))
}

fn summary_rows(study: &str, s: &PosteriorSummary, n: usize, k: usize) -> Vec<LongRow> {
    let mut rows = Vec::new();
    for (l, c) in s.components.iter().enumerate() {
        for (name, m) in [
            ("weight", c.weight),
            ("location", c.location),
            ("scale", c.scale),
        ] {
            for (stat, v) in [("mean", m.mean), ("sd", m.sd)] {
                let mut r = LongRow::new(study, format!("{name}_{stat}"), v).component(l + 1);
                r.n = Some(n);
                r.k = Some(k);
                rows.push(r);
            }
        }
    }
    rows
}

fn trace_svg(trace: &ChainTrace) -> String {
    let stride = (trace.draws.len() / 2000).max(1);
    let idx: Vec<f64> = (0..trace.draws.len())
        .step_by(stride)
        .map(|i| i as f64)
        .collect();
    let ys: Vec<Vec<f64>> = (0..trace.k)
        .map(|l| {
            trace
                .draws
                .iter()
                .step_by(stride)
                .map(|d| d.params.weights[l])
                .collect()
        })
        .collect();
    let labels: Vec<String> = (1..=trace.k).map(|l| format!("p{l}")).collect();
    let series: Vec<svg::Series> = ys
        .iter()
        .zip(&labels)
        .map(|(y, label)| svg::Series {
            label,
            x: &idx,
            y,
        })
        .collect();
    svg::line_chart("weight traces", "draw", "weight", &series, None)
}

fn cmd_sample(
    common: &Common,
    data: &DataArgs,
    k: usize,
    family: ComponentFamily,
    cfg: &McmcConfig,
) -> CliResult<String> {
    let d = load_data(data)?;
    let trace = run_chain(&d, k, family, cfg).map_err(runtime)?;
    let summary = PosteriorSummary::from_trace(&trace).map_err(runtime)?;
    let rows = summary_rows("sample", &summary, d.len(), k);
    let a = write_artifacts(
        &out_dir(common, None),
        "sample",
        "sample",
        &trace,
        &rows,
        Some(&trace_svg(&trace)),
    )
    .map_err(runtime)?;
    let w: Vec<String> = summary
        .mean_weights()
        .iter()
        .map(|w| format!("{w:.3}"))
        .collect();
    Ok(format!(
        "sample: {} draws, k={k}, {}, weights [{}], stuck={} diverged={}; wrote {}",
        trace.draws.len(),
        cfg.prior_mode,
        w.join(", "),
        trace.report.stuck,
        trace.report.diverged,
        written(&a)
    ))
}

fn cmd_analyze(
    common: &Common,
    data: &DataArgs,
    k: usize,
    family: ComponentFamily,
    cfg: &McmcConfig,
    grid_points: usize,
) -> CliResult<String> {
    if grid_points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    let d = load_data(data)?;
    let r = dataset_analysis(&d, k, family, cfg, grid_points).map_err(runtime)?;
    let stem = format!("analyze-{}", d.name);
    let a = write_artifacts(
        &out_dir(common, None),
        &stem,
        "analyze",
        &r,
        &r.long_rows(),
        Some(&r.svg()),
    )
    .map_err(runtime)?;
    Ok(format!("{}analyze: wrote {}", r.table(), written(&a)))
}

fn cmd_study(common: &Common, kind: Option<StudyKind>) -> CliResult<String> {
    let mut cfg: StudyConfig = load_config(common)?;
    if let Some(k) = kind {
        cfg.kind = k;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let result = run_study(&cfg)?;
    let dir = out_dir(common, cfg.output_dir.as_deref());
    let name = cfg.kind.name();
    let a = write_artifacts(
        &dir,
        name,
        name,
        &result,
        &result.long_rows(),
        Some(&result.svg()),
    )
    .map_err(runtime)?;
    Ok(format!("{}; wrote {}", result.headline(), written(&a)))
}

#[derive(Deserialize)]
struct TraceFile {
    result: ChainTrace,
}

#[derive(Serialize)]
struct DiagnoseOutput {
    thresholds: DivergenceThresholds,
    report: DiagnosticsReport,
}

fn cmd_diagnose(common: &Common, trace: &Path) -> CliResult<String> {
    let thresholds: DivergenceThresholds = load_config(common)?;
    thresholds.validate()?;
    if !trace.exists() {
        return Err(CliError::Runtime(anyhow!(
            "trace file not found: {}",
            trace.display()
        )));
    }
    let t: TraceFile = read_json(trace, "trace")?;
    let report = diagnose(&t.result, &thresholds).map_err(runtime)?;
    let rows = vec![
        LongRow::new("diagnose", "stuck", f64::from(u8::from(report.stuck))),
        LongRow::new("diagnose", "diverged", f64::from(u8::from(report.diverged))),
        LongRow::new(
            "diagnose",
            "longest_collapsed_run",
            report.longest_collapsed_run as f64,
        ),
        LongRow::new("diagnose", "collapsed_fraction", report.collapsed_fraction),
        LongRow::new("diagnose", "diverged_fraction", report.diverged_fraction),
        LongRow::new(
            "diagnose",
            "max_location_excursion",
            report.max_location_excursion,
        ),
    ];
    let line = format!(
        "diagnose: stuck={} diverged={} longest collapsed run {} max excursion {:.3}",
        report.stuck, report.diverged, report.longest_collapsed_run, report.max_location_excursion
    );
    let out = DiagnoseOutput { thresholds, report };
    let a = write_artifacts(
        &out_dir(common, None),
        "diagnose",
        "diagnose",
        &out,
        &rows,
        None,
    )
    .map_err(runtime)?;
    Ok(format!("{line}; wrote {}", written(&a)))
}

fn cmd_benchmark(
    common: &Common,
    model: Option<&Path>,
    replications: Option<usize>,
) -> CliResult<String> {
    let mut cfg: BenchmarkConfig = load_config(common)?;
    if let Some(p) = model {
        cfg.model = load_model(p)?;
        if cfg.scenario.k != cfg.model.k() {
            cfg.scenario = Scenario::weights_only(cfg.model.k());
        }
    }
    if let Some(r) = replications {
        cfg.replications = r;
    }
    if cfg.replications == 0 {
        return Err(CliError::Usage("replications must be at least 1".into()));
    }
    let t = integrator_benchmark(&cfg, common.seed.unwrap_or(1))?;
    let a = write_artifacts(
        &out_dir(common, None),
        "benchmark-integrators",
        "benchmark-integrators",
        &t,
        &t.long_rows(),
        Some(&t.svg()),
    )
    .map_err(runtime)?;
    let parts: Vec<String> = t
        .riemann
        .iter()
        .chain(&t.monte_carlo)
        .map(|r| format!("{} sd {:.2e} max err {:.2e}", r.method, r.sd, r.max_abs_error))
        .collect();
    Ok(format!(
        "benchmark-integrators: reference {:.6}; {}; wrote {}",
        t.reference,
        parts.join("; "),
        written(&a)
    ))
}

fn parse_spec(s: &str) -> CliResult<ModelSpec> {
    let bad = || CliError::Usage(format!("model spec {s:?} must look like K:FAMILY, e.g. 2:gumbel"));
    let (k, family) = s.split_once(':').ok_or_else(bad)?;
    let k: usize = k.parse().ok().filter(|k| *k >= 1).ok_or_else(bad)?;
    let family: ComponentFamily = family.parse().map_err(|_| bad())?;
    Ok(ModelSpec { k, family })
}

fn cmd_bayes_factor(
    common: &Common,
    data: &DataArgs,
    model_a: &str,
    model_b: &str,
    prior: Option<PriorMode>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
) -> CliResult<String> {
    let a = parse_spec(model_a)?;
    let b = parse_spec(model_b)?;
    let mut cfg: BridgeConfig = load_config(common)?;
    if let Some(p) = prior {
        cfg.mcmc.prior_mode = p;
    }
    if let Some(n) = iterations {
        cfg.mcmc.iterations = n;
    }
    if let Some(n) = burn_in {
        cfg.mcmc.burn_in = n;
    }
    cfg.mcmc.validate()?;
    let d = load_data(data)?;
    let bf = bayes_factor(&d, a, b, &cfg, common.seed.unwrap_or(1)).map_err(runtime)?;
    let rows = vec![
        LongRow::new("bayes-factor", "log_marginal_a", bf.a.log_value),
        LongRow::new("bayes-factor", "log_marginal_b", bf.b.log_value),
        LongRow::new("bayes-factor", "log_bf", bf.log_bf),
        LongRow::new("bayes-factor", "se_log_bf", bf.se_log_bf),
        LongRow::new("bayes-factor", "bf", bf.bf),
    ];
    let art = write_artifacts(
        &out_dir(common, None),
        "bayes-factor",
        "bayes-factor",
        &bf,
        &rows,
        None,
    )
    .map_err(runtime)?;
    Ok(format!(
        "bayes-factor: {model_a} vs {model_b} on {}: BF {:.4} (log {:.4} ± {:.4}); wrote {}",
        d.name,
        bf.bf,
        bf.log_bf,
        bf.se_log_bf,
        written(&art)
    ))
}
