use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::diagnostics::{diagnose, DiagnosticsReport};
use super::kernels::{adapt_scales, log_truncation_mass, propose_weights, sample_truncated_normal};
use super::{McmcConfig, PriorMode};
use crate::error::{Error, Result};
use crate::fisher::{IntegratorConfig, Scenario};
use crate::hierarchical::{log_component_levels, log_hyperprior, HierarchicalHyper};
use crate::jeffreys::{log_jeffreys, log_jeffreys_fixed_ratios, log_jeffreys_weights};
use crate::mixture::{
    log_likelihood, natural_jacobian, to_reparam, ComponentFamily, Dataset, MixtureParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl DataSummary {
    pub fn of(data: &Dataset) -> Self {
        Self {
            n: data.len(),
            mean: data.mean(),
            sd: data.sd(),
            min: data.min(),
            max: data.max(),
        }
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub params: MixtureParams,
    pub hyper: Option<HierarchicalHyper>,
    pub log_posterior: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Rate {
    pub accepted: u64,
    pub proposed: u64,
}

impl Rate {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += u64::from(accepted);
    }
}

/// Acceptance counts per block, after burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct BlockAcceptance {
    pub weights: Rate,
    pub locations: Rate,
    pub scales: Rate,
    pub hyper: Rate,
}

/// Kernel scales in force from `iteration` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSnapshot {
    pub iteration: usize,
    pub weights: Vec<f64>,
    pub locations: Vec<f64>,
    pub scales: Vec<f64>,
    pub mu0: f64,
    pub zeta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub k: usize,
    pub family: ComponentFamily,
    pub prior_mode: PriorMode,
    pub seed: u64,
    pub data: DataSummary,
    pub draws: Vec<Draw>,
    pub acceptance: BlockAcceptance,
    pub scale_history: Vec<ScaleSnapshot>,
    pub report: DiagnosticsReport,
}

impl ChainTrace {
    pub fn posterior_mean_weights(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.k];
        for d in &self.draws {
            for (a, w) in m.iter_mut().zip(&d.params.weights) {
                *a += w;
            }
        }
        let n = self.draws.len().max(1) as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }
}

/// Per-datum component log-densities with cached row totals.
struct LikCache {
    k: usize,
    lnf: Vec<f64>,
    lnp: Vec<f64>,
    rows: Vec<f64>,
    total: f64,
    col: Vec<f64>,
    new_rows: Vec<f64>,
    new_lnp: Vec<f64>,
}

fn row_lse(lnf: &[f64], lnp: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for (f, p) in lnf.iter().zip(lnp) {
        max = max.max(f + p);
    }
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = lnf.iter().zip(lnp).map(|(f, p)| (f + p - max).exp()).sum();
    max + s.ln()
}

impl LikCache {
    fn new(data: &[f64], params: &MixtureParams) -> Self {
        let k = params.k();
        let mut lnf = Vec::with_capacity(data.len() * k);
        for &x in data {
            for l in 0..k {
                lnf.push(
                    params
                        .family_of(l)
                        .ln_pdf(x, params.locations[l], params.scales[l]),
                );
            }
        }
        let lnp: Vec<f64> = params.weights.iter().map(|w| w.ln()).collect();
        let rows: Vec<f64> = lnf.chunks(k).map(|r| row_lse(r, &lnp)).collect();
        let total = rows.iter().sum();
        Self {
            k,
            col: vec![0.0; data.len()],
            new_rows: vec![0.0; data.len()],
            new_lnp: lnp.clone(),
            lnf,
            lnp,
            rows,
            total,
        }
    }

    /// Log-likelihood with component `l` replaced.
    fn propose_component(
        &mut self,
        data: &[f64],
        family: ComponentFamily,
        l: usize,
        loc: f64,
        scale: f64,
    ) -> f64 {
        let k = self.k;
        let mut total = 0.0;
        let mut row = vec![0.0; k];
        let c = family.ln_norm() - scale.ln();
        let inv = 1.0 / scale;
        for (i, &x) in data.iter().enumerate() {
            let v = c + family.ln_kernel((x - loc) * inv);
            self.col[i] = v;
            row.copy_from_slice(&self.lnf[i * k..(i + 1) * k]);
            row[l] = v;
            let r = row_lse(&row, &self.lnp);
            self.new_rows[i] = r;
            total += r;
        }
        total
    }

    fn accept_component(&mut self, l: usize, total: f64) {
        let k = self.k;
        for (i, v) in self.col.iter().enumerate() {
            self.lnf[i * k + l] = *v;
        }
        std::mem::swap(&mut self.rows, &mut self.new_rows);
        self.total = total;
    }

    fn propose_weights(&mut self, weights: &[f64]) -> f64 {
        let k = self.k;
        for (a, w) in self.new_lnp.iter_mut().zip(weights) {
            *a = w.ln();
        }
        let mut total = 0.0;
        for i in 0..self.rows.len() {
            let r = row_lse(&self.lnf[i * k..(i + 1) * k], &self.new_lnp);
            self.new_rows[i] = r;
            total += r;
        }
        total
    }

    fn accept_weights(&mut self, total: f64) {
        std::mem::swap(&mut self.lnp, &mut self.new_lnp);
        std::mem::swap(&mut self.rows, &mut self.new_rows);
        self.total = total;
    }
}

/// Density of a scale ratio: ½ on (0, 1], `1/(2s²)` above.
fn log_ratio_prior(s: f64) -> f64 {
    if s <= 1.0 {
        -std::f64::consts::LN_2
    } else {
        -(2.0 * s * s).ln()
    }
}

struct Target {
    mode: PriorMode,
    integrator: IntegratorConfig,
}

impl Target {
    /// Log prior, and the weights term when it was computed.
    fn log_prior(
        &self,
        params: &MixtureParams,
        hyper: &HierarchicalHyper,
        cached_weights: Option<f64>,
    ) -> (f64, f64) {
        let finite = |r: Result<f64>| r.ok().filter(|v| !v.is_nan()).unwrap_or(f64::NEG_INFINITY);
        match self.mode {
            PriorMode::Hierarchical => {
                let w = cached_weights.unwrap_or_else(|| {
                    finite(
                        log_jeffreys_weights(&params.weights, params, &self.integrator)
                            .map(|v| v.value),
                    )
                });
                let levels = finite(log_component_levels(params, hyper));
                let top = finite(log_hyperprior(hyper.mu0, hyper.zeta0));
                (levels + w + top, w)
            }
            PriorMode::FullJeffreys => {
                let v = finite(
                    log_jeffreys(params, &Scenario::all_params(params.k()), &self.integrator)
                        .map(|v| v.value),
                );
                (v, 0.0)
            }
            PriorMode::CondSigmaProper => {
                let v =
                    finite(log_jeffreys_fixed_ratios(params, &self.integrator).map(|v| v.value));
                let ratios: f64 = (1..params.k())
                    .map(|l| log_ratio_prior(params.scales[l] / params.scales[l - 1]))
                    .sum();
                (v + ratios - log_abs_det_jacobian(params), 0.0)
            }
        }
    }
}

/// Unnormalized log prior of `mode` in the natural chart, as used by
/// [`run_chain`]. `hyper` is ignored outside the hierarchical prior.
pub fn log_prior(
    params: &MixtureParams,
    hyper: &HierarchicalHyper,
    mode: PriorMode,
    integrator: &IntegratorConfig,
) -> f64 {
    let target = Target {
        mode,
        integrator: *integrator,
    };
    let v = target.log_prior(params, hyper, None).0;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Unnormalized log posterior targeted by [`run_chain`]: log-likelihood plus
/// the log prior of `mode`. `hyper` is ignored outside the hierarchical
/// prior. Points where the prior cannot be evaluated map to `-∞`.
pub fn log_posterior(
    data: &Dataset,
    params: &MixtureParams,
    hyper: &HierarchicalHyper,
    mode: PriorMode,
    integrator: &IntegratorConfig,
) -> f64 {
    let Ok(ll) = log_likelihood(data, params) else {
        return f64::NEG_INFINITY;
    };
    let v = ll + log_prior(params, hyper, mode, integrator);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `ln |det ∂θ/∂φ|` between the natural and reference charts.
fn log_abs_det_jacobian(params: &MixtureParams) -> f64 {
    match to_reparam(params) {
        Ok(r) => {
            let j: DMatrix<f64> = natural_jacobian(&r);
            j.determinant().abs().ln()
        }
        Err(_) => f64::INFINITY,
    }
}

fn renormalize(weights: &mut [f64]) {
    let k = weights.len();
    let big = (0..k)
        .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
        .expect("k >= 1");
    let others: f64 = (0..k).filter(|&l| l != big).map(|l| weights[l]).sum();
    weights[big] = (1.0 - others).max(0.0);
}

fn accept<R: Rng>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio.is_nan() {
        return false;
    }
    log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
}

/// Run one chain of adaptive Metropolis-within-Gibbs on a `k`-component
/// mixture of `family` components.
///
/// Each sweep updates the weights, then every location (normal kernel),
/// every scale (log-normal kernel) and, under the hierarchical prior, `μ0`
/// (normal) and `ζ0` (log-normal). Kernel scales adapt toward the target
/// acceptance band during burn-in only.
pub fn run_chain(
    data: &Dataset,
    k: usize,
    family: ComponentFamily,
    cfg: &McmcConfig,
) -> Result<ChainTrace> {
    cfg.validate()?;
    family.validate()?;
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let xs = data.values();
    let summary = DataSummary::of(data);
    if !(summary.sd > 0.0) {
        return Err(Error::Initialization(
            "data have zero spread; initial scales would be 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target = Target {
        mode: cfg.prior_mode,
        integrator: cfg.integrator,
    };
    let sample_hyper = cfg.prior_mode == PriorMode::Hierarchical && cfg.fixed_hyper.is_none();

    let mut weights = vec![1.0 / k as f64; k];
    renormalize(&mut weights);
    let locations: Vec<f64> = (0..k)
        .map(|l| data.quantile((l as f64 + 0.5) / k as f64))
        .collect();
    let mut params = MixtureParams {
        weights,
        locations,
        scales: vec![summary.sd; k],
        family,
        component_families: None,
    };
    params.validate()?;
    let mut hyper = cfg
        .fixed_hyper
        .unwrap_or(HierarchicalHyper::new(summary.mean, summary.sd)?);

    let mut lik = LikCache::new(xs, &params);
    let (mut lp, mut w_term) = target.log_prior(&params, &hyper, None);
    if !(lik.total + lp).is_finite() {
        return Err(Error::Initialization(format!(
            "log posterior at the starting point is {} (likelihood {}, prior {}); \
             try another seed or rescale the data",
            lik.total + lp,
            lik.total,
            lp
        )));
    }

    let n_weight_coords = if k == 2 {
        1
    } else if k > 2 {
        k
    } else {
        0
    };
    let mut h_w = vec![cfg.initial_scales.weights; n_weight_coords];
    let mut h_mu = vec![cfg.initial_scales.locations.unwrap_or(0.1 * summary.sd); k];
    let mut h_sigma = vec![cfg.initial_scales.log_scales; k];
    let mut h_mu0 = cfg.initial_scales.mu0.unwrap_or(0.1 * summary.sd);
    let mut h_zeta0 = cfg.initial_scales.log_zeta0;

    // acceptance counts inside the current adaptation window
    let mut win_w = vec![Rate::default(); n_weight_coords];
    let mut win_mu = vec![Rate::default(); k];
    let mut win_sigma = vec![Rate::default(); k];
    let mut win_mu0 = Rate::default();
    let mut win_zeta0 = Rate::default();

    let mut acceptance = BlockAcceptance::default();
    let kept = (cfg.iterations - cfg.burn_in).div_ceil(cfg.thin);
    let mut draws = Vec::with_capacity(kept);
    let snapshot =
        |it: usize, h_w: &[f64], h_mu: &[f64], h_sigma: &[f64], a: f64, b: f64| ScaleSnapshot {
            iteration: it,
            weights: h_w.to_vec(),
            locations: h_mu.to_vec(),
            scales: h_sigma.to_vec(),
            mu0: a,
            zeta0: b,
        };
    let mut scale_history = vec![snapshot(0, &h_w, &h_mu, &h_sigma, h_mu0, h_zeta0)];

    for it in 0..cfg.iterations {
        let burning = it < cfg.burn_in;

        // weights
        if k == 2 {
            let proposal = propose_weights(&params.weights, h_w[0], &mut rng);
            let ok = match proposal {
                Some((w_new, corr)) => {
                    let ll = lik.propose_weights(&w_new);
                    let cand = MixtureParams {
                        weights: w_new,
                        ..params.clone()
                    };
                    let (lp_new, w_new_term) = target.log_prior(&cand, &hyper, None);
                    let ratio = ll + lp_new - lik.total - lp + corr;
                    let ok = accept(ratio, &mut rng);
                    if ok {
                        lik.accept_weights(ll);
                        params = cand;
                        lp = lp_new;
                        w_term = w_new_term;
                    }
                    ok
                }
                None => false,
            };
            win_w[0].record(ok);
            if !burning {
                acceptance.weights.record(ok);
            }
        } else if k > 2 {
            for j in 0..k {
                let mut m = rng.random_range(0..k - 1);
                if m >= j {
                    m += 1;
                }
                let total = params.weights[j] + params.weights[m];
                if !(total > 0.0) {
                    continue;
                }
                let h = h_w[j];
                let pj = params.weights[j];
                let pj_new = sample_truncated_normal(pj, h, 0.0, total, &mut rng);
                let corr = log_truncation_mass(pj, h, 0.0, total)
                    - log_truncation_mass(pj_new, h, 0.0, total);
                let mut w_new = params.weights.clone();
                w_new[j] = pj_new;
                w_new[m] = (total - pj_new).max(0.0);
                renormalize(&mut w_new);
                let ll = lik.propose_weights(&w_new);
                let cand = MixtureParams {
                    weights: w_new,
                    ..params.clone()
                };
                let (lp_new, w_new_term) = target.log_prior(&cand, &hyper, None);
                let ok = accept(ll + lp_new - lik.total - lp + corr, &mut rng);
                if ok {
                    lik.accept_weights(ll);
                    params = cand;
                    lp = lp_new;
                    w_term = w_new_term;
                }
                win_w[j].record(ok);
                if !burning {
                    acceptance.weights.record(ok);
                }
            }
        }

        // locations
        for l in 0..k {
            let z: f64 = rng.sample(StandardNormal);
            let loc = params.locations[l] + h_mu[l] * z;
            let ll = lik.propose_component(xs, params.family_of(l), l, loc, params.scales[l]);
            let mut cand = params.clone();
            cand.locations[l] = loc;
            let (lp_new, w_new_term) = target.log_prior(&cand, &hyper, None);
            let ok = accept(ll + lp_new - lik.total - lp, &mut rng);
            if ok {
                lik.accept_component(l, ll);
                params = cand;
                lp = lp_new;
                w_term = w_new_term;
            }
            win_mu[l].record(ok);
            if !burning {
                acceptance.locations.record(ok);
            }
        }

        // scales
        for l in 0..k {
            let z: f64 = rng.sample(StandardNormal);
            let log_ratio = h_sigma[l] * z;
            let scale = params.scales[l] * log_ratio.exp();
            let ok = if scale > 0.0 && scale.is_finite() {
                let ll =
                    lik.propose_component(xs, params.family_of(l), l, params.locations[l], scale);
                let mut cand = params.clone();
                cand.scales[l] = scale;
                let (lp_new, w_new_term) = target.log_prior(&cand, &hyper, None);
                // log-normal kernel: q(σ|σ')/q(σ'|σ) = σ'/σ
                let ok = accept(ll + lp_new - lik.total - lp + log_ratio, &mut rng);
                if ok {
                    lik.accept_component(l, ll);
                    params = cand;
                    lp = lp_new;
                    w_term = w_new_term;
                }
                ok
            } else {
                false
            };
            win_sigma[l].record(ok);
            if !burning {
                acceptance.scales.record(ok);
            }
        }

        // hyperparameters; the weights term does not depend on them
        if sample_hyper {
            let z: f64 = rng.sample(StandardNormal);
            let cand = HierarchicalHyper {
                mu0: hyper.mu0 + h_mu0 * z,
                ..hyper
            };
            let (lp_new, _) = target.log_prior(&params, &cand, Some(w_term));
            let ok = accept(lp_new - lp, &mut rng);
            if ok {
                hyper = cand;
                lp = lp_new;
            }
            win_mu0.record(ok);
            if !burning {
                acceptance.hyper.record(ok);
            }

            let z: f64 = rng.sample(StandardNormal);
            let log_ratio = h_zeta0 * z;
            let cand = HierarchicalHyper {
                zeta0: hyper.zeta0 * log_ratio.exp(),
                ..hyper
            };
            let ok = if cand.zeta0 > 0.0 && cand.zeta0.is_finite() {
                let (lp_new, _) = target.log_prior(&params, &cand, Some(w_term));
                let ok = accept(lp_new - lp + log_ratio, &mut rng);
                if ok {
                    hyper = cand;
                    lp = lp_new;
                }
                ok
            } else {
                false
            };
            win_zeta0.record(ok);
            if !burning {
                acceptance.hyper.record(ok);
            }
        }

        if burning && (it + 1) % cfg.adaptation_window == 0 {
            let band = cfg.target_acceptance;
            for (h, r) in h_w.iter_mut().zip(&mut win_w) {
                *h = adapt_scales(r.rate(), *h, band);
                *r = Rate::default();
            }
            for (h, r) in h_mu.iter_mut().zip(&mut win_mu) {
                *h = adapt_scales(r.rate(), *h, band);
                *r = Rate::default();
            }
            for (h, r) in h_sigma.iter_mut().zip(&mut win_sigma) {
                *h = adapt_scales(r.rate(), *h, band);
                *r = Rate::default();
            }
            if sample_hyper {
                h_mu0 = adapt_scales(win_mu0.rate(), h_mu0, band);
                h_zeta0 = adapt_scales(win_zeta0.rate(), h_zeta0, band);
                win_mu0 = Rate::default();
                win_zeta0 = Rate::default();
            }
            scale_history.push(snapshot(it + 1, &h_w, &h_mu, &h_sigma, h_mu0, h_zeta0));
        }

        if !burning && (it - cfg.burn_in) % cfg.thin == 0 {
            draws.push(Draw {
                params: params.clone(),
                hyper: (cfg.prior_mode == PriorMode::Hierarchical).then_some(hyper),
                log_posterior: lik.total + lp,
            });
        }
    }

    let mut trace = ChainTrace {
        k,
        family,
        prior_mode: cfg.prior_mode,
        seed: cfg.seed,
        data: summary,
        draws,
        acceptance,
        scale_history,
        report: DiagnosticsReport::default(),
    };
    trace.report = diagnose(&trace, &cfg.thresholds)?;
    Ok(trace)
}
