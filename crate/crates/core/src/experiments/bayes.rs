use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::hierarchical::HierarchicalHyper;
use crate::mcmc::{derive_seed, log_posterior, relabel_draw, run_chain, McmcConfig, PriorMode};
use crate::mixture::{ComponentFamily, Dataset, MixtureParams};

/// Number of components and their family for one side of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub k: usize,
    pub family: ComponentFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BridgeConfig {
    pub mcmc: McmcConfig,
    /// Posterior draws used by the estimator (evenly thinned); the same
    /// number of proposal draws is generated.
    pub draws: usize,
    /// Disjoint batches used for the Monte Carlo standard error.
    pub batches: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self {
            mcmc: McmcConfig::default(),
            draws: 2000,
            batches: 10,
            max_iterations: 1000,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalLikelihood {
    pub log_value: f64,
    /// Batch-means standard error of `log_value`.
    pub se: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesFactor {
    pub spec_a: ModelSpec,
    pub spec_b: ModelSpec,
    pub a: MarginalLikelihood,
    pub b: MarginalLikelihood,
    /// `ln m_A − ln m_B`.
    pub log_bf: f64,
    pub se_log_bf: f64,
    pub bf: f64,
}

/// Unconstrained coordinates: additive log-ratios of the weights against the
/// last one, locations, log scales, then `μ0` and `ln ζ0` when sampled.
struct Coordinates {
    k: usize,
    family: ComponentFamily,
    hyper: bool,
}

impl Coordinates {
    fn dim(&self) -> usize {
        3 * self.k - 1 + if self.hyper { 2 } else { 0 }
    }

    fn encode(&self, p: &MixtureParams, h: Option<&HierarchicalHyper>) -> Option<Vec<f64>> {
        let k = self.k;
        let last = p.weights[k - 1].ln();
        let mut u: Vec<f64> = p.weights[..k - 1].iter().map(|w| w.ln() - last).collect();
        u.extend(&p.locations);
        u.extend(p.scales.iter().map(|s| s.ln()));
        if self.hyper {
            let h = h?;
            u.push(h.mu0);
            u.push(h.zeta0.ln());
        }
        u.iter().all(|v| v.is_finite()).then_some(u)
    }

    /// Parameters at `u` and `ln |∂θ/∂u|`.
    fn decode(&self, u: &[f64]) -> (MixtureParams, Option<HierarchicalHyper>, f64) {
        let k = self.k;
        let top = u[..k - 1].iter().copied().fold(0.0, f64::max);
        let mut weights: Vec<f64> = u[..k - 1].iter().map(|v| (v - top).exp()).collect();
        weights.push((-top).exp());
        let z: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= z);
        let locations = u[k - 1..2 * k - 1].to_vec();
        let log_scales = &u[2 * k - 1..3 * k - 1];
        let scales: Vec<f64> = log_scales.iter().map(|v| v.exp()).collect();
        let mut log_jac: f64 =
            weights.iter().map(|w| w.ln()).sum::<f64>() + log_scales.iter().sum::<f64>();
        let hyper = self.hyper.then(|| {
            let log_zeta = u[3 * k];
            log_jac += log_zeta;
            HierarchicalHyper {
                mu0: u[3 * k - 1],
                zeta0: log_zeta.exp(),
            }
        });
        let params = MixtureParams {
            weights,
            locations,
            scales,
            family: self.family,
            component_families: None,
        };
        (params, hyper, log_jac)
    }
}

/// Moment-matched multivariate normal proposal.
struct Proposal {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl Proposal {
    fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let d = samples[0].len();
        let n = samples.len() as f64;
        let mut mean = DVector::zeros(d);
        for s in samples {
            mean += DVector::from_column_slice(s);
        }
        mean /= n;
        let mut cov = DMatrix::zeros(d, d);
        for s in samples {
            let c = DVector::from_column_slice(s) - &mean;
            cov += &c * c.transpose();
        }
        cov /= n - 1.0;
        // a ridge keeps directions the chain barely moved in usable
        let ridge = 1e-8 * cov.diagonal().max().max(1e-300);
        for i in 0..d {
            cov[(i, i)] += ridge;
        }
        let chol = cov
            .cholesky()
            .ok_or_else(|| {
                Error::Estimator("posterior covariance is not positive definite".into())
            })?
            .l();
        let log_det: f64 = chol.diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
        let log_norm = -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        Ok(Self {
            mean,
            chol,
            log_norm,
        })
    }

    fn log_pdf(&self, u: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(u) - &self.mean;
        let z = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor has a positive diagonal");
        self.log_norm - 0.5 * z.norm_squared()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let z = DVector::from_iterator(
            self.mean.len(),
            (0..self.mean.len()).map(|_| StandardNormal.sample(rng)),
        );
        (&self.mean + &self.chol * z).iter().copied().collect()
    }
}

/// Iterative bridge estimate of `ln Z` from log ratios `l = ln p̃ − ln q` at
/// posterior draws (`post`) and proposal draws (`prop`).
fn bridge(post: &[f64], prop: &[f64], max_iter: usize, tol: f64) -> Result<(f64, usize)> {
    let n1 = post.len() as f64;
    let n2 = prop.len() as f64;
    let s1 = n1 / (n1 + n2);
    let s2 = n2 / (n1 + n2);
    let mut sorted = post.to_vec();
    sorted.sort_by(f64::total_cmp);
    let shift = sorted[sorted.len() / 2];
    // ln r with r = Z / e^shift
    let mut log_r = 0.0;
    let ln_add = |a: f64, b: f64| {
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            m
        } else {
            m + ((a - m).exp() + (b - m).exp()).ln()
        }
    };
    for it in 1..=max_iter {
        let c = s2.ln() + log_r;
        let num: Vec<f64> = prop
            .iter()
            .map(|&l| {
                let l = l - shift;
                l - ln_add(s1.ln() + l, c)
            })
            .collect();
        let den: Vec<f64> = post
            .iter()
            .map(|&l| -ln_add(s1.ln() + (l - shift), c))
            .collect();
        let next = crate::mixture::log_sum_exp(&num)
            - n2.ln()
            - (crate::mixture::log_sum_exp(&den) - n1.ln());
        if !next.is_finite() {
            return Err(Error::Estimator(format!(
                "bridge iterate became {next} at iteration {it}"
            )));
        }
        if (next - log_r).abs() < tol {
            return Ok((next + shift, it));
        }
        log_r = next;
    }
    Err(Error::Estimator(format!(
        "bridge iteration did not settle within {max_iter} steps (last ln Z {})",
        log_r + shift
    )))
}

/// Bridge-sampling estimate of the log marginal likelihood of `spec`, using
/// the sampler's unnormalized posterior. Draws are relabelled by decreasing
/// weight; the target is restricted to that ordered region and multiplied
/// by `k!`, which leaves its integral unchanged.
pub fn log_marginal_likelihood(
    data: &Dataset,
    spec: ModelSpec,
    cfg: &BridgeConfig,
    seed: u64,
) -> Result<MarginalLikelihood> {
    if cfg.draws < 2 * cfg.batches.max(1) || cfg.batches == 0 {
        return Err(Error::Argument(
            "need at least two draws per batch and one batch".into(),
        ));
    }
    let mcmc = McmcConfig {
        seed: derive_seed(seed, 0),
        ..cfg.mcmc.clone()
    };
    let trace = run_chain(data, spec.k, spec.family, &mcmc)?;
    let coords = Coordinates {
        k: spec.k,
        family: spec.family,
        hyper: mcmc.prior_mode == PriorMode::Hierarchical && mcmc.fixed_hyper.is_none(),
    };
    let fixed_hyper = mcmc.fixed_hyper.unwrap_or(HierarchicalHyper {
        mu0: trace.data.mean,
        zeta0: trace.data.sd,
    });
    let stride = (trace.draws.len() / cfg.draws).max(1);
    let post: Vec<Vec<f64>> = trace
        .draws
        .iter()
        .step_by(stride)
        .take(cfg.draws)
        .filter_map(|d| {
            let d = relabel_draw(d);
            coords.encode(&d.params, d.hyper.as_ref())
        })
        .collect();
    if post.len() < 2 * cfg.batches || post.len() <= coords.dim() {
        return Err(Error::Estimator(format!(
            "only {} usable posterior draws for a {}-dimensional proposal",
            post.len(),
            coords.dim()
        )));
    }
    let proposal = Proposal::fit(&post)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let prop: Vec<Vec<f64>> = (0..post.len()).map(|_| proposal.sample(&mut rng)).collect();

    let log_k_fact = ln_gamma(spec.k as f64 + 1.0);
    let log_target = |u: &[f64]| -> f64 {
        let (params, hyper, log_jac) = coords.decode(u);
        let ordered = params.weights.windows(2).all(|w| w[0] >= w[1]);
        if !ordered || params.validate().is_err() {
            return f64::NEG_INFINITY;
        }
        let h = hyper.unwrap_or(fixed_hyper);
        log_k_fact + log_posterior(data, &params, &h, mcmc.prior_mode, &mcmc.integrator) + log_jac
    };
    let ratio = |u: &Vec<f64>| log_target(u) - proposal.log_pdf(u);
    let l_post: Vec<f64> = post.par_iter().map(ratio).collect();
    let l_prop: Vec<f64> = prop.par_iter().map(ratio).collect();
    if l_post.iter().any(|v| !v.is_finite()) {
        return Err(Error::Estimator(
            "posterior draw with non-finite target density".into(),
        ));
    }
    let (log_value, iterations) = bridge(&l_post, &l_prop, cfg.max_iterations, cfg.tolerance)?;

    let b = cfg.batches;
    let size1 = l_post.len() / b;
    let size2 = l_prop.len() / b;
    let parts: Vec<f64> = (0..b)
        .map(|i| {
            bridge(
                &l_post[i * size1..(i + 1) * size1],
                &l_prop[i * size2..(i + 1) * size2],
                cfg.max_iterations,
                cfg.tolerance,
            )
            .map(|r| r.0)
        })
        .collect::<Result<_>>()?;
    let mean = parts.iter().sum::<f64>() / b as f64;
    let var = parts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b as f64 - 1.0).max(1.0);
    Ok(MarginalLikelihood {
        log_value,
        se: (var / b as f64).sqrt(),
        iterations,
    })
}

/// Bayes factor of `spec_a` against `spec_b` on `data`, by bridge sampling.
/// Each side gets its own chain and proposal seeds derived from `seed`.
pub fn bayes_factor(
    data: &Dataset,
    spec_a: ModelSpec,
    spec_b: ModelSpec,
    cfg: &BridgeConfig,
    seed: u64,
) -> Result<BayesFactor> {
    let a = log_marginal_likelihood(data, spec_a, cfg, derive_seed(seed, 0))?;
    let b = log_marginal_likelihood(data, spec_b, cfg, derive_seed(seed, 1))?;
    let log_bf = a.log_value - b.log_value;
    Ok(BayesFactor {
        spec_a,
        spec_b,
        a,
        b,
        log_bf,
        se_log_bf: a.se.hypot(b.se),
        bf: log_bf.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        let c = Coordinates {
            k: 3,
            family: ComponentFamily::Gaussian,
            hyper: true,
        };
        let p =
            MixtureParams::gaussian(&[0.5, 0.3, 0.2], &[-1.0, 0.0, 2.0], &[1.0, 0.5, 2.0]).unwrap();
        let h = HierarchicalHyper::new(0.3, 1.5).unwrap();
        let u = c.encode(&p, Some(&h)).unwrap();
        assert_eq!(u.len(), c.dim());
        let (q, g, _) = c.decode(&u);
        for l in 0..3 {
            assert!((q.weights[l] - p.weights[l]).abs() < 1e-14);
            assert!((q.scales[l] - p.scales[l]).abs() < 1e-14);
        }
        let g = g.unwrap();
        assert!((g.zeta0 - 1.5).abs() < 1e-14 && g.mu0 == 0.3);
    }

    #[test]
    fn bridge_recovers_gaussian_normalizer() {
        // p̃(u) = 5·N(u; 0, 1), q = N(0, 1.5²)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ln_c = 5f64.ln();
        let lnq =
            |u: f64| -0.5 * (u / 1.5).powi(2) - (1.5 * (2.0 * std::f64::consts::PI).sqrt()).ln();
        let lnp = |u: f64| ln_c - 0.5 * u * u - (2.0 * std::f64::consts::PI).sqrt().ln();
        let post: Vec<f64> = (0..4000)
            .map(|_| {
                let u: f64 = StandardNormal.sample(&mut rng);
                lnp(u) - lnq(u)
            })
            .collect();
        let prop: Vec<f64> = (0..4000)
            .map(|_| {
                let u: f64 = 1.5 * Distribution::<f64>::sample(&StandardNormal, &mut rng);
                lnp(u) - lnq(u)
            })
            .collect();
        let (z, _) = bridge(&post, &prop, 1000, 1e-12).unwrap();
        assert!((z - ln_c).abs() < 0.02, "{z} vs {ln_c}");
    }
}
