//! Jeffreys-type priors, all unnormalized and on the log scale.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::fisher::{fim, IntegratorConfig, Param, Scenario};
use crate::mixture::MixtureParams;
use crate::quadrature::{gauss_kronrod, GkOptions};

/// Weights closer than this to the simplex boundary are clamped before the
/// information matrix is evaluated.
pub const BOUNDARY_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPriorValue {
    pub value: f64,
    /// Some eigenvalue of the information matrix was clamped.
    pub jittered: bool,
}

/// `½ ln det I(θ)` for the unknowns of `scenario`.
pub fn log_jeffreys(
    params: &MixtureParams,
    scenario: &Scenario,
    cfg: &IntegratorConfig,
) -> Result<LogPriorValue> {
    let h = fim(params, scenario, cfg)?.half_log_det()?;
    Ok(LogPriorValue {
        value: h.value,
        jittered: h.jittered,
    })
}

/// Jeffreys prior in the reference chart with the scale ratios held fixed:
/// `½ ln det` of the information on `(p, q.., μ, τ, δ_2..δ_k)`.
pub fn log_jeffreys_fixed_ratios(
    params: &MixtureParams,
    cfg: &IntegratorConfig,
) -> Result<LogPriorValue> {
    let full = fim(params, &Scenario::reference(params.k()), cfg)?;
    let keep: Vec<usize> = full
        .ordering
        .iter()
        .enumerate()
        .filter(|(_, p)| !matches!(p, Param::Ratio(_)))
        .map(|(i, _)| i)
        .collect();
    let h = full.submatrix(&keep).half_log_det()?;
    Ok(LogPriorValue {
        value: h.value,
        jittered: h.jittered,
    })
}

fn identical_components(c: &MixtureParams) -> bool {
    c.locations.iter().all(|&m| m == c.locations[0]) && c.scales.iter().all(|&s| s == c.scales[0])
}

/// Jeffreys prior of the weights with the component parameters of
/// `components` held fixed (its own weights are ignored).
///
/// Weights on the boundary are clamped to [`BOUNDARY_EPS`] and renormalized.
/// When every component coincides the information vanishes identically; the
/// prior is then its limit along shrinking separations, which is uniform, and
/// 0 is returned.
pub fn log_jeffreys_weights(
    weights: &[f64],
    components: &MixtureParams,
    cfg: &IntegratorConfig,
) -> Result<LogPriorValue> {
    let k = components.k();
    if weights.len() != k {
        return Err(Error::Argument(format!(
            "{} weights for {k} components",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::ParameterDomain(format!("weight {w} outside [0, 1]")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::ParameterDomain(format!("weights sum to {sum}")));
    }
    if k == 1 || identical_components(components) {
        return Ok(LogPriorValue {
            value: 0.0,
            jittered: false,
        });
    }
    let on_boundary = weights.iter().any(|&w| w < BOUNDARY_EPS);
    let clamped = clamp_to_interior(weights);
    let params = MixtureParams {
        weights: clamped,
        ..components.clone()
    };
    let result = fim(&params, &Scenario::weights_only(k), cfg).and_then(|f| f.half_log_det());
    match result {
        Ok(h) => Ok(LogPriorValue {
            value: h.value,
            jittered: h.jittered,
        }),
        Err(Error::DegenerateInformation(msg)) if on_boundary => {
            Err(Error::BoundaryEvaluation(format!(
                "{msg}; weights on the simplex boundary were clamped to {BOUNDARY_EPS:e}, \
                 evaluate at an interior point and take the limit instead"
            )))
        }
        Err(e) => Err(e),
    }
}

/// Raise weights below [`BOUNDARY_EPS`] to it, taking the excess from the
/// largest weight.
pub(crate) fn clamp_to_interior(weights: &[f64]) -> Vec<f64> {
    let mut w = weights.to_vec();
    let mut excess = 0.0;
    for v in w.iter_mut() {
        if *v < BOUNDARY_EPS {
            excess += BOUNDARY_EPS - *v;
            *v = BOUNDARY_EPS;
        }
    }
    if excess > 0.0 {
        let big = (0..w.len())
            .max_by(|&a, &b| w[a].total_cmp(&w[b]))
            .expect("non-empty");
        w[big] -= excess;
    }
    w
}

/// Normalized Dirichlet(½, …, ½) log-density.
pub fn log_dirichlet_half(p: &[f64]) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::Argument("Dirichlet density needs k >= 2".into()));
    }
    if let Some(w) = p.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return Err(Error::ParameterDomain(format!(
            "weight {w} is not strictly inside (0, 1)"
        )));
    }
    let k = p.len() as f64;
    let norm = ln_gamma(0.5 * k) - k * ln_gamma(0.5);
    Ok(norm - 0.5 * p.iter().map(|w| w.ln()).sum::<f64>())
}

/// Closed-form Jeffreys prior of the two-piece location-scale model,
/// `1 / (σ1 σ2 (σ1 + σ2))`. The location does not enter.
pub fn log_rubio_steel(_mu: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 > 0.0 && sigma2 > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "scales must be positive, got ({sigma1}, {sigma2})"
        )));
    }
    Ok(-(sigma1.ln() + sigma2.ln() + (sigma1 + sigma2).ln()))
}

/// Jeffreys prior of the standardized offset `δ` of a two-component Gaussian
/// mixture with only locations unknown, the first location fixed:
///
/// ```text
/// ½ ln ∫ [(1-p) x e^{-x²/2}]² / (pσ e^{-σ²(x + δ/(στ))²/2} + (1-p) e^{-x²/2}) dx
/// ```
pub fn log_delta_conditional(
    delta: f64,
    p: f64,
    sigma: f64,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if !(sigma > 0.0 && tau > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "scales must be positive, got sigma={sigma}, tau={tau}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ParameterDomain(format!("p={p} outside (0, 1)")));
    }
    let rel_tol = match cfg.method {
        crate::fisher::Method::GaussKronrod { rel_tol } => rel_tol,
        _ => 1e-12,
    };
    let shift = delta / (sigma * tau);
    let (ln_a, ln_b) = ((p * sigma).ln(), (1.0 - p).ln());
    let f = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let u = x + shift;
        let t1 = ln_a - 0.5 * sigma * sigma * u * u;
        let t2 = ln_b - 0.5 * x * x;
        let m = t1.max(t2);
        let ln_den = m + ((t1 - m).exp() + (t2 - m).exp()).ln();
        (2.0 * (ln_b + x.abs().ln()) - x * x - ln_den).exp()
    };
    // the integrand is bounded by (1-p) x² e^{-x²/2}, negligible past |x| = 40
    let mut pts = vec![-40.0, -3.0, 0.0, 3.0, 40.0];
    for c in [-3.0, 0.0, 3.0] {
        let x = -shift + c / sigma;
        if x.abs() < 40.0 {
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = gauss_kronrod(
        f,
        &pts,
        GkOptions {
            rel_tol,
            ..GkOptions::default()
        },
    )
    .map_err(|e| e.with_context(format!("delta prior at delta={delta}")))?;
    Ok(0.5 * r.value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::ComponentFamily;

    fn gk() -> IntegratorConfig {
        IntegratorConfig::gauss_kronrod(1e-10)
    }

    #[test]
    fn single_gaussian_scale_dependence() {
        let s = Scenario::all_params(1);
        let a = MixtureParams::gaussian(&[1.0], &[0.0], &[1.0]).unwrap();
        let b = MixtureParams::gaussian(&[1.0], &[0.0], &[2.0]).unwrap();
        let la = log_jeffreys(&a, &s, &gk()).unwrap().value;
        let lb = log_jeffreys(&b, &s, &gk()).unwrap().value;
        assert!((la - 0.5 * 2f64.ln()).abs() < 1e-8);
        assert!((lb - la + 2.0 * 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn two_component_reference_scaling() {
        let base = MixtureParams::gaussian(&[0.4, 0.6], &[0.0, 1.5], &[1.0, 0.8]).unwrap();
        let s = Scenario::reference(2);
        let l0 = log_jeffreys(&base, &s, &gk()).unwrap().value;
        for c in [2.0, 5.0] {
            let scaled =
                MixtureParams::gaussian(&[0.4, 0.6], &[0.0, 1.5 * c], &[c, 0.8 * c]).unwrap();
            let l = log_jeffreys(&scaled, &s, &gk()).unwrap().value;
            assert!((l - l0 + 2.0 * c.ln()).abs() < 1e-3, "c={c}: {}", l - l0);
        }
    }

    #[test]
    fn shift_invariance() {
        let a = MixtureParams::gaussian(&[0.4, 0.6], &[0.0, 1.5], &[1.0, 0.8]).unwrap();
        let b = MixtureParams::gaussian(&[0.4, 0.6], &[5.0, 6.5], &[1.0, 0.8]).unwrap();
        let s = Scenario::all_params(2);
        let la = log_jeffreys(&a, &s, &gk()).unwrap().value;
        let lb = log_jeffreys(&b, &s, &gk()).unwrap().value;
        assert!((la - lb).abs() < 1e-5);
    }

    #[test]
    fn weights_prior_symmetric_for_mirrored_components() {
        let c = MixtureParams::gaussian(&[0.5, 0.5], &[-10.0, 10.0], &[1.0, 1.0]).unwrap();
        let cfg = IntegratorConfig::riemann(550);
        for p in [0.1, 0.3, 0.45] {
            let a = log_jeffreys_weights(&[p, 1.0 - p], &c, &cfg).unwrap().value;
            let b = log_jeffreys_weights(&[1.0 - p, p], &c, &cfg).unwrap().value;
            assert!((a - b).abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn identical_components_give_flat_prior() {
        let same = MixtureParams::gaussian(&[0.5, 0.5], &[1.0, 1.0], &[2.0, 2.0]).unwrap();
        let cfg = IntegratorConfig::default();
        let v = log_jeffreys_weights(&[0.2, 0.8], &same, &cfg).unwrap();
        assert_eq!(v.value, 0.0);
        // nearly identical components approach the same flat limit
        let near = MixtureParams::gaussian(&[0.5, 0.5], &[1.0, 1.001], &[2.0, 2.0]).unwrap();
        let vals: Vec<f64> = (1..10)
            .map(|i| {
                let p = i as f64 / 10.0;
                log_jeffreys_weights(&[p, 1.0 - p], &near, &cfg)
                    .unwrap()
                    .value
                    .exp()
            })
            .collect();
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!((hi - lo) / hi < 0.01, "{vals:?}");
    }

    #[test]
    fn weights_determinant_bound() {
        let c = MixtureParams::gaussian(&[0.5, 0.5], &[0.0, 1.0], &[1.0, 0.5]).unwrap();
        let cfg = IntegratorConfig::riemann(550);
        for i in 1..50 {
            let p = i as f64 / 50.0;
            let v = log_jeffreys_weights(&[p, 1.0 - p], &c, &cfg).unwrap().value;
            assert!(2.0 * v <= -(p.ln() + (1.0 - p).ln()) + 1e-9);
        }
    }

    #[test]
    fn boundary_weights_are_clamped() {
        let c = MixtureParams::gaussian(&[0.5, 0.5], &[0.0, 3.0], &[1.0, 1.0]).unwrap();
        let cfg = IntegratorConfig::riemann(550);
        let v = log_jeffreys_weights(&[1.0, 0.0], &c, &cfg).unwrap();
        let near = log_jeffreys_weights(&[1.0 - BOUNDARY_EPS, BOUNDARY_EPS], &c, &cfg).unwrap();
        assert!((v.value - near.value).abs() < 1e-9);
    }

    #[test]
    fn heavy_tail_component_attracts_weight() {
        let c = MixtureParams::heterogeneous(
            vec![0.5, 0.5],
            vec![-10.0, 10.0],
            vec![1.0, 1.0],
            vec![
                ComponentFamily::Gaussian,
                ComponentFamily::StudentT { df: 1.0 },
            ],
        )
        .unwrap();
        let cfg = IntegratorConfig::gauss_kronrod(1e-8);
        let dens: Vec<f64> = (1..100)
            .map(|i| {
                let p = i as f64 / 100.0;
                log_jeffreys_weights(&[p, 1.0 - p], &c, &cfg)
                    .unwrap()
                    .value
                    .exp()
            })
            .collect();
        let below: f64 = dens[..49].iter().sum();
        let above: f64 = dens[50..].iter().sum();
        assert!(above > below, "above {above} below {below}");
    }

    #[test]
    fn dirichlet_half_values() {
        let pi = std::f64::consts::PI;
        // Beta(½, ½) density 1 / (π √(p(1-p)))
        let beta = |p: f64| -(pi * (p * (1.0 - p)).sqrt()).ln();
        assert!((log_dirichlet_half(&[0.5, 0.5]).unwrap() - (2.0 / pi).ln()).abs() < 1e-12);
        let v = log_dirichlet_half(&[0.9, 0.1]).unwrap();
        assert!((v - beta(0.9)).abs() < 1e-12);
        assert!((v - (1.0 / (pi * 0.09f64.sqrt())).ln()).abs() < 1e-12);
        let a = log_dirichlet_half(&[0.2, 0.3, 0.5]).unwrap();
        let b = log_dirichlet_half(&[0.5, 0.2, 0.3]).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(log_dirichlet_half(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn rubio_steel_values() {
        assert!((log_rubio_steel(0.0, 1.0, 1.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let a = log_rubio_steel(3.0, 0.7, 1.9).unwrap();
        let b = log_rubio_steel(-8.0, 0.7 * 4.0, 1.9 * 4.0).unwrap();
        assert!((b - a + 3.0 * 4f64.ln()).abs() < 1e-12);
        assert!(log_rubio_steel(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn delta_prior_at_origin() {
        // closed form at δ = 0, p = ½, σ = τ = 1: ½ ln(√(2π) / 4)
        let want = -0.233_677_913_957_608_94;
        let got = log_delta_conditional(0.0, 0.5, 1.0, 1.0, &gk()).unwrap();
        assert!((got - want).abs() < 1e-10, "{got}");
    }

    #[test]
    fn delta_prior_symmetry_and_flattening() {
        let cfg = gk();
        for d in [0.5, 2.0, 7.0] {
            let a = log_delta_conditional(d, 0.5, 1.0, 1.0, &cfg).unwrap();
            let b = log_delta_conditional(-d, 0.5, 1.0, 1.0, &cfg).unwrap();
            assert!((a - b).abs() < 1e-5);
        }
        let a = log_delta_conditional(40.0, 0.5, 1.0, 1.0, &cfg).unwrap();
        let b = log_delta_conditional(50.0, 0.5, 1.0, 1.0, &cfg).unwrap();
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn fixed_ratio_prior_scales_like_reference_scale() {
        let a = MixtureParams::gaussian(&[0.4, 0.6], &[0.0, 1.5], &[1.0, 0.8]).unwrap();
        let b = MixtureParams::gaussian(&[0.4, 0.6], &[0.0, 3.0], &[2.0, 1.6]).unwrap();
        let la = log_jeffreys_fixed_ratios(&a, &gk()).unwrap().value;
        let lb = log_jeffreys_fixed_ratios(&b, &gk()).unwrap().value;
        assert!((lb - la + 2.0 * 2f64.ln()).abs() < 1e-6, "{}", lb - la);
    }
}
