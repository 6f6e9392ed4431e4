//! Expected Fisher information of a mixture, element by element.
//!
//! Every element is a one-dimensional integral
//! `∫ ∂_i g(x) ∂_j g(x) / g(x) dx` with `g` the mixture density. The score
//! `∂_i g / g` is evaluated in closed form per family, so the integrand is
//! computed as `g · (∂_i ln g)(∂_j ln g)` and set to 0 wherever `ln g < -700`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{draw, natural_jacobian, to_reparam, MixtureParams};
use crate::quadrature::{gauss_kronrod_real_line, riemann, GkOptions};

pub const DEFAULT_RIEMANN_POINTS: usize = 550;
pub const DEFAULT_MC_SAMPLES: usize = 1500;
pub const DEFAULT_SIGMA_SWITCH: f64 = 0.05;
pub const DEFAULT_GK_REL_TOL: f64 = 1e-10;
/// Below this log-density the integrand is treated as 0 (0/0 regions).
pub const LOG_DENSITY_FLOOR: f64 = -700.0;
const DENSITY_FLOOR: f64 = 9.859676543759770e-305;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unknowns {
    WeightsOnly,
    LocationsOnly,
    AllParams,
}

/// Coordinate system for [`Unknowns::AllParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `(p_1..p_{k-1}, μ_1..μ_k, σ_1..σ_k)`
    #[default]
    Natural,
    /// `(p, q_1..q_{k-2}, μ, τ, δ_2..δ_k, s_2..s_k)`, see [`crate::mixture::ReparamParams`].
    Reference,
}

/// One coordinate of a parameter chart. Component indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "param", content = "component", rename_all = "snake_case")]
pub enum Param {
    Weight(usize),
    Location(usize),
    Scale(usize),
    FirstWeight,
    Stick(usize),
    RefLocation,
    RefScale,
    Offset(usize),
    Ratio(usize),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Weight(l) => write!(f, "p{}", l + 1),
            Param::Location(l) => write!(f, "mu{}", l + 1),
            Param::Scale(l) => write!(f, "sigma{}", l + 1),
            Param::FirstWeight => write!(f, "p"),
            Param::Stick(l) => write!(f, "q{}", l + 1),
            Param::RefLocation => write!(f, "mu"),
            Param::RefScale => write!(f, "tau"),
            Param::Offset(l) => write!(f, "delta{}", l + 1),
            Param::Ratio(l) => write!(f, "s{}", l + 1),
        }
    }
}

/// Which parameters are unknown, fixing the dimension and ordering of the FIM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub unknowns: Unknowns,
    #[serde(default)]
    pub chart: Chart,
    pub k: usize,
}

impl Scenario {
    pub fn new(unknowns: Unknowns, k: usize) -> Self {
        Self {
            unknowns,
            chart: Chart::Natural,
            k,
        }
    }

    pub fn weights_only(k: usize) -> Self {
        Self::new(Unknowns::WeightsOnly, k)
    }

    pub fn locations_only(k: usize) -> Self {
        Self::new(Unknowns::LocationsOnly, k)
    }

    pub fn all_params(k: usize) -> Self {
        Self::new(Unknowns::AllParams, k)
    }

    pub fn reference(k: usize) -> Self {
        Self {
            unknowns: Unknowns::AllParams,
            chart: Chart::Reference,
            k,
        }
    }

    pub fn dim(&self) -> usize {
        match self.unknowns {
            Unknowns::WeightsOnly => self.k - 1,
            Unknowns::LocationsOnly => self.k,
            Unknowns::AllParams => 3 * self.k - 1,
        }
    }

    pub fn ordering(&self) -> Vec<Param> {
        let k = self.k;
        match (self.unknowns, self.chart) {
            (Unknowns::WeightsOnly, _) => (0..k - 1).map(Param::Weight).collect(),
            (Unknowns::LocationsOnly, _) => (0..k).map(Param::Location).collect(),
            (Unknowns::AllParams, Chart::Natural) => (0..k - 1)
                .map(Param::Weight)
                .chain((0..k).map(Param::Location))
                .chain((0..k).map(Param::Scale))
                .collect(),
            (Unknowns::AllParams, Chart::Reference) => {
                let mut v = Vec::with_capacity(3 * k - 1);
                if k > 1 {
                    v.push(Param::FirstWeight);
                    v.extend((0..k.saturating_sub(2)).map(Param::Stick));
                }
                v.push(Param::RefLocation);
                v.push(Param::RefScale);
                v.extend((1..k).map(Param::Offset));
                v.extend((1..k).map(Param::Ratio));
                v
            }
        }
    }

    fn check(&self, params: &MixtureParams) -> Result<()> {
        if self.k != params.k() {
            return Err(Error::Argument(format!(
                "scenario is for k={}, params have k={}",
                self.k,
                params.k()
            )));
        }
        if self.chart == Chart::Reference && self.unknowns != Unknowns::AllParams {
            return Err(Error::Argument(
                "the reference chart is only defined with all parameters unknown".into(),
            ));
        }
        Ok(())
    }

    /// The same unknowns in the natural chart.
    fn natural(&self) -> Scenario {
        Scenario {
            chart: Chart::Natural,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Riemann when every scale reaches the switch threshold, Monte Carlo otherwise.
    Auto,
    Riemann {
        points: usize,
    },
    MonteCarlo {
        samples: usize,
    },
    GaussKronrod {
        rel_tol: f64,
    },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Auto => write!(f, "auto"),
            Method::Riemann { points } => write!(f, "riemann:{points}"),
            Method::MonteCarlo { samples } => write!(f, "mc:{samples}"),
            Method::GaussKronrod { rel_tol } => write!(f, "gk:{rel_tol:e}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `riemann:N`, `mc:N`, `gk:TOL` or `auto`; the numeric part is optional.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Argument(format!("invalid integration method {s:?}"));
        let count = |a: Option<&str>, default: usize| -> Result<usize> {
            match a {
                None => Ok(default),
                Some(a) => a.parse().ok().filter(|n| *n > 0).ok_or_else(bad),
            }
        };
        match name {
            "auto" if arg.is_none() => Ok(Method::Auto),
            "riemann" => Ok(Method::Riemann {
                points: count(arg, DEFAULT_RIEMANN_POINTS)?,
            }),
            "mc" => Ok(Method::MonteCarlo {
                samples: count(arg, DEFAULT_MC_SAMPLES)?,
            }),
            "gk" => {
                let rel_tol = match arg {
                    None => DEFAULT_GK_REL_TOL,
                    Some(a) => a.parse().ok().filter(|t: &f64| *t > 0.0).ok_or_else(bad)?,
                };
                Ok(Method::GaussKronrod { rel_tol })
            }
            _ => Err(bad()),
        }
    }
}

/// Truncation of the real line used by Riemann sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundsPolicy {
    /// Per-family standardized interval (Gaussian: ±8σ; Gumbel: −4σ..35σ).
    #[default]
    Family,
    /// `[min(μ − cσ), max(μ + cσ)]`
    SigmaMultiple {
        c: f64,
    },
    Fixed {
        lo: f64,
        hi: f64,
    },
}

impl BoundsPolicy {
    pub fn interval(&self, params: &MixtureParams) -> (f64, f64) {
        match *self {
            BoundsPolicy::Family => params.truncation_bounds(),
            BoundsPolicy::SigmaMultiple { c } => {
                let lo = params
                    .locations
                    .iter()
                    .zip(&params.scales)
                    .map(|(m, s)| m - c * s)
                    .fold(f64::INFINITY, f64::min);
                let hi = params
                    .locations
                    .iter()
                    .zip(&params.scales)
                    .map(|(m, s)| m + c * s)
                    .fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            BoundsPolicy::Fixed { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub bounds: BoundsPolicy,
    pub sigma_switch_threshold: f64,
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            bounds: BoundsPolicy::Family,
            sigma_switch_threshold: DEFAULT_SIGMA_SWITCH,
            seed: 0x5eed,
        }
    }
}

impl IntegratorConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn riemann(points: usize) -> Self {
        Self::with_method(Method::Riemann { points })
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            seed,
            ..Self::with_method(Method::MonteCarlo { samples })
        }
    }

    pub fn gauss_kronrod(rel_tol: f64) -> Self {
        Self::with_method(Method::GaussKronrod { rel_tol })
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Riemann { points: 0 } | Method::MonteCarlo { samples: 0 } => Err(
                Error::Argument("integrator needs at least one point".into()),
            ),
            Method::GaussKronrod { rel_tol } if !(rel_tol > 0.0) => Err(Error::Argument(
                "Gauss-Kronrod tolerance must be positive".into(),
            )),
            _ if !(self.sigma_switch_threshold > 0.0) => Err(Error::Argument(
                "sigma switch threshold must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Resolve [`Method::Auto`]: Riemann(550) when `min σ ≥ threshold`
/// (boundary inclusive), Monte Carlo(1500) otherwise. Explicit methods pass
/// through unchanged.
pub fn select_integrator(params: &MixtureParams, cfg: &IntegratorConfig) -> IntegratorConfig {
    let method = match cfg.method {
        Method::Auto => {
            let min_scale = params.scales.iter().copied().fold(f64::INFINITY, f64::min);
            if min_scale >= cfg.sigma_switch_threshold {
                Method::Riemann {
                    points: DEFAULT_RIEMANN_POINTS,
                }
            } else {
                Method::MonteCarlo {
                    samples: DEFAULT_MC_SAMPLES,
                }
            }
        }
        m => m,
    };
    IntegratorConfig { method, ..*cfg }
}

/// Symmetric matrix of expected-information elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
    pub ordering: Vec<Param>,
}

/// `½ ln det` together with whether eigenvalues had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLogDet {
    pub value: f64,
    pub jittered: bool,
}

impl FisherMatrix {
    pub fn from_dmatrix(m: &DMatrix<f64>, ordering: Vec<Param>) -> Self {
        let dim = m.nrows();
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect();
        Self {
            dim,
            entries,
            ordering,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dmatrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Rows/columns at `indices`, in that order.
    pub fn submatrix(&self, indices: &[usize]) -> FisherMatrix {
        let m = self
            .to_dmatrix()
            .select_rows(indices)
            .select_columns(indices);
        FisherMatrix::from_dmatrix(&m, indices.iter().map(|&i| self.ordering[i]).collect())
    }

    /// `½ ln det` through a symmetric eigendecomposition.
    ///
    /// Eigenvalues below `1e-12·λ_max` are clamped to that floor and the
    /// result is flagged as jittered; a matrix more negative than
    /// `−1e-8·λ_max`, or with no positive eigenvalue, is degenerate.
    /// An empty matrix has determinant 1.
    pub fn half_log_det(&self) -> Result<HalfLogDet> {
        if self.dim == 0 {
            return Ok(HalfLogDet {
                value: 0.0,
                jittered: false,
            });
        }
        if self.entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInformation(
                "non-finite Fisher information element".into(),
            ));
        }
        let ev = self.eigenvalues();
        let lambda_max = *ev.last().expect("dim > 0");
        if !(lambda_max > 0.0) {
            return Err(Error::DegenerateInformation(format!(
                "largest eigenvalue {lambda_max:e} is not positive"
            )));
        }
        if ev[0] < -1e-8 * lambda_max {
            return Err(Error::DegenerateInformation(format!(
                "indefinite matrix: eigenvalue {:e} vs largest {lambda_max:e}",
                ev[0]
            )));
        }
        let floor = 1e-12 * lambda_max;
        let mut jittered = false;
        let mut sum = 0.0;
        for &l in &ev {
            if l < floor {
                jittered = true;
                sum += floor.ln();
            } else {
                sum += l.ln();
            }
        }
        Ok(HalfLogDet {
            value: 0.5 * sum,
            jittered,
        })
    }
}

/// Scores `∂_i ln g(x)` for the natural-chart coordinates in `ordering`, and
/// the density `g(x)`. Reference-chart coordinates are not accepted here.
pub(crate) struct ScoreEvaluator<'a> {
    params: &'a MixtureParams,
    ordering: Vec<Param>,
    needs_scores: bool,
    ln_const: Vec<f64>,
    inv_scale: Vec<f64>,
    z: Vec<f64>,
    ratio: Vec<f64>,
}

impl<'a> ScoreEvaluator<'a> {
    pub fn new(params: &'a MixtureParams, ordering: Vec<Param>) -> Self {
        let k = params.k();
        let needs_scores = ordering
            .iter()
            .any(|p| matches!(p, Param::Location(_) | Param::Scale(_)));
        Self {
            params,
            ordering,
            needs_scores,
            ln_const: (0..k)
                .map(|l| params.family_of(l).ln_norm() - params.scales[l].ln())
                .collect(),
            inv_scale: params.scales.iter().map(|s| 1.0 / s).collect(),
            z: vec![0.0; k],
            ratio: vec![0.0; k],
        }
    }

    /// Fill `out` with the scores at `x`; returns `g(x)`, or `None` when
    /// `ln g(x)` is below [`LOG_DENSITY_FLOOR`].
    pub fn eval(&mut self, x: f64, out: &mut [f64]) -> Option<f64> {
        let p = self.params;
        let k = p.k();
        let mut g = 0.0;
        for l in 0..k {
            let z = (x - p.locations[l]) * self.inv_scale[l];
            self.z[l] = z;
            let f = (self.ln_const[l] + p.family_of(l).ln_kernel(z)).exp();
            self.ratio[l] = f;
            g += p.weights[l] * f;
        }
        if !(g >= DENSITY_FLOOR) {
            return None;
        }
        let inv_g = 1.0 / g;
        for r in self.ratio.iter_mut() {
            *r *= inv_g;
        }
        let last = self.ratio[k - 1];
        for (o, param) in out.iter_mut().zip(&self.ordering) {
            *o = match *param {
                Param::Weight(j) => self.ratio[j] - last,
                Param::Location(l) if self.needs_scores => {
                    let (a, _) = p.family_of(l).standard_scores(self.z[l], self.inv_scale[l]);
                    p.weights[l] * self.ratio[l] * a
                }
                Param::Scale(l) if self.needs_scores => {
                    let (_, b) = p.family_of(l).standard_scores(self.z[l], self.inv_scale[l]);
                    p.weights[l] * self.ratio[l] * b
                }
                other => unreachable!("{other} is not a natural-chart coordinate"),
            };
        }
        Some(g)
    }
}

/// `∂_i g(x) ∂_j g(x) / g(x)` for natural-chart indices `i, j` of `scenario`.
pub fn integrand(
    x: f64,
    params: &MixtureParams,
    scenario: &Scenario,
    i: usize,
    j: usize,
) -> Result<f64> {
    params.validate()?;
    scenario.check(params)?;
    let natural = scenario.natural();
    let dim = natural.dim();
    if i >= dim || j >= dim {
        return Err(Error::Argument(format!(
            "index ({i}, {j}) outside a {dim}-dimensional scenario"
        )));
    }
    let mut eval = ScoreEvaluator::new(params, natural.ordering());
    let mut scores = vec![0.0; dim];
    Ok(match eval.eval(x, &mut scores) {
        Some(g) => g * (scores[i] * scores[j]),
        None => 0.0,
    })
}

/// Breakpoints that put every component's bulk on its own panels.
fn gk_breakpoints(params: &MixtureParams, cfg: &IntegratorConfig) -> Vec<f64> {
    let (lo, hi) = cfg.bounds.interval(params);
    let mut pts = vec![lo, hi];
    for (&m, &s) in params.locations.iter().zip(&params.scales) {
        for c in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let x = m + c * s;
            if x > lo && x < hi {
                pts.push(x);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Natural-chart information matrix (upper triangle mirrored).
/// `acc += w · s sᵀ` over the packed upper triangle, row by row.
fn accumulate_outer(acc: &mut [f64], s: &[f64], w: f64) {
    let mut rest = acc;
    for (i, &si) in s.iter().enumerate() {
        let (row, tail) = std::mem::take(&mut rest).split_at_mut(s.len() - i);
        let wi = w * si;
        for (a, &sj) in row.iter_mut().zip(&s[i..]) {
            *a += wi * sj;
        }
        rest = tail;
    }
}

fn unpack_upper(m: &mut DMatrix<f64>, acc: &[f64], scale: f64) {
    let dim = m.nrows();
    let mut idx = 0;
    for i in 0..dim {
        for j in i..dim {
            m[(i, j)] = acc[idx] * scale;
            idx += 1;
        }
    }
}

fn natural_fim(
    params: &MixtureParams,
    scenario: &Scenario,
    cfg: &IntegratorConfig,
) -> Result<DMatrix<f64>> {
    let ordering = scenario.ordering();
    let dim = ordering.len();
    let resolved = select_integrator(params, cfg);
    let mut m = DMatrix::zeros(dim, dim);
    if dim == 0 {
        return Ok(m);
    }
    match resolved.method {
        Method::Riemann { points } => {
            let (a, b) = resolved.bounds.interval(params);
            let mut eval = ScoreEvaluator::new(params, ordering);
            let mut s = vec![0.0; dim];
            let mut acc = vec![0.0; dim * (dim + 1) / 2];
            let h = (b - a) / points as f64;
            for c in 0..points {
                let x = a + (c as f64 + 0.5) * h;
                if let Some(g) = eval.eval(x, &mut s) {
                    accumulate_outer(&mut acc, &s, g);
                }
            }
            unpack_upper(&mut m, &acc, h);
        }
        Method::MonteCarlo { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);
            let mut eval = ScoreEvaluator::new(params, ordering);
            let mut s = vec![0.0; dim];
            let mut acc = vec![0.0; dim * (dim + 1) / 2];
            for _ in 0..samples {
                let x = draw(params, &mut rng);
                if eval.eval(x, &mut s).is_some() {
                    accumulate_outer(&mut acc, &s, 1.0);
                }
            }
            unpack_upper(&mut m, &acc, 1.0 / samples as f64);
        }
        Method::GaussKronrod { rel_tol } => {
            let pts = gk_breakpoints(params, &resolved);
            let pairs: Vec<(usize, usize)> = (0..dim)
                .flat_map(|i| (i..dim).map(move |j| (i, j)))
                .collect();
            let values: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    let mut eval = ScoreEvaluator::new(params, ordering.clone());
                    let mut s = vec![0.0; dim];
                    gauss_kronrod_real_line(
                        |x| match eval.eval(x, &mut s) {
                            Some(g) => g * (s[i] * s[j]),
                            None => 0.0,
                        },
                        &pts,
                        GkOptions {
                            rel_tol,
                            ..GkOptions::default()
                        },
                    )
                    .map(|r| r.value)
                    .map_err(|e| e.with_context(format!("element ({i}, {j})")))
                })
                .collect::<Result<_>>()?;
            for (&(i, j), v) in pairs.iter().zip(values) {
                m[(i, j)] = v;
            }
        }
        Method::Auto => unreachable!("resolved above"),
    }
    for i in 0..dim {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    Ok(m)
}

/// Full information matrix under `scenario`.
///
/// Reference-chart matrices are obtained as `Jᵀ F J` from the natural chart,
/// with `J` the Jacobian of the natural coordinates.
pub fn fim(
    params: &MixtureParams,
    scenario: &Scenario,
    cfg: &IntegratorConfig,
) -> Result<FisherMatrix> {
    params.validate()?;
    scenario.check(params)?;
    cfg.validate()?;
    let natural = natural_fim(params, &scenario.natural(), cfg)?;
    let m = match scenario.chart {
        Chart::Natural => natural,
        Chart::Reference => {
            let jac = natural_jacobian(&to_reparam(params)?);
            let mut m = jac.transpose() * natural * jac;
            // restore exact symmetry lost in the triple product
            let t = m.transpose();
            m = (m + t) * 0.5;
            m
        }
    };
    Ok(FisherMatrix::from_dmatrix(&m, scenario.ordering()))
}

/// Single element `(i, j)`.
///
/// Monte Carlo elements reuse the draws of the whole matrix (one seed per
/// matrix), so `fim_element` agrees exactly with the corresponding entry of
/// [`fim`].
pub fn fim_element(
    params: &MixtureParams,
    scenario: &Scenario,
    i: usize,
    j: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    params.validate()?;
    scenario.check(params)?;
    cfg.validate()?;
    let dim = scenario.dim();
    if i >= dim || j >= dim {
        return Err(Error::Argument(format!(
            "index ({i}, {j}) outside a {dim}-dimensional scenario"
        )));
    }
    if scenario.chart == Chart::Reference {
        return Ok(fim(params, scenario, cfg)?.get(i, j));
    }
    let resolved = select_integrator(params, cfg);
    let ordering = vec![scenario.ordering()[i], scenario.ordering()[j]];
    match resolved.method {
        Method::Riemann { points } => {
            let (a, b) = resolved.bounds.interval(params);
            let mut eval = ScoreEvaluator::new(params, ordering);
            let mut s = [0.0; 2];
            Ok(riemann(
                |x| match eval.eval(x, &mut s) {
                    Some(g) => g * (s[0] * s[1]),
                    None => 0.0,
                },
                a,
                b,
                points,
            ))
        }
        Method::GaussKronrod { rel_tol } => {
            let pts = gk_breakpoints(params, &resolved);
            let mut eval = ScoreEvaluator::new(params, ordering);
            let mut s = [0.0; 2];
            gauss_kronrod_real_line(
                |x| match eval.eval(x, &mut s) {
                    Some(g) => g * (s[0] * s[1]),
                    None => 0.0,
                },
                &pts,
                GkOptions {
                    rel_tol,
                    ..GkOptions::default()
                },
            )
            .map(|r| r.value)
            .map_err(|e| e.with_context(format!("element ({i}, {j})")))
        }
        Method::MonteCarlo { .. } => Ok(fim(params, scenario, cfg)?.get(i, j)),
        Method::Auto => unreachable!("resolved above"),
    }
}

/// Closed-form information of a single Gaussian, ordering `(μ, σ)`.
pub fn analytic_fim_gaussian_single(_mu: f64, sigma: f64) -> Result<FisherMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "scale must be positive, got {sigma}"
        )));
    }
    let s2 = sigma * sigma;
    Ok(FisherMatrix {
        dim: 2,
        entries: vec![1.0 / s2, 0.0, 0.0, 2.0 / s2],
        ordering: vec![Param::Location(0), Param::Scale(0)],
    })
}
