use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcmc::{relabel_draw, ChainTrace};
use crate::mixture::{log_density_unchecked, quantile_sorted, MixtureParams};

/// Components with a posterior-mean weight above this are counted as found.
pub const DETECTION_THRESHOLD: f64 = 0.02;
/// Components below this weight are folded into the tail row.
pub const DISPLAY_THRESHOLD: f64 = 0.01;
pub const CREDIBLE_LEVEL: f64 = 0.95;

/// Posterior mean, SD and equal-tailed credible interval of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let a = 0.5 * (1.0 - CREDIBLE_LEVEL);
        Self {
            mean,
            sd: var.sqrt(),
            lower: quantile_sorted(&sorted, a),
            upper: quantile_sorted(&sorted, 1.0 - a),
        }
    }
}

/// Posterior of one (relabelled) component. `scale` describes the component
/// σ itself; each `sd` field is the posterior SD of the quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub weight: Moments,
    pub location: Moments,
    pub scale: Moments,
}

/// Components whose posterior-mean weight is below [`DISPLAY_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub components: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub draws: usize,
    /// Sorted by posterior-mean weight, largest first.
    pub components: Vec<ComponentSummary>,
}

impl PosteriorSummary {
    /// Summarize a trace after relabelling every draw by decreasing weight.
    pub fn from_trace(trace: &ChainTrace) -> Result<Self> {
        if trace.draws.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let k = trace.k;
        let n = trace.draws.len();
        let mut w = vec![Vec::with_capacity(n); k];
        let mut m = vec![Vec::with_capacity(n); k];
        let mut s = vec![Vec::with_capacity(n); k];
        for d in &trace.draws {
            let p = relabel_draw(d).params;
            for l in 0..k {
                w[l].push(p.weights[l]);
                m[l].push(p.locations[l]);
                s[l].push(p.scales[l]);
            }
        }
        let mut components: Vec<ComponentSummary> = (0..k)
            .map(|l| ComponentSummary {
                weight: Moments::of(&w[l]),
                location: Moments::of(&m[l]),
                scale: Moments::of(&s[l]),
            })
            .collect();
        components.sort_by(|a, b| {
            b.weight
                .mean
                .total_cmp(&a.weight.mean)
                .then(a.location.mean.total_cmp(&b.location.mean))
        });
        Ok(Self {
            draws: n,
            components,
        })
    }

    pub fn mean_weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight.mean).collect()
    }

    /// Number of components with posterior-mean weight above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.components
            .iter()
            .filter(|c| c.weight.mean > threshold)
            .count()
    }

    pub fn detected(&self) -> usize {
        self.count_above(DETECTION_THRESHOLD)
    }

    /// Rows shown individually, i.e. weight at least [`DISPLAY_THRESHOLD`].
    pub fn displayed(&self) -> &[ComponentSummary] {
        let shown = self
            .components
            .iter()
            .take_while(|c| c.weight.mean >= DISPLAY_THRESHOLD)
            .count();
        &self.components[..shown]
    }

    pub fn tail(&self) -> Option<TailRow> {
        let rest = &self.components[self.displayed().len()..];
        (!rest.is_empty()).then(|| TailRow {
            components: rest.len(),
            weight: rest.iter().map(|c| c.weight.mean).sum(),
        })
    }
}

/// Posterior-averaged mixture density on a grid with a pointwise band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveDensity {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl PredictiveDensity {
    /// Trapezoid integral of the mean curve.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.mean)
    }

    /// Median over the grid of the band width.
    pub fn median_band_width(&self) -> f64 {
        let mut w: Vec<f64> = self
            .upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| u - l)
            .collect();
        w.sort_by(f64::total_cmp);
        quantile_sorted(&w, 0.5)
    }

    /// Trapezoid L1 distance between the mean curve and `density`.
    pub fn l1_distance(&self, density: impl Fn(f64) -> f64) -> f64 {
        let diff: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.mean)
            .map(|(&x, &m)| (m - density(x)).abs())
            .collect();
        trapezoid(&self.grid, &diff)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1]))
        .sum()
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let h = (hi - lo) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| lo + h * i as f64).collect()
}

/// Grid covering the data with a margin of a quarter of the range plus two
/// SDs on each side.
pub fn data_grid(trace: &ChainTrace, points: usize) -> Vec<f64> {
    let d = &trace.data;
    let pad = 0.25 * d.range() + 2.0 * d.sd;
    linear_grid(d.min - pad, d.max + pad, points)
}

pub fn mixture_density(params: &MixtureParams, x: f64) -> f64 {
    log_density_unchecked(x, params).exp()
}

/// Mean of the per-draw mixture densities on `grid`, with pointwise 2.5% and
/// 97.5% quantiles.
pub fn predictive_density(trace: &ChainTrace, grid: &[f64]) -> Result<PredictiveDensity> {
    if trace.draws.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if grid.is_empty() {
        return Err(Error::Argument("predictive grid is empty".into()));
    }
    let n = trace.draws.len();
    // column-major: all draws for one grid point are contiguous
    let mut values = vec![0.0; n * grid.len()];
    for (d, draw) in trace.draws.iter().enumerate() {
        for (g, &x) in grid.iter().enumerate() {
            values[g * n + d] = mixture_density(&draw.params, x);
        }
    }
    let a = 0.5 * (1.0 - CREDIBLE_LEVEL);
    let mut mean = Vec::with_capacity(grid.len());
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    for col in values.chunks_mut(n) {
        let m = col.iter().sum::<f64>() / n as f64;
        col.sort_by(f64::total_cmp);
        // keep the mean inside the band even when rounding disagrees
        lower.push(quantile_sorted(col, a).min(m));
        upper.push(quantile_sorted(col, 1.0 - a).max(m));
        mean.push(m);
    }
    Ok(PredictiveDensity {
        grid: grid.to_vec(),
        mean,
        lower,
        upper,
    })
}
