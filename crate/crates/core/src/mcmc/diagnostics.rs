use serde::{Deserialize, Serialize};

use super::chain::{ChainTrace, Draw};
use super::DivergenceThresholds;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DiagnosticsReport {
    /// Some scale stayed collapsed for at least the configured run length.
    pub stuck: bool,
    /// Some location left the allowed window around the data.
    pub diverged: bool,
    pub longest_collapsed_run: usize,
    /// Fraction of draws with at least one collapsed scale.
    pub collapsed_fraction: f64,
    /// Fraction of draws with at least one diverged location.
    pub diverged_fraction: f64,
    /// Largest `|μ - data midpoint| / data range` over the trace.
    pub max_location_excursion: f64,
    pub acceptance_weights: f64,
    pub acceptance_locations: f64,
    pub acceptance_scales: f64,
    pub acceptance_hyper: f64,
}

/// Flag collapsed scales and diverging locations.
///
/// A scale is collapsed below `sigma_stuck_rel × data SD`; the chain is stuck
/// when some component stays collapsed for `stuck_run_length` consecutive
/// draws. A location diverges when it is more than
/// `mu_diverge_mult × data range` from the midpoint of the data.
pub fn diagnose(
    trace: &ChainTrace,
    thresholds: &DivergenceThresholds,
) -> Result<DiagnosticsReport> {
    if trace.draws.is_empty() {
        return Err(Error::EmptyTrace);
    }
    thresholds.validate()?;
    let eps = thresholds.sigma_stuck_rel * trace.data.sd;
    let range = trace.data.range().max(f64::MIN_POSITIVE);
    let mid = trace.data.midpoint();
    let k = trace.k;

    let mut runs = vec![0usize; k];
    let mut longest = 0;
    let mut collapsed_draws = 0usize;
    let mut diverged_draws = 0usize;
    let mut excursion: f64 = 0.0;
    for d in &trace.draws {
        let mut any_collapsed = false;
        for (l, &s) in d.params.scales.iter().enumerate() {
            if s < eps {
                runs[l] += 1;
                any_collapsed = true;
            } else {
                runs[l] = 0;
            }
            longest = longest.max(runs[l]);
        }
        collapsed_draws += usize::from(any_collapsed);
        let e = d
            .params
            .locations
            .iter()
            .map(|m| (m - mid).abs() / range)
            .fold(0.0, f64::max);
        excursion = excursion.max(e);
        diverged_draws += usize::from(e > thresholds.mu_diverge_mult);
    }
    let n = trace.draws.len() as f64;
    Ok(DiagnosticsReport {
        stuck: longest >= thresholds.stuck_run_length,
        diverged: diverged_draws > 0,
        longest_collapsed_run: longest,
        collapsed_fraction: collapsed_draws as f64 / n,
        diverged_fraction: diverged_draws as f64 / n,
        max_location_excursion: excursion,
        acceptance_weights: trace.acceptance.weights.rate(),
        acceptance_locations: trace.acceptance.locations.rate(),
        acceptance_scales: trace.acceptance.scales.rate(),
        acceptance_hyper: trace.acceptance.hyper.rate(),
    })
}

/// Reorder the components of one draw: weights descending, ties by
/// ascending location.
pub fn relabel_draw(draw: &Draw) -> Draw {
    let p = &draw.params;
    let mut perm: Vec<usize> = (0..p.k()).collect();
    perm.sort_by(|&a, &b| {
        p.weights[b]
            .total_cmp(&p.weights[a])
            .then(p.locations[a].total_cmp(&p.locations[b]))
    });
    Draw {
        params: p.permuted(&perm),
        ..draw.clone()
    }
}

pub fn relabel(trace: &ChainTrace) -> ChainTrace {
    ChainTrace {
        draws: trace.draws.iter().map(relabel_draw).collect(),
        ..trace.clone()
    }
}

/// Standard error of the mean of a correlated series by non-overlapping
/// batch means with `⌊√n⌋` batches.
pub fn batch_means_se(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return f64::NAN;
    }
    let batches = (n as f64).sqrt().floor() as usize;
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::chain::{BlockAcceptance, DataSummary};
    use super::super::PriorMode;
    use super::*;
    use crate::mixture::{ComponentFamily, MixtureParams};

    fn trace_of(params: Vec<MixtureParams>) -> ChainTrace {
        ChainTrace {
            k: params[0].k(),
            family: ComponentFamily::Gaussian,
            prior_mode: PriorMode::Hierarchical,
            seed: 0,
            data: DataSummary {
                n: 10,
                mean: 0.0,
                sd: 1.0,
                min: -2.0,
                max: 2.0,
            },
            draws: params
                .into_iter()
                .map(|p| Draw {
                    params: p,
                    hyper: None,
                    log_posterior: 0.0,
                })
                .collect(),
            acceptance: BlockAcceptance::default(),
            scale_history: Vec::new(),
            report: DiagnosticsReport::default(),
        }
    }

    fn two(p: f64, m: (f64, f64), s: (f64, f64)) -> MixtureParams {
        MixtureParams::gaussian(&[p, 1.0 - p], &[m.0, m.1], &[s.0, s.1]).unwrap()
    }

    #[test]
    fn constant_trace_is_clean() {
        let t = trace_of(vec![two(0.5, (-1.0, 1.0), (1.0, 1.0)); 1000]);
        let r = diagnose(&t, &DivergenceThresholds::default()).unwrap();
        assert!(!r.stuck && !r.diverged);
    }

    #[test]
    fn collapse_segment_flags_stuck() {
        let mut v = vec![two(0.5, (-1.0, 1.0), (1.0, 1.0)); 200];
        v.extend(vec![two(0.5, (-1.0, 1.0), (1.0, 1e-5)); 600]);
        v.extend(vec![two(0.5, (-1.0, 1.0), (1.0, 1.0)); 200]);
        let r = diagnose(&trace_of(v), &DivergenceThresholds::default()).unwrap();
        assert!(r.stuck);
        assert_eq!(r.longest_collapsed_run, 600);
        assert!(!r.diverged);
    }

    #[test]
    fn short_collapse_is_not_stuck() {
        let mut v = vec![two(0.5, (-1.0, 1.0), (1.0, 1e-5)); 499];
        v.push(two(0.5, (-1.0, 1.0), (1.0, 1.0)));
        let r = diagnose(&trace_of(v), &DivergenceThresholds::default()).unwrap();
        assert!(!r.stuck);
    }

    #[test]
    fn location_ramp_flags_divergence() {
        let v: Vec<MixtureParams> = (0..100)
            .map(|i| two(0.5, (-1.0, i as f64), (1.0, 1.0)))
            .collect();
        let r = diagnose(&trace_of(v), &DivergenceThresholds::default()).unwrap();
        assert!(r.diverged);
        assert!(r.max_location_excursion > 10.0);
    }

    #[test]
    fn empty_trace_rejected() {
        let mut t = trace_of(vec![two(0.5, (0.0, 1.0), (1.0, 1.0))]);
        t.draws.clear();
        assert!(matches!(
            diagnose(&t, &DivergenceThresholds::default()),
            Err(Error::EmptyTrace)
        ));
    }

    #[test]
    fn relabel_sorts_and_is_idempotent() {
        let t = trace_of(vec![
            two(0.2, (5.0, -5.0), (1.0, 2.0)),
            two(0.8, (5.0, -5.0), (1.0, 2.0)),
            two(0.5, (3.0, -3.0), (1.0, 2.0)),
        ]);
        let r = relabel(&t);
        assert_eq!(r.draws[0].params.weights, vec![0.8, 0.2]);
        assert_eq!(r.draws[0].params.locations, vec![-5.0, 5.0]);
        assert_eq!(r.draws[0].params.scales, vec![2.0, 1.0]);
        assert_eq!(r.draws[1], t.draws[1]);
        assert_eq!(r.draws[2].params.locations, vec![-3.0, 3.0]);
        assert_eq!(relabel(&r), r);
    }

    #[test]
    fn batch_means_of_iid_series() {
        let v: Vec<f64> = (0..10_000)
            .map(|i| ((i * 7919) % 1000) as f64 / 1000.0)
            .collect();
        let se = batch_means_se(&v);
        assert!(se > 0.0 && se < 0.02);
    }
}
