//! One-dimensional integration rules: adaptive Gauss-Kronrod (7/15 points),
//! midpoint Riemann sums and plain Monte Carlo averages.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct GkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for GkOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

/// Single 15-point Kronrod panel on `[a, b]` with its error estimate.
/// Returns the integral, its error estimate and the integral of `|f|`.
fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err, res_abs)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod over `[points[0], points[last]]`, with the
/// interior points used as the initial subdivision.
///
/// The relative tolerance is measured against `max(|∫f|, ∫|f|)`, so
/// integrals that cancel to (nearly) zero still terminate.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: GkOptions,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Argument("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, abs) = kronrod15(&mut f, w[0], w[1]);
        evaluations += 15;
        total += value;
        total_err += error;
        total_abs += abs;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            abs,
        });
    }
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs().max(total_abs));
        if total_err <= tol || !total.is_finite() {
            // running updates can cancel badly; confirm with a fresh sum
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
            total_abs = heap.iter().map(|p| p.abs).sum();
            let tol = opts.abs_tol.max(opts.rel_tol * total.abs().max(total_abs));
            if total_err <= tol || !total.is_finite() {
                break;
            }
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::IntegrationFailure {
                estimate: total,
                abs_error: total_err,
                evaluations,
                context: format!("subdivision limit {} reached", opts.max_intervals),
            });
        }
        let worst = heap.pop().expect("heap non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            return Err(Error::IntegrationFailure {
                estimate: total,
                abs_error: total_err,
                evaluations,
                context: "interval exhausted floating-point resolution".into(),
            });
        }
        let (v1, e1, a1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2, a2) = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            abs: a1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            abs: a2,
        });
    }
    // re-sum to shed accumulated rounding from the running updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.error).sum();
    if !value.is_finite() {
        return Err(Error::IntegrationFailure {
            estimate: value,
            abs_error,
            evaluations,
            context: "non-finite integrand".into(),
        });
    }
    Ok(QuadResult {
        value,
        abs_error,
        evaluations,
    })
}

/// Integral over the whole real line: adaptive Gauss-Kronrod on the sorted
/// `points` plus both tails mapped onto `[0, 1)` by `x = a ∓ t / (1 - t)`.
pub fn gauss_kronrod_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: GkOptions,
) -> Result<QuadResult> {
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let lo = pts[0];
    let hi = *pts.last().expect("non-empty");
    let core = if pts.len() >= 2 {
        gauss_kronrod(&mut f, &pts, opts)?
    } else {
        QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        }
    };
    let tail_opts = GkOptions {
        abs_tol: opts.abs_tol.max(opts.rel_tol * core.value.abs()),
        ..opts
    };
    let left = gauss_kronrod(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = t / (1.0 - t);
            f(lo - u) / ((1.0 - t) * (1.0 - t))
        },
        &[0.0, 0.5, 0.9, 1.0],
        tail_opts,
    )?;
    let right = gauss_kronrod(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = t / (1.0 - t);
            f(hi + u) / ((1.0 - t) * (1.0 - t))
        },
        &[0.0, 0.5, 0.9, 1.0],
        tail_opts,
    )?;
    Ok(QuadResult {
        value: core.value + left.value + right.value,
        abs_error: core.abs_error + left.abs_error + right.abs_error,
        evaluations: core.evaluations + left.evaluations + right.evaluations,
    })
}

/// Midpoint Riemann sum with `cells` equal cells on `[a, b]`.
pub fn riemann<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    (0..cells).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
