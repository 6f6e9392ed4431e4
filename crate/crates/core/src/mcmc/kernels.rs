use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

/// Multiplier applied to a kernel scale outside the acceptance band.
pub const ADAPT_FACTOR: f64 = 1.25;
pub const SCALE_FLOOR: f64 = 1e-8;

/// Grow the scale when acceptance exceeds `band.1`, shrink it below `band.0`.
pub fn adapt_scales(acceptance: f64, scale: f64, band: (f64, f64)) -> f64 {
    let next = if acceptance > band.1 {
        scale * ADAPT_FACTOR
    } else if acceptance < band.0 {
        scale / ADAPT_FACTOR
    } else {
        scale
    };
    next.max(SCALE_FLOOR)
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln P(lo ≤ center + sd·N ≤ hi)`.
pub fn log_truncation_mass(center: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - center) / sd;
    let b = (hi - center) / sd;
    // evaluate on the side where the tail probabilities are accurate
    let mass = if a > 0.0 {
        std_normal_cdf(-a) - std_normal_cdf(-b)
    } else {
        std_normal_cdf(b) - std_normal_cdf(a)
    };
    mass.ln()
}

/// Draw from `N(center, sd²)` restricted to `[lo, hi]`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    center: f64,
    sd: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> f64 {
    for _ in 0..64 {
        let z: f64 = rng.sample(StandardNormal);
        let x = center + sd * z;
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
    // very narrow window relative to sd: the density is nearly flat on it
    // unless the window lies far in a tail, in which case use an exponential
    // approximation anchored at the near end
    let a = (lo - center) / sd;
    let b = (hi - center) / sd;
    if a > 3.0 || b < -3.0 {
        let (near, far, sign) = if a > 0.0 { (a, b, 1.0) } else { (-b, -a, -1.0) };
        loop {
            let e: f64 = -rng.random::<f64>().ln() / near;
            let z = near + e;
            if z <= far && rng.random::<f64>() <= (-0.5 * e * e).exp() {
                return (center + sign * sd * z).clamp(lo, hi);
            }
        }
    }
    loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        let z = (x - center) / sd;
        let zmax = if a > 0.0 {
            a
        } else if b < 0.0 {
            b
        } else {
            0.0
        };
        if rng.random::<f64>() <= (-0.5 * (z * z - zmax * zmax)).exp() {
            return x;
        }
    }
}

/// Joint proposal on the first `k-1` weights, each perturbed by a normal
/// kernel truncated to `[0, 1]`; the last weight is the complement.
///
/// Returns `None` when the complement is negative (count as a rejection),
/// otherwise the proposal and `ln q(p | p') - ln q(p' | p)`.
pub fn propose_weights<R: Rng + ?Sized>(
    p: &[f64],
    scale: f64,
    rng: &mut R,
) -> Option<(Vec<f64>, f64)> {
    let k = p.len();
    if k < 2 {
        return Some((p.to_vec(), 0.0));
    }
    let mut out = Vec::with_capacity(k);
    let mut correction = 0.0;
    for &w in &p[..k - 1] {
        let w_new = sample_truncated_normal(w, scale, 0.0, 1.0, rng);
        correction +=
            log_truncation_mass(w, scale, 0.0, 1.0) - log_truncation_mass(w_new, scale, 0.0, 1.0);
        out.push(w_new);
    }
    let head: f64 = out.iter().sum();
    let last = 1.0 - head;
    if last < 0.0 {
        return None;
    }
    out.push(last);
    Some((out, correction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adaptation_policy() {
        let band = (0.2, 0.4);
        assert!(adapt_scales(0.55, 1.0, band) > 1.0);
        assert_eq!(adapt_scales(0.30, 1.0, band), 1.0);
        assert!(adapt_scales(0.05, 1.0, band) < 1.0);
        let mut s = 1.0;
        for _ in 0..1000 {
            s = adapt_scales(0.0, s, band);
        }
        assert_eq!(s, SCALE_FLOOR);
    }

    #[test]
    fn truncation_mass_values() {
        assert!((log_truncation_mass(0.0, 1.0, f64::NEG_INFINITY, f64::INFINITY)).abs() < 1e-15);
        assert!((log_truncation_mass(0.0, 1.0, 0.0, f64::INFINITY) - 0.5f64.ln()).abs() < 1e-15);
        // far tail stays finite
        assert!(log_truncation_mass(0.0, 1.0, 30.0, 31.0).is_finite());
    }

    #[test]
    fn truncated_draws_in_range_and_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| sample_truncated_normal(0.0, 1.0, 0.0, f64::INFINITY, &mut rng))
            .collect();
        assert!(draws.iter().all(|x| *x >= 0.0));
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        // half-normal mean √(2/π)
        assert!(
            (mean - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.02,
            "{mean}"
        );
        for _ in 0..1000 {
            let x = sample_truncated_normal(0.5, 1e-9, 0.0, 1e-12, &mut rng);
            assert!((0.0..=1e-12).contains(&x));
            let y = sample_truncated_normal(0.0, 0.1, 5.0, 6.0, &mut rng);
            assert!((5.0..=6.0).contains(&y));
        }
    }

    #[test]
    fn vanishing_scale_is_continuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (q, _) = propose_weights(&[0.5, 0.5], 1e-10, &mut rng).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-8 && (q[1] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn symmetric_bounds_give_zero_correction() {
        // p = ½ and p' = ½ ± d sit symmetrically inside [0, 1] only when equal;
        // the correction is exactly 0 for p' = 1 - p
        let m1 = log_truncation_mass(0.3, 0.2, 0.0, 1.0);
        let m2 = log_truncation_mass(0.7, 0.2, 0.0, 1.0);
        assert!((m1 - m2).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (_, c) = propose_weights(&[0.5, 0.5], 1e-6, &mut rng).unwrap();
        assert!(c.abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn proposals_stay_on_simplex(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..10 {
                if let Some((q, c)) = propose_weights(&[0.9, 0.1], 0.3, &mut rng) {
                    prop_assert!(q.iter().all(|w| (0.0..=1.0).contains(w)));
                    prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    prop_assert!(c.is_finite());
                }
                if let Some((q, _)) = propose_weights(&[0.2, 0.3, 0.5], 0.3, &mut rng) {
                    prop_assert!(q.iter().all(|w| (0.0..=1.0).contains(w)));
                    prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
