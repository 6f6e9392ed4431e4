use super::dataset::Dataset;
use super::params::{AllocationVector, MixtureParams};
use crate::error::{Error, Result};

/// Upper bound on `k^n` accepted by [`brute_force_log_likelihood`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogAccumulator {
    max: f64,
    sum: f64,
}

impl LogAccumulator {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.sum += (v - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// `ln Σ_ℓ p_ℓ f_ℓ(x | μ_ℓ, σ_ℓ)` evaluated with log-sum-exp.
pub fn log_density(x: f64, params: &MixtureParams) -> Result<f64> {
    params.validate()?;
    Ok(log_density_unchecked(x, params))
}

pub(crate) fn log_density_unchecked(x: f64, params: &MixtureParams) -> f64 {
    let mut acc = LogAccumulator::new();
    for l in 0..params.k() {
        let p = params.weights[l];
        if p > 0.0 {
            acc.add(
                p.ln()
                    + params
                        .family_of(l)
                        .ln_pdf(x, params.locations[l], params.scales[l]),
            );
        }
    }
    acc.value()
}

pub fn log_likelihood(data: &Dataset, params: &MixtureParams) -> Result<f64> {
    params.validate()?;
    Ok(data
        .values()
        .iter()
        .map(|&x| log_density_unchecked(x, params))
        .sum())
}

/// Data-augmented log-likelihood for known allocations.
///
/// Zero-weight components contribute nothing through `n_ℓ ln p_ℓ` when
/// they are empty; an observation allocated to a zero-weight component
/// makes the value `-∞`.
pub fn complete_log_likelihood(
    data: &Dataset,
    z: &AllocationVector,
    params: &MixtureParams,
) -> Result<f64> {
    params.validate()?;
    let k = params.k();
    z.validate(k)?;
    if z.0.len() != data.len() {
        return Err(Error::Argument(format!(
            "allocation length {} != data length {}",
            z.0.len(),
            data.len()
        )));
    }
    let mut total = 0.0;
    for (&x, &l) in data.values().iter().zip(&z.0) {
        total += params
            .family_of(l)
            .ln_pdf(x, params.locations[l], params.scales[l]);
    }
    for (l, &n_l) in z.counts(k).iter().enumerate() {
        if n_l > 0 {
            total += n_l as f64 * params.weights[l].ln();
        }
    }
    Ok(total)
}

/// Log-likelihood by explicit summation over all `k^n` allocations.
///
/// Exponential cost; only meant as an oracle for small instances.
pub fn brute_force_log_likelihood(data: &Dataset, params: &MixtureParams) -> Result<f64> {
    params.validate()?;
    let n = data.len();
    let k = params.k();
    let total = (k as u64).checked_pow(n as u32);
    if total.is_none_or(|t| t > BRUTE_FORCE_LIMIT) {
        return Err(Error::InstanceTooLarge {
            n,
            k,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut z = AllocationVector(vec![0; n]);
    let mut acc = LogAccumulator::new();
    loop {
        acc.add(complete_log_likelihood(data, &z, params)?);
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(acc.value());
            }
            z.0[i] += 1;
            if z.0[i] < k {
                break;
            }
            z.0[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::ComponentFamily;

    fn data(xs: &[f64]) -> Dataset {
        Dataset::new("t", xs.to_vec()).unwrap()
    }

    #[test]
    fn standard_normal_at_mode() {
        let p = MixtureParams::gaussian(&[1.0], &[0.0], &[1.0]).unwrap();
        let v = log_density(0.0, &p).unwrap();
        assert!((v + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn symmetric_two_component() {
        let p = MixtureParams::gaussian(&[0.5, 0.5], &[-3.0, 3.0], &[1.0, 1.0]).unwrap();
        let ln_phi3 = -4.5 - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((log_density(0.0, &p).unwrap() - ln_phi3).abs() < 1e-14);
        assert!((ln_phi3 + 5.4189).abs() < 1e-4);
    }

    #[test]
    fn three_component_against_high_precision_value() {
        // 50-digit direct summation: -4.33832068341927105694...
        let p = MixtureParams::gaussian(&[0.25, 0.10, 0.65], &[-10.0, 0.0, 15.0], &[1.0, 5.0, 7.0])
            .unwrap();
        let v = log_density(1.2, &p).unwrap();
        assert!((v - (-4.338_320_683_419_271)).abs() < 1e-13, "{v}");
    }

    #[test]
    fn far_tail_is_finite() {
        let p = MixtureParams::gaussian(&[0.5, 0.5], &[-3.0, 3.0], &[0.01, 0.01]).unwrap();
        assert!(log_density(0.0, &p).unwrap().is_finite());
        assert!(log_density(1e4, &p).unwrap().is_finite());
    }

    #[test]
    fn likelihood_reductions() {
        let p = MixtureParams::gaussian(&[0.3, 0.7], &[0.0, 2.0], &[1.0, 0.5]).unwrap();
        let one = data(&[0.4]);
        assert_eq!(
            log_likelihood(&one, &p).unwrap(),
            log_density(0.4, &p).unwrap()
        );
        let d = data(&[-0.5, 0.3, 2.1, 1.0]);
        let doubled = data(&[-0.5, 0.3, 2.1, 1.0, -0.5, 0.3, 2.1, 1.0]);
        let a = log_likelihood(&d, &p).unwrap();
        let b = log_likelihood(&doubled, &p).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn complete_likelihood_hand_computed() {
        // 2 ln 0.3 + ln 0.7 + ln φ(-0.5) + ln φ(0.3) + ln N(2.1; 2, 0.5)
        // = -5.01828897164467728008... (50-digit evaluation)
        let p = MixtureParams::gaussian(&[0.3, 0.7], &[0.0, 2.0], &[1.0, 0.5]).unwrap();
        let d = data(&[-0.5, 0.3, 2.1]);
        let v = complete_log_likelihood(&d, &AllocationVector(vec![0, 0, 1]), &p).unwrap();
        assert!((v - (-5.018_288_971_644_677)).abs() < 1e-13, "{v}");
    }

    #[test]
    fn complete_likelihood_k1_equals_likelihood() {
        let p = MixtureParams::gaussian(&[1.0], &[0.5], &[2.0]).unwrap();
        let d = data(&[-0.5, 0.3, 2.1]);
        let a = complete_log_likelihood(&d, &AllocationVector(vec![0; 3]), &p).unwrap();
        assert!((a - log_likelihood(&d, &p).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn complete_likelihood_rejects_bad_allocation() {
        let p = MixtureParams::gaussian(&[0.3, 0.7], &[0.0, 2.0], &[1.0, 0.5]).unwrap();
        let d = data(&[0.0, 1.0]);
        assert!(matches!(
            complete_log_likelihood(&d, &AllocationVector(vec![0, 2]), &p),
            Err(Error::Allocation { .. })
        ));
    }

    #[test]
    fn brute_force_small_cases() {
        let p = MixtureParams::gaussian(&[0.4, 0.6], &[-1.0, 1.5], &[0.7, 1.2]).unwrap();
        let d = data(&[0.1, -0.8]);
        let a = brute_force_log_likelihood(&d, &p).unwrap();
        let b = log_likelihood(&d, &p).unwrap();
        assert!((a - b).abs() < 1e-12);

        let degenerate = MixtureParams::gaussian(&[1.0, 0.0], &[0.0, 3.0], &[1.0, 1.0]).unwrap();
        let single = MixtureParams::gaussian(&[1.0], &[0.0], &[1.0]).unwrap();
        let d = data(&[0.1, -0.8, 2.0]);
        let a = brute_force_log_likelihood(&d, &degenerate).unwrap();
        let b = log_likelihood(&d, &single).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn brute_force_guard() {
        let p = MixtureParams::gaussian(&[0.5, 0.5], &[0.0, 1.0], &[1.0, 1.0]).unwrap();
        let d = data(&vec![0.0; 30]);
        assert!(matches!(
            brute_force_log_likelihood(&d, &p),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn gumbel_likelihood_finite() {
        let p = MixtureParams::new(
            vec![0.5, 0.5],
            vec![0.0, 5.0],
            vec![1.0, 2.0],
            ComponentFamily::Gumbel,
        )
        .unwrap();
        assert!(log_likelihood(&data(&[-2.0, 0.0, 30.0]), &p)
            .unwrap()
            .is_finite());
    }
}
