//! Reference-component reparametrization of a location-scale mixture.
//!
//! Component 1 carries the global location `μ` and scale `τ`. Every later
//! component is a perturbation of its predecessor:
//!
//! ```text
//! μ_ℓ = μ_{ℓ-1} + σ_{ℓ-1} δ_ℓ,   σ_ℓ = σ_{ℓ-1} s_ℓ,   ℓ = 2..k
//! ```
//!
//! and the weights use stick-breaking: `p_1 = p`,
//! `p_{ℓ+1} = (1-p)(1-q_1)…(1-q_{ℓ-1}) q_ℓ`, with the last component taking
//! the remainder. For `k = 2` this is `p N(μ, τ²) + (1-p) N(μ + τδ, τ²s²)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::family::ComponentFamily;
use super::params::MixtureParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReparamParams {
    pub location: f64,
    pub scale: f64,
    /// `δ_2..δ_k`
    pub offsets: Vec<f64>,
    /// `s_2..s_k`
    pub ratios: Vec<f64>,
    /// `p`; equal to 1 when `k = 1`.
    pub first_weight: f64,
    /// `q_1..q_{k-2}`
    pub sticks: Vec<f64>,
}

impl ReparamParams {
    pub fn k(&self) -> usize {
        self.offsets.len() + 1
    }

    /// Coordinates in the canonical order
    /// `(p, q_1..q_{k-2}, μ, τ, δ_2..δ_k, s_2..s_k)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.k() - 1);
        if self.k() > 1 {
            v.push(self.first_weight);
            v.extend(&self.sticks);
        }
        v.push(self.location);
        v.push(self.scale);
        v.extend(&self.offsets);
        v.extend(&self.ratios);
        v
    }

    pub fn from_vec(k: usize, v: &[f64]) -> Result<Self> {
        if k == 0 || v.len() != 3 * k - 1 {
            return Err(Error::Argument(format!(
                "reparametrized vector for k={k} needs {} entries, got {}",
                (3 * k).saturating_sub(1),
                v.len()
            )));
        }
        let w = k - 1;
        let (first_weight, sticks) = if k > 1 {
            (v[0], v[1..w].to_vec())
        } else {
            (1.0, Vec::new())
        };
        Ok(Self {
            location: v[w],
            scale: v[w + 1],
            offsets: v[w + 2..w + 2 + (k - 1)].to_vec(),
            ratios: v[w + 1 + k..].to_vec(),
            first_weight,
            sticks,
        })
    }
}

pub fn to_reparam(params: &MixtureParams) -> Result<ReparamParams> {
    params.validate()?;
    let k = params.k();
    let mut offsets = Vec::with_capacity(k - 1);
    let mut ratios = Vec::with_capacity(k - 1);
    for l in 1..k {
        let prev_scale = params.scales[l - 1];
        offsets.push((params.locations[l] - params.locations[l - 1]) / prev_scale);
        ratios.push(params.scales[l] / prev_scale);
    }
    let mut sticks = Vec::with_capacity(k.saturating_sub(2));
    let mut remaining = 1.0 - params.weights[0];
    for l in 1..k.saturating_sub(1) {
        let q = if remaining > 0.0 {
            (params.weights[l] / remaining).clamp(0.0, 1.0)
        } else {
            0.0
        };
        sticks.push(q);
        remaining -= params.weights[l];
    }
    Ok(ReparamParams {
        location: params.locations[0],
        scale: params.scales[0],
        offsets,
        ratios,
        first_weight: params.weights[0],
        sticks,
    })
}

pub fn from_reparam(r: &ReparamParams, family: ComponentFamily) -> Result<MixtureParams> {
    if !(r.scale > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "reference scale must be positive, got {}",
            r.scale
        )));
    }
    let k = r.k();
    if r.ratios.len() != k - 1 || r.sticks.len() != k.saturating_sub(2) {
        return Err(Error::Argument(
            "inconsistent reparametrized lengths".into(),
        ));
    }
    if let Some(s) = r.ratios.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::ParameterDomain(format!(
            "scale ratio must be positive, got {s}"
        )));
    }
    let mut locations = vec![r.location];
    let mut scales = vec![r.scale];
    for l in 1..k {
        let (m, s) = (locations[l - 1], scales[l - 1]);
        locations.push(m + s * r.offsets[l - 1]);
        scales.push(s * r.ratios[l - 1]);
    }
    let weights = stick_weights(r.first_weight, &r.sticks, k);
    MixtureParams::new(weights, locations, scales, family)
}

fn stick_weights(p: f64, sticks: &[f64], k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    let mut w = Vec::with_capacity(k);
    w.push(p);
    let mut remaining = 1.0 - p;
    for &q in sticks {
        w.push(remaining * q);
        remaining *= 1.0 - q;
    }
    w.push(remaining);
    w
}

/// Jacobian `∂θ/∂φ` of the natural chart
/// `θ = (p_1..p_{k-1}, μ_1..μ_k, σ_1..σ_k)` with respect to the
/// reparametrized coordinates `φ` (ordering of [`ReparamParams::to_vec`]).
pub fn natural_jacobian(r: &ReparamParams) -> DMatrix<f64> {
    let k = r.k();
    let w = k - 1;
    let dim = 3 * k - 1;
    let mut jac = DMatrix::zeros(dim, dim);

    // weights block: rows 0..w, columns 0..w
    if k > 1 {
        let mut d_rem = vec![0.0; w];
        d_rem[0] = -1.0;
        jac[(0, 0)] = 1.0;
        let mut rem = 1.0 - r.first_weight;
        for (l, &q) in r.sticks.iter().enumerate() {
            // p_{l+2} = rem * q, column l+1 is q_{l+1}
            for c in 0..w {
                jac[(l + 1, c)] = q * d_rem[c];
            }
            jac[(l + 1, l + 1)] += rem;
            for c in 0..w {
                d_rem[c] *= 1.0 - q;
            }
            d_rem[l + 1] -= rem;
            rem *= 1.0 - q;
        }
    }

    // location/scale block; reparam columns: μ at w, τ at w+1,
    // δ_ℓ at w+2+(ℓ-2), s_ℓ at w+1+k+(ℓ-2)
    let col_mu = w;
    let col_tau = w + 1;
    let col_delta = |l: usize| w + 2 + (l - 1);
    let col_ratio = |l: usize| w + 1 + k + (l - 1);
    let row_mu = |l: usize| w + l;
    let row_sigma = |l: usize| w + k + l;

    jac[(row_mu(0), col_mu)] = 1.0;
    jac[(row_sigma(0), col_tau)] = 1.0;
    let mut mu_prev_sigma = r.scale;
    for l in 1..k {
        let delta = r.offsets[l - 1];
        let ratio = r.ratios[l - 1];
        for c in 0..dim {
            let d_mu_prev = jac[(row_mu(l - 1), c)];
            let d_sigma_prev = jac[(row_sigma(l - 1), c)];
            jac[(row_mu(l), c)] = d_mu_prev + delta * d_sigma_prev;
            jac[(row_sigma(l), c)] = ratio * d_sigma_prev;
        }
        jac[(row_mu(l), col_delta(l))] += mu_prev_sigma;
        jac[(row_sigma(l), col_ratio(l))] += mu_prev_sigma;
        mu_prev_sigma *= ratio;
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn natural_vec(p: &MixtureParams) -> Vec<f64> {
        let k = p.k();
        let mut v: Vec<f64> = p.weights[..k - 1].to_vec();
        v.extend(&p.locations);
        v.extend(&p.scales);
        v
    }

    #[test]
    fn two_component_substitution() {
        let p = MixtureParams::gaussian(&[0.5, 0.5], &[0.0, 2.0], &[1.0, 3.0]).unwrap();
        let r = to_reparam(&p).unwrap();
        assert_eq!(r.location, 0.0);
        assert_eq!(r.scale, 1.0);
        assert_eq!(r.offsets, vec![2.0]);
        assert_eq!(r.ratios, vec![3.0]);
        assert_eq!(r.first_weight, 0.5);
        assert!(r.sticks.is_empty());
    }

    #[test]
    fn single_component() {
        let p = MixtureParams::gaussian(&[1.0], &[4.0], &[2.5]).unwrap();
        let r = to_reparam(&p).unwrap();
        assert_eq!((r.location, r.scale), (4.0, 2.5));
        assert!(r.offsets.is_empty() && r.ratios.is_empty());
        assert_eq!(from_reparam(&r, ComponentFamily::Gaussian).unwrap(), p);
    }

    #[test]
    fn nonpositive_reference_scale_rejected() {
        let r = ReparamParams {
            location: 0.0,
            scale: 0.0,
            offsets: vec![1.0],
            ratios: vec![1.0],
            first_weight: 0.5,
            sticks: vec![],
        };
        assert!(matches!(
            from_reparam(&r, ComponentFamily::Gaussian),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = MixtureParams::gaussian(
            &[0.2, 0.3, 0.1, 0.4],
            &[-1.0, 0.5, 2.0, 4.0],
            &[0.7, 1.1, 0.4, 2.0],
        )
        .unwrap();
        let r = to_reparam(&p).unwrap();
        let jac = natural_jacobian(&r);
        let phi = r.to_vec();
        let k = p.k();
        let h = 1e-6;
        for c in 0..phi.len() {
            let mut up = phi.clone();
            let mut dn = phi.clone();
            up[c] += h;
            dn[c] -= h;
            let fu = natural_vec(
                &from_reparam(&ReparamParams::from_vec(k, &up).unwrap(), p.family).unwrap(),
            );
            let fd = natural_vec(
                &from_reparam(&ReparamParams::from_vec(k, &dn).unwrap(), p.family).unwrap(),
            );
            for row in 0..phi.len() {
                let fdv = (fu[row] - fd[row]) / (2.0 * h);
                assert!(
                    (jac[(row, c)] - fdv).abs() < 1e-7,
                    "J[{row},{c}] = {} vs {fdv}",
                    jac[(row, c)]
                );
            }
        }
    }

    fn arb_params() -> impl Strategy<Value = MixtureParams> {
        (1usize..=5).prop_flat_map(|k| {
            (
                proptest::collection::vec(0.05f64..1.0, k),
                proptest::collection::vec(-20.0f64..20.0, k),
                proptest::collection::vec(0.05f64..10.0, k),
            )
                .prop_map(|(w, m, s)| {
                    let total: f64 = w.iter().sum();
                    let mut w: Vec<f64> = w.iter().map(|x| x / total).collect();
                    let head: f64 = w[..w.len() - 1].iter().sum();
                    *w.last_mut().unwrap() = 1.0 - head;
                    MixtureParams::gaussian(&w, &m, &s).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn round_trip_identity(p in arb_params()) {
            let back = from_reparam(&to_reparam(&p).unwrap(), p.family).unwrap();
            for l in 0..p.k() {
                prop_assert!((back.weights[l] - p.weights[l]).abs() <= 1e-12);
                prop_assert!((back.locations[l] - p.locations[l]).abs() <= 1e-12 * (1.0 + p.locations[l].abs()));
                prop_assert!((back.scales[l] - p.scales[l]).abs() <= 1e-12 * p.scales[l]);
            }
        }
    }
}
