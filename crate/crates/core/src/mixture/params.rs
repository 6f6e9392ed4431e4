use serde::{Deserialize, Serialize};

use super::family::ComponentFamily;
use crate::error::{Error, Result};

pub const SIMPLEX_TOL: f64 = 1e-12;

/// Weights, locations and scales of a `k`-component mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub weights: Vec<f64>,
    pub locations: Vec<f64>,
    pub scales: Vec<f64>,
    #[serde(default)]
    pub family: ComponentFamily,
    /// Per-component families overriding `family`, for mixtures such as a
    /// Gaussian next to a Student t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_families: Option<Vec<ComponentFamily>>,
}

impl MixtureParams {
    pub fn new(
        weights: Vec<f64>,
        locations: Vec<f64>,
        scales: Vec<f64>,
        family: ComponentFamily,
    ) -> Result<Self> {
        let params = Self {
            weights,
            locations,
            scales,
            family,
            component_families: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Mixture whose components come from different families.
    pub fn heterogeneous(
        weights: Vec<f64>,
        locations: Vec<f64>,
        scales: Vec<f64>,
        families: Vec<ComponentFamily>,
    ) -> Result<Self> {
        let family = families.first().copied().unwrap_or_default();
        let params = Self {
            weights,
            locations,
            scales,
            family,
            component_families: Some(families),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn family_of(&self, l: usize) -> ComponentFamily {
        match &self.component_families {
            Some(f) => f[l],
            None => self.family,
        }
    }

    pub fn gaussian(weights: &[f64], locations: &[f64], scales: &[f64]) -> Result<Self> {
        Self::new(
            weights.to_vec(),
            locations.to_vec(),
            scales.to_vec(),
            ComponentFamily::Gaussian,
        )
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.weights.len();
        if k == 0 {
            return Err(Error::ParameterDomain("mixture needs k >= 1".into()));
        }
        if self.locations.len() != k || self.scales.len() != k {
            return Err(Error::ParameterDomain(format!(
                "length mismatch: {} weights, {} locations, {} scales",
                k,
                self.locations.len(),
                self.scales.len()
            )));
        }
        self.family.validate()?;
        if let Some(f) = &self.component_families {
            if f.len() != k {
                return Err(Error::ParameterDomain(format!(
                    "{} component families for k={k}",
                    f.len()
                )));
            }
            for fam in f {
                fam.validate()?;
            }
        }
        if let Some(p) = self.weights.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ParameterDomain(format!("weight {p} outside [0, 1]")));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::ParameterDomain(format!(
                "weights sum to {total}, not 1"
            )));
        }
        if let Some(m) = self.locations.iter().find(|m| !m.is_finite()) {
            return Err(Error::ParameterDomain(format!("non-finite location {m}")));
        }
        if let Some(s) = self.scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::ParameterDomain(format!(
                "scale must be positive, got {s}"
            )));
        }
        Ok(())
    }

    /// `ln(p_ℓ) + ln f_ℓ(x)` for every component (−∞ for zero weights).
    pub fn component_log_terms(&self, x: f64, out: &mut [f64]) {
        for (l, o) in out.iter_mut().enumerate() {
            let p = self.weights[l];
            *o = if p > 0.0 {
                p.ln()
                    + self
                        .family_of(l)
                        .ln_pdf(x, self.locations[l], self.scales[l])
            } else {
                f64::NEG_INFINITY
            };
        }
    }

    /// Interval covering every component's bulk, as used by the truncated
    /// quadrature rules: `[min(μ + lo·σ), max(μ + hi·σ)]`.
    pub fn truncation_bounds(&self) -> (f64, f64) {
        (0..self.k()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| {
            let (lo, hi) = self.family_of(l).standard_bounds();
            let (m, s) = (self.locations[l], self.scales[l]);
            (a.min(m + lo * s), b.max(m + hi * s))
        })
    }

    /// Same parameters with components reordered by `perm` (new ℓ ← old perm[ℓ]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            weights: perm.iter().map(|&i| self.weights[i]).collect(),
            locations: perm.iter().map(|&i| self.locations[i]).collect(),
            scales: perm.iter().map(|&i| self.scales[i]).collect(),
            family: self.family,
            component_families: self
                .component_families
                .as_ref()
                .map(|f| perm.iter().map(|&i| f[i]).collect()),
        }
    }
}

/// Component labels `z_i ∈ {0..k}` (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationVector(pub Vec<usize>);

impl AllocationVector {
    pub fn counts(&self, k: usize) -> Vec<usize> {
        let mut n = vec![0; k];
        for &z in &self.0 {
            if z < k {
                n[z] += 1;
            }
        }
        n
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match self.0.iter().enumerate().find(|(_, &z)| z >= k) {
            Some((index, &value)) => Err(Error::Allocation { index, value, k }),
            None => Ok(()),
        }
    }
}
