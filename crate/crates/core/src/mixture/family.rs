use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Location-scale family shared by every component of a mixture.
///
/// The Gumbel family is the maximum-extreme-value form:
/// `f(x) = exp(-(z + exp(-z))) / σ` with `z = (x - μ) / σ`, so its long tail
/// is on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentFamily {
    #[default]
    Gaussian,
    StudentT {
        df: f64,
    },
    Gumbel,
}

impl std::str::FromStr for ComponentFamily {
    type Err = Error;

    /// `gaussian`, `gumbel` or `student-t:DF`.
    fn from_str(s: &str) -> Result<Self> {
        let family = match s {
            "gaussian" | "normal" => ComponentFamily::Gaussian,
            "gumbel" => ComponentFamily::Gumbel,
            _ => {
                let df = s
                    .strip_prefix("student-t:")
                    .or_else(|| s.strip_prefix("t:"))
                    .and_then(|d| d.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Argument(format!(
                            "unknown family {s:?}; expected gaussian, gumbel or student-t:DF"
                        ))
                    })?;
                ComponentFamily::StudentT { df }
            }
        };
        family.validate()?;
        Ok(family)
    }
}

impl ComponentFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ComponentFamily::StudentT { df } if !(df > 0.0 && df.is_finite()) => Err(
                Error::ParameterDomain(format!("Student-t df must be positive, got {df}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ComponentFamily::Gaussian => "gaussian".into(),
            ComponentFamily::StudentT { df } => format!("student_t(df={df})"),
            ComponentFamily::Gumbel => "gumbel".into(),
        }
    }

    /// Log density at `x` for location `loc` and scale `scale`.
    pub fn ln_pdf(&self, x: f64, loc: f64, scale: f64) -> f64 {
        self.ln_norm() + self.ln_kernel((x - loc) / scale) - scale.ln()
    }

    /// `z`-free part of the standardized log density.
    pub fn ln_norm(&self) -> f64 {
        match *self {
            ComponentFamily::Gaussian => -LN_SQRT_2PI,
            ComponentFamily::StudentT { df } => {
                ln_gamma(0.5 * (df + 1.0))
                    - ln_gamma(0.5 * df)
                    - 0.5 * (df * std::f64::consts::PI).ln()
            }
            ComponentFamily::Gumbel => 0.0,
        }
    }

    /// `z`-dependent part of the standardized log density.
    #[inline]
    pub fn ln_kernel(&self, z: f64) -> f64 {
        match *self {
            ComponentFamily::Gaussian => -0.5 * z * z,
            ComponentFamily::StudentT { df } => -0.5 * (df + 1.0) * (z * z / df).ln_1p(),
            ComponentFamily::Gumbel => -z - (-z).exp(),
        }
    }

    pub fn pdf(&self, x: f64, loc: f64, scale: f64) -> f64 {
        self.ln_pdf(x, loc, scale).exp()
    }

    /// Closed-form scores `(∂ ln f / ∂μ, ∂ ln f / ∂σ)`.
    pub fn scores(&self, x: f64, loc: f64, scale: f64) -> (f64, f64) {
        self.standard_scores((x - loc) / scale, 1.0 / scale)
    }

    /// Scores from the standardized point `z` and `1/σ`.
    #[inline]
    pub fn standard_scores(&self, z: f64, inv_scale: f64) -> (f64, f64) {
        // d ln f / dz; the location score is -that / σ.
        let dz = match *self {
            ComponentFamily::Gaussian => -z,
            ComponentFamily::StudentT { df } => -(df + 1.0) * z / (df + z * z),
            ComponentFamily::Gumbel => -1.0 + (-z).exp(),
        };
        (-dz * inv_scale, -(1.0 + z * dz) * inv_scale)
    }

    /// Draw from the standardized law (location 0, scale 1).
    pub fn sample_standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ComponentFamily::Gaussian => StandardNormal.sample(rng),
            ComponentFamily::StudentT { df } => StudentT::new(df)
                .expect("df validated at construction")
                .sample(rng),
            ComponentFamily::Gumbel => {
                let u: f64 = rng.random::<f64>();
                // u == 0 has probability 2^-53; nudge it to keep the log finite.
                -(-(u.max(f64::MIN_POSITIVE)).ln()).ln()
            }
        }
    }

    /// Standardized truncation interval `[lo, hi]` (in units of the scale)
    /// outside of which each tail holds less than roughly 1e-15 of the mass.
    ///
    /// Student-t tails are polynomial; the interval returned for them holds
    /// far more than 1e-15 in the tails, and quadrature over the whole line
    /// (Gauss-Kronrod) should be preferred for that family.
    pub fn standard_bounds(&self) -> (f64, f64) {
        match *self {
            ComponentFamily::Gaussian => (-8.0, 8.0),
            ComponentFamily::Gumbel => (-4.0, 35.0),
            ComponentFamily::StudentT { df } => {
                // P(|T| > t) ~ t^-df; aim for 1e-8 capped at 1e4 scales.
                let t = (1e8f64).powf(1.0 / df).clamp(8.0, 1e4);
                (-t, t)
            }
        }
    }

    pub fn has_heavy_tails(&self) -> bool {
        matches!(self, ComponentFamily::StudentT { .. })
    }

    /// Mean and standard deviation of the standardized law, where they exist.
    pub fn standard_moments(&self) -> Option<(f64, f64)> {
        match *self {
            ComponentFamily::Gaussian => Some((0.0, 1.0)),
            ComponentFamily::StudentT { df } if df > 2.0 => Some((0.0, (df / (df - 2.0)).sqrt())),
            ComponentFamily::StudentT { .. } => None,
            // Euler-Mascheroni constant; sd = π / √6.
            ComponentFamily::Gumbel => Some((0.577_215_664_901_532_9, 1.282_549_830_161_864)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_diff_scores(f: ComponentFamily, x: f64, m: f64, s: f64) -> (f64, f64) {
        let h = 1e-6;
        let dm = (f.ln_pdf(x, m + h, s) - f.ln_pdf(x, m - h, s)) / (2.0 * h);
        let ds = (f.ln_pdf(x, m, s + h) - f.ln_pdf(x, m, s - h)) / (2.0 * h);
        (dm, ds)
    }

    #[test]
    fn scores_match_finite_differences() {
        for fam in [
            ComponentFamily::Gaussian,
            ComponentFamily::StudentT { df: 3.0 },
            ComponentFamily::Gumbel,
        ] {
            for &x in &[-2.5, -0.3, 0.0, 1.7, 4.0] {
                let (a, b) = fam.scores(x, 0.4, 1.3);
                let (c, d) = finite_diff_scores(fam, x, 0.4, 1.3);
                assert!((a - c).abs() < 1e-7, "{fam:?} loc score at {x}");
                assert!((b - d).abs() < 1e-7, "{fam:?} scale score at {x}");
            }
        }
    }

    #[test]
    fn gumbel_uses_maximum_convention() {
        let g = ComponentFamily::Gumbel;
        // Mode at the location, right tail heavier than the left.
        assert!((g.pdf(0.0, 0.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(g.pdf(3.0, 0.0, 1.0) > g.pdf(-3.0, 0.0, 1.0));
    }

    #[test]
    fn student_t_df1_is_cauchy() {
        let t = ComponentFamily::StudentT { df: 1.0 };
        let cauchy = 1.0 / (std::f64::consts::PI * (1.0 + 4.0));
        assert!((t.pdf(2.0, 0.0, 1.0) - cauchy).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_df() {
        assert!(ComponentFamily::StudentT { df: 0.0 }.validate().is_err());
        assert!(ComponentFamily::StudentT { df: 2.5 }.validate().is_ok());
    }
}
