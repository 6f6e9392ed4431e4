use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GALAXY_CSV: &str = include_str!("../../data/galaxy.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    None,
    Log,
}

/// Univariate sample. `values` hold the data after `transform` was applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    values: Vec<f64>,
    pub transform: Transform,
}

/// Optional sidecar next to a data file (`<file>.meta.json`).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub transform: Transform,
}

impl Dataset {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::with_transform(name, values, Transform::None)
    }

    /// Build from raw values, applying `transform`.
    pub fn with_transform(
        name: impl Into<String>,
        raw: Vec<f64>,
        transform: Transform,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Dataset(
                "dataset must contain at least one value".into(),
            ));
        }
        if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!("non-finite value {v}")));
        }
        let values = match transform {
            Transform::None => raw,
            Transform::Log => {
                if let Some(v) = raw.iter().find(|v| **v <= 0.0) {
                    return Err(Error::Dataset(format!(
                        "log transform requires positive values, found {v}"
                    )));
                }
                raw.into_iter().map(f64::ln).collect()
            }
        };
        Ok(Self {
            name: name.into(),
            values,
            transform,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator; 0 for n = 1).
    pub fn sd(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        (self.values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    /// Empirical quantile with linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        quantile_sorted(&sorted, q)
    }

    /// Parse a single-column CSV with a header row.
    pub fn from_csv_str(name: &str, text: &str, transform: Transform) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        lines
            .next()
            .ok_or_else(|| Error::Dataset(format!("{name}: empty file")))?;
        let mut raw = Vec::new();
        for (i, line) in lines.enumerate() {
            let field = line.split(',').next().unwrap_or("").trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::Dataset(format!("{name}: line {}: cannot parse {field:?}", i + 2))
            })?;
            raw.push(v);
        }
        Self::with_transform(name, raw, transform)
    }

    /// Load a CSV file, honouring a `<file>.meta.json` sidecar when present.
    /// An explicit `transform` overrides the sidecar.
    pub fn load(path: &Path, transform: Option<Transform>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        let meta_path = sidecar_path(path);
        let meta: DatasetMeta = if meta_path.exists() {
            serde_json::from_str(&std::fs::read_to_string(&meta_path)?)?
        } else {
            DatasetMeta::default()
        };
        let name = meta.name.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into())
        });
        Self::from_csv_str(&name, &text, transform.unwrap_or(meta.transform))
    }

    /// Velocities (10^3 km/s) of 82 galaxies in the Corona Borealis region,
    /// as distributed with R's MASS package.
    pub fn galaxy() -> Self {
        Self::from_csv_str("galaxy", GALAXY_CSV, Transform::None).expect("bundled data parses")
    }

    /// Names accepted by [`Dataset::bundled`].
    pub const BUNDLED: &'static [&'static str] = &["galaxy"];

    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "galaxy" => Some(Self::galaxy()),
            _ => None,
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
