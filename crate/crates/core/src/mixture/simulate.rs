use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use super::params::MixtureParams;
use crate::error::{Error, Result};

/// Pick a component index with probabilities `weights`.
pub(crate) fn sample_component<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (l, &p) in weights.iter().enumerate() {
        acc += p;
        if u < acc {
            return l;
        }
    }
    // rounding left u above the cumulative sum; take the last positive weight
    weights.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

pub(crate) fn draw<R: Rng + ?Sized>(params: &MixtureParams, rng: &mut R) -> f64 {
    let l = sample_component(&params.weights, rng);
    params.locations[l] + params.scales[l] * params.family_of(l).sample_standard(rng)
}

/// `n` i.i.d. draws from the mixture; identical seeds give identical data.
pub fn simulate(n: usize, params: &MixtureParams, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Argument("sample size must be at least 1".into()));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n).map(|_| draw(params, &mut rng)).collect();
    Dataset::new(format!("simulated(seed={seed})"), values)
}
