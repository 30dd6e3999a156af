use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genlap::{sample_laplace, GammaSampler, NoiseParams};
use rand_distr::Distribution;

/// One teacher's one-hot vote with its noise shares added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVote {
    pub teacher: usize,
    pub coords: Vec<f64>,
    pub noised: bool,
}

/// One-hot at `label`, plus an independent `G₁ − G₂` share on every
/// coordinate when `add_noise` is set.
pub fn encode_vote<R: Rng + ?Sized>(
    teacher: usize,
    label: usize,
    classes: usize,
    params: &NoiseParams,
    rng: &mut R,
    add_noise: bool,
) -> Result<EncodedVote> {
    if label >= classes {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    let mut coords = vec![0.0; classes];
    coords[label] = 1.0;
    if add_noise {
        params.validate()?;
        let g = GammaSampler::new(1.0 / params.n as f64, 1.0 / params.gamma)?;
        for c in &mut coords {
            *c += g.sample(rng) - g.sample(rng);
        }
    }
    Ok(EncodedVote {
        teacher,
        coords,
        noised: add_noise,
    })
}

/// Coordinate-wise sum.
pub fn aggregate(classes: usize, votes: &[EncodedVote]) -> Result<Vec<f64>> {
    let mut total = vec![0.0; classes];
    for v in votes {
        if v.coords.len() != classes {
            return Err(Error::ShapeMismatch {
                expected: classes,
                found: v.coords.len(),
            });
        }
        for (t, c) in total.iter_mut().zip(&v.coords) {
            *t += c;
        }
    }
    Ok(total)
}

/// Counts plus i.i.d. `Laplace(0, 1/γ)` drawn by the aggregator.
pub fn centralised_noise<R: Rng + ?Sized>(
    counts: &[f64],
    gamma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma", gamma, "must be positive and finite"));
    }
    Ok(counts
        .iter()
        .map(|&c| c + sample_laplace(gamma, rng))
        .collect())
}
