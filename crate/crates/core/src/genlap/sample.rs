//! Samplers for the noise shares.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::NoiseParams;
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedTree};

const BATCH_CHUNK: usize = 10_000;

/// `Gamma(shape, scale)`.
///
/// Shapes below one use Ahrens and Dieter's GS rejection scheme; shapes at
/// or above one use Marsaglia and Tsang's squeeze method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSampler {
    shape: f64,
    scale: f64,
}

impl GammaSampler {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::domain("shape", shape, "must be positive and finite"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain("scale", scale, "must be positive and finite"));
        }
        Ok(Self { shape, scale })
    }

    fn unit_below_one<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
        let b = 1.0 + a / std::f64::consts::E;
        let inv_a = 1.0 / a;
        loop {
            let p = b * rng.random::<f64>();
            let u: f64 = rng.random();
            if p <= 1.0 {
                let x = p.powf(inv_a);
                // Squeeze: exp(-x) >= 1 - x.
                if u <= 1.0 - x || u <= (-x).exp() {
                    return x;
                }
            } else {
                let x = -((b - p) * inv_a).ln();
                if u <= x.powf(a - 1.0) {
                    return x;
                }
            }
        }
    }

    fn unit_at_least_one<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
        let d = a - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let t = 1.0 + c * z;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u: f64 = rng.random();
            let z2 = z * z;
            if u < 1.0 - 0.0331 * z2 * z2 || u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}

impl Distribution<f64> for GammaSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let unit = if self.shape < 1.0 {
            Self::unit_below_one(self.shape, rng)
        } else {
            Self::unit_at_least_one(self.shape, rng)
        };
        unit * self.scale
    }
}

/// One teacher's share `G₁ − G₂`, `Gᵢ ~ Gamma(1/n, 1/γ)`.
pub fn sample_share<R: Rng + ?Sized>(gamma: f64, n: usize, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "at least one teacher is required"));
    }
    let g = GammaSampler::new(1.0 / n as f64, 1.0 / gamma)?;
    Ok(g.sample(rng) - g.sample(rng))
}

/// Sum of `round(τn)` independent shares.
pub fn sample_aggregate<R: Rng + ?Sized>(params: &NoiseParams, rng: &mut R) -> Result<f64> {
    params.validate()?;
    let m = params.share_count();
    if m == 0 {
        return Err(Error::domain(
            "tau",
            params.tau,
            "round(tau * n) must be at least 1",
        ));
    }
    let g = GammaSampler::new(1.0 / params.n as f64, 1.0 / params.gamma)?;
    Ok((0..m).map(|_| g.sample(rng) - g.sample(rng)).sum())
}

/// `count` aggregates, drawn in chunks of fixed size with one sampling
/// stream per chunk. The result does not depend on the thread count.
pub fn sample_aggregates(params: &NoiseParams, count: usize, seeds: &SeedTree) -> Result<Vec<f64>> {
    let chunks = (0..count.div_ceil(BATCH_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = seeds.stream(Purpose::Sampling, c as u64, 0);
            let len = BATCH_CHUNK.min(count - c * BATCH_CHUNK);
            (0..len)
                .map(|_| sample_aggregate(params, &mut rng))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.concat())
}

/// `Laplace(0, 1/γ)` by inversion.
pub fn sample_laplace<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -u.signum() * (-2.0 * u.abs()).ln_1p() / gamma
}
