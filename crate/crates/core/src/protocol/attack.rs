//! A malicious aggregator that adds crafted offsets so that the argmax
//! reveals one teacher's vote.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::centralised_noise;
use crate::accountant::per_query_epsilon_refined;
use crate::error::{Error, Result};
use crate::genlap::{sample_aggregate, NoiseParams};
use crate::heargmax::clear_argmax;
use crate::rng::{Purpose, SeedTree};

/// The victim votes `k0` when its characteristic is `χ₀` and `k1` when it is
/// `χ₁`. `counts` is the full histogram under `χ₀`, known to the attacker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackScenario {
    pub counts: Vec<u64>,
    pub k0: usize,
    pub k1: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Characteristic {
    Chi0,
    Chi1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackNoise {
    /// The aggregator draws the Laplace noise itself and cancels it.
    CentralisedKnown,
    /// Teachers add secret Gamma-difference shares.
    Distributed,
}

impl AttackScenario {
    pub fn validate(&self) -> Result<()> {
        let k = self.counts.len();
        if k < 2 || self.k0 >= k || self.k1 >= k || self.k0 == self.k1 {
            return Err(Error::Invalid(format!(
                "need two distinct classes k0, k1 below K = {k}, got {} and {}",
                self.k0, self.k1
            )));
        }
        if self.counts[self.k0] == 0 {
            return Err(Error::Invalid(
                "the victim's vote must be counted in k0 under chi0".into(),
            ));
        }
        Ok(())
    }

    pub fn counts_for(&self, chi: Characteristic) -> Vec<u64> {
        let mut c = self.counts.clone();
        if chi == Characteristic::Chi1 {
            c[self.k0] -= 1;
            c[self.k1] += 1;
        }
        c
    }

    /// `ν₀ − 1/2 − n_k` off `{k0, k1}`, `ν₀ − 1 − ν₁` on `k1`, nothing on `k0`.
    pub fn offsets(&self) -> Vec<f64> {
        let nu0 = self.counts[self.k0] as f64;
        let nu1 = self.counts[self.k1] as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                if k == self.k0 {
                    0.0
                } else if k == self.k1 {
                    nu0 - 1.0 - nu1
                } else {
                    nu0 - 0.5 - n as f64
                }
            })
            .collect()
    }

    /// The attacker's guess from an observed argmax.
    pub fn infer(&self, argmax: usize) -> Characteristic {
        if argmax == self.k0 {
            Characteristic::Chi0
        } else {
            Characteristic::Chi1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub noise: AttackNoise,
    pub trials: usize,
    pub correct_chi0: usize,
    pub correct_chi1: usize,
    pub accuracy: f64,
    /// Per-query privacy cost of the noise the attacker cannot see.
    pub epsilon: f64,
    /// `e^ε/(1 + e^ε)`, the best accuracy an `ε`-DP output allows.
    pub accuracy_bound: f64,
}

/// Runs `trials` attacks, alternating the victim's characteristic.
pub fn attack_demo(
    scenario: &AttackScenario,
    noise: AttackNoise,
    params: &NoiseParams,
    trials: usize,
    seed: u64,
) -> Result<AttackOutcome> {
    scenario.validate()?;
    let params = params.snapped()?;
    let seeds = SeedTree::new(seed);
    let offsets = scenario.offsets();
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let chi = if t % 2 == 0 {
                Characteristic::Chi0
            } else {
                Characteristic::Chi1
            };
            let counts: Vec<f64> = scenario.counts_for(chi).iter().map(|&c| c as f64).collect();
            let mut rng = seeds.stream(Purpose::Attack, t as u64, 0);
            let observed: Vec<f64> = match noise {
                AttackNoise::CentralisedKnown => {
                    let noisy = centralised_noise(&counts, params.gamma, &mut rng)?;
                    noisy
                        .iter()
                        .zip(&counts)
                        .zip(&offsets)
                        .map(|((y, c), o)| y + (o - (y - c)))
                        .collect()
                }
                AttackNoise::Distributed => counts
                    .iter()
                    .zip(&offsets)
                    .map(|(c, o)| Ok(c + o + sample_aggregate(&params, &mut rng)?))
                    .collect::<Result<_>>()?,
            };
            Ok((chi, scenario.infer(clear_argmax(&observed)) == chi))
        })
        .collect::<Result<Vec<_>>>()?;
    let correct = |c: Characteristic| hits.iter().filter(|&&(chi, ok)| chi == c && ok).count();
    let (c0, c1) = (correct(Characteristic::Chi0), correct(Characteristic::Chi1));
    let epsilon = per_query_epsilon_refined(params.gamma, params.tau)?;
    Ok(AttackOutcome {
        noise,
        trials,
        correct_chi0: c0,
        correct_chi1: c1,
        accuracy: (c0 + c1) as f64 / trials.max(1) as f64,
        epsilon,
        accuracy_bound: epsilon.exp() / (1.0 + epsilon.exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> AttackScenario {
        AttackScenario {
            counts: vec![40, 120, 30, 60],
            k0: 2,
            k1: 3,
        }
    }

    #[test]
    fn offsets_decide_the_argmax() {
        let s = scenario();
        let o = s.offsets();
        for chi in [Characteristic::Chi0, Characteristic::Chi1] {
            let v: Vec<f64> = s
                .counts_for(chi)
                .iter()
                .zip(&o)
                .map(|(&c, o)| c as f64 + o)
                .collect();
            let top = clear_argmax(&v);
            assert_eq!(top == s.k0, chi == Characteristic::Chi0, "{v:?}");
        }
    }

    #[test]
    fn known_noise_is_fully_cancelled() {
        let p = NoiseParams::new(0.1, 1.0, 250).unwrap();
        let r = attack_demo(&scenario(), AttackNoise::CentralisedKnown, &p, 200, 5).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }
}
