use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{hash3, unit_from_hash};

/// A teacher's labeling function, deterministic in `(oracle, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TeacherOracle {
    /// `labels[x]`.
    Lookup {
        labels: Vec<usize>,
    },
    Fixed {
        label: usize,
    },
    UniformRandom {
        seed: u64,
    },
    /// Returns `truth[x]`, except with probability `error_rate` a uniformly
    /// chosen other class.
    MajorityWithError {
        truth: Vec<usize>,
        error_rate: f64,
        seed: u64,
    },
}

impl TeacherOracle {
    pub fn label(&self, x: usize, classes: usize) -> Result<usize> {
        if classes == 0 {
            return Err(Error::Invalid("at least one class is required".into()));
        }
        let label = match self {
            TeacherOracle::Lookup { labels } => *labels.get(x).ok_or_else(|| {
                Error::Invalid(format!("lookup oracle has no label for input {x}"))
            })?,
            TeacherOracle::Fixed { label } => *label,
            TeacherOracle::UniformRandom { seed } => pick(hash3(*seed, x as u64, 0), classes),
            TeacherOracle::MajorityWithError {
                truth,
                error_rate,
                seed,
            } => {
                let t = *truth.get(x).ok_or_else(|| {
                    Error::Invalid(format!("majority oracle has no true label for input {x}"))
                })?;
                if classes > 1 && unit_from_hash(hash3(*seed, x as u64, 1)) < *error_rate {
                    let r = pick(hash3(*seed, x as u64, 2), classes - 1);
                    if r >= t {
                        r + 1
                    } else {
                        r
                    }
                } else {
                    t
                }
            }
        };
        if label >= classes {
            return Err(Error::LabelOutOfRange { label, classes });
        }
        Ok(label)
    }
}

fn pick(h: u64, classes: usize) -> usize {
    ((h as u128 * classes as u128) >> 64) as usize
}

/// `n` teachers that agree with `truth` up to independent errors.
pub fn noisy_ensemble(n: usize, truth: &[usize], error_rate: f64, seed: u64) -> Vec<TeacherOracle> {
    (0..n)
        .map(|i| TeacherOracle::MajorityWithError {
            truth: truth.to_vec(),
            error_rate,
            seed: hash3(seed, i as u64, 0x7EAC),
        })
        .collect()
}

/// `n` teachers voting uniformly at random.
pub fn uniform_ensemble(n: usize, seed: u64) -> Vec<TeacherOracle> {
    (0..n)
        .map(|i| TeacherOracle::UniformRandom {
            seed: hash3(seed, i as u64, 0x0F1C),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_are_deterministic() {
        let o = TeacherOracle::UniformRandom { seed: 9 };
        assert_eq!(o.label(4, 10).unwrap(), o.label(4, 10).unwrap());
        let m = TeacherOracle::MajorityWithError {
            truth: vec![3; 100],
            error_rate: 0.3,
            seed: 1,
        };
        let wrong = (0..100).filter(|&x| m.label(x, 10).unwrap() != 3).count();
        assert!((15..=45).contains(&wrong), "{wrong}");
    }

    #[test]
    fn labels_are_range_checked() {
        assert_eq!(
            TeacherOracle::Fixed { label: 4 }.label(0, 3),
            Err(Error::LabelOutOfRange {
                label: 4,
                classes: 3
            })
        );
        assert!(TeacherOracle::Lookup { labels: vec![0] }
            .label(1, 3)
            .is_err());
    }
}
