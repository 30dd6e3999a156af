use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What colluding teachers do with their noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Disclosure {
    /// Colluders add no noise, or publish it; only honest noise is secret
    /// to anyone.
    #[default]
    Withheld,
    /// Colluders add noise but share it among themselves only.
    SharedAmongColluders,
}

/// Whose privacy guarantee is being computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Viewpoint {
    /// Anyone who is not a teacher.
    Outsider,
    Colluder,
    Honest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollusionSpec {
    pub n: usize,
    pub colluders: BTreeSet<usize>,
    #[serde(default)]
    pub disclosure: Disclosure,
}

impl CollusionSpec {
    pub fn new(n: usize, colluders: BTreeSet<usize>, disclosure: Disclosure) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("at least one teacher is required".into()));
        }
        if let Some(&bad) = colluders.iter().find(|&&c| c >= n) {
            return Err(Error::Invalid(format!(
                "colluder id {bad} out of range for {n} teachers"
            )));
        }
        if colluders.len() == n {
            return Err(Error::Invalid("at least one teacher must be honest".into()));
        }
        Ok(Self {
            n,
            colluders,
            disclosure,
        })
    }

    pub fn honest(n: usize) -> Self {
        Self {
            n,
            colluders: BTreeSet::new(),
            disclosure: Disclosure::Withheld,
        }
    }

    /// The first `n − round(τn)` teachers collude.
    pub fn from_tau(n: usize, tau: f64, disclosure: Disclosure) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::domain("tau", tau, "must lie in (0, 1]"));
        }
        let honest = (tau * n as f64).round() as usize;
        Self::new(n, (0..n - honest.min(n)).collect(), disclosure)
    }

    pub fn is_colluding(&self, teacher: usize) -> bool {
        self.colluders.contains(&teacher)
    }

    pub fn honest_count(&self) -> usize {
        self.n - self.colluders.len()
    }

    /// Fraction of the noise that stays secret from `viewpoint`.
    pub fn tau(&self, viewpoint: Viewpoint) -> Result<f64> {
        let n = self.n as f64;
        let h = self.honest_count();
        let secret = match (self.disclosure, viewpoint) {
            (Disclosure::Withheld, Viewpoint::Outsider | Viewpoint::Colluder) => h,
            (Disclosure::Withheld, Viewpoint::Honest) => h - 1,
            (Disclosure::SharedAmongColluders, Viewpoint::Outsider) => self.n,
            (Disclosure::SharedAmongColluders, Viewpoint::Colluder) => h,
            (Disclosure::SharedAmongColluders, Viewpoint::Honest) => self.n - 1,
        };
        if secret == 0 {
            return Err(Error::domain(
                "tau",
                0.0,
                "no secret noise remains from this viewpoint",
            ));
        }
        Ok(secret as f64 / n)
    }
}
