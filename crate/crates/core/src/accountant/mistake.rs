use serde::{Deserialize, Serialize};

use super::check_gamma;
use crate::error::{Error, Result};
use crate::special::gamma;

/// Vote margins `Δ_k = n_{k*} − n_k` of every class against the clear winner
/// `k*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeInput {
    pub deltas: Vec<u64>,
}

impl MistakeInput {
    pub fn new(deltas: Vec<u64>) -> Self {
        Self { deltas }
    }

    /// Margins from raw class counts; the winner is the lowest index among
    /// the maxima.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 classes, got {}",
                counts.len()
            )));
        }
        let (winner, &top) = counts
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|&(_, c)| *c)
            .expect("non-empty");
        let deltas = counts
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != winner)
            .map(|(_, &c)| top - c)
            .collect();
        Ok(Self { deltas })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain("tau", tau, "must lie in (0, 1]"));
    }
    Ok(())
}

/// Bound on `P(n_k + Y_k ≥ n_{k*} + Y_{k*})` for one class with margin `delta`.
pub fn mistake_term(gamma_: f64, tau: f64, delta: u64) -> Result<f64> {
    check_gamma(gamma_)?;
    check_tau(tau)?;
    let x = gamma_ * delta as f64;
    let term = if tau == 1.0 {
        (2.0 + x) / (4.0 * x.exp())
    } else {
        let g2 = gamma(tau).powi(2);
        let extra = if tau > 0.5 {
            x.powf(2.0 * tau - 1.0) / (tau * 2f64.powf(4.0 * tau - 2.0) * g2)
        } else {
            let s = 1.5 * tau;
            x.powf(0.5 * tau) / (tau * 2f64.powf(2.5 * tau - 1.0) * g2)
                * s.powf(s)
                * (2.0 / tau - 3.0).powf(1.0 - s)
        };
        (-x).exp() * (0.5 + extra)
    };
    Ok(term.min(1.0))
}

/// Union bound on the probability that the noisy argmax misses the clear one.
pub fn mistake_bound(gamma_: f64, tau: f64, input: &MistakeInput) -> Result<f64> {
    input
        .deltas
        .iter()
        .map(|&d| mistake_term(gamma_, tau, d))
        .sum()
}

/// The same bound through a Hölder exponent `q > 1/(1−τ)`; any admissible
/// `q` gives a valid bound and `q = 1/(1 − 3τ/2)` recovers the default one
/// for `τ ≤ 1/2`.
pub fn mistake_bound_general(gamma_: f64, tau: f64, input: &MistakeInput, q: f64) -> Result<f64> {
    check_gamma(gamma_)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("tau", tau, "must lie in (0, 1)"));
    }
    if !(q > 1.0 / (1.0 - tau) && q.is_finite()) {
        return Err(Error::domain("q", q, "must exceed 1/(1 - tau)"));
    }
    let p = 1.0 / (1.0 - 1.0 / q);
    let denom = tau
        * 2f64.powf(4.0 * tau - 2.0 + 1.0 / q)
        * gamma(tau).powi(2)
        * p.powf(1.0 / p)
        * (q * (1.0 - tau) - 1.0).powf(1.0 / q);
    Ok(input
        .deltas
        .iter()
        .map(|&d| {
            let x = gamma_ * d as f64;
            ((-x).exp() * (0.5 + x.powf(2.0 * tau - 1.0 + 1.0 / q) / denom)).min(1.0)
        })
        .sum())
}
