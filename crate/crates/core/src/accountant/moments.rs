use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which moment bounds were in play for a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentBranch {
    /// The mistake probability was small enough for the data-dependent term.
    DataDependent,
    /// Only `εl` and `ε²l(l+1)/2` applied.
    DataIndependent,
}

/// `α(l)` for `l = 1..=lmax`. `alpha[i]` holds `α(i + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsLedger {
    pub lmax: usize,
    pub alpha: Vec<f64>,
}

impl MomentsLedger {
    pub fn zeros(lmax: usize) -> Self {
        Self {
            lmax,
            alpha: vec![0.0; lmax],
        }
    }

    /// The ledger of one query with cost `eps` and mistake probability `q`.
    pub fn per_query(eps: f64, q: f64, lmax: usize) -> Result<(Self, MomentBranch)> {
        check_lmax(lmax)?;
        let mut branch = MomentBranch::DataIndependent;
        let alpha = (1..=lmax)
            .map(|l| {
                let (a, b) = moment_per_query(eps, q, l)?;
                branch = b;
                Ok(a)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Self { lmax, alpha }, branch))
    }

    pub fn alpha(&self, l: usize) -> f64 {
        self.alpha[l - 1]
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if other.lmax != self.lmax || other.alpha.len() != self.alpha.len() {
            return Err(Error::ShapeMismatch {
                expected: self.lmax,
                found: other.lmax,
            });
        }
        for (a, b) in self.alpha.iter_mut().zip(&other.alpha) {
            *a += b;
        }
        Ok(())
    }
}

fn check_lmax(lmax: usize) -> Result<()> {
    if lmax == 0 {
        return Err(Error::domain("lmax", 0.0, "must be at least 1"));
    }
    Ok(())
}

/// `(e^ε − 1)/(e^{2ε} − 1) = 1/(e^ε + 1)`.
pub fn moment_threshold(eps: f64) -> f64 {
    1.0 / (eps.exp() + 1.0)
}

/// `α(l)` for a single query: the smallest of `εl`, `ε²l(l+1)/2` and, when
/// `q` is below [`moment_threshold`], the data-dependent term
/// `ln((1−q)((1−q)/(1−e^ε q))^l + q e^{εl})`.
pub fn moment_per_query(eps: f64, q: f64, l: usize) -> Result<(f64, MomentBranch)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("eps", eps, "must be positive and finite"));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain("q", q, "must lie in [0, 1)"));
    }
    if l == 0 {
        return Err(Error::domain("l", 0.0, "must be at least 1"));
    }
    let lf = l as f64;
    let linear = eps * lf;
    let quadratic = 0.5 * eps * eps * lf * (lf + 1.0);
    let base = linear.min(quadratic);
    if q >= moment_threshold(eps) {
        return Ok((base, MomentBranch::DataIndependent));
    }
    let a = (lf + 1.0) * (-q).ln_1p() - lf * (-eps.exp() * q).ln_1p();
    let dependent = (a.exp_m1() + q * (eps * lf).exp()).ln_1p();
    Ok((base.min(dependent).max(0.0), MomentBranch::DataDependent))
}

/// Elementwise sum of ledgers sharing one `lmax`.
pub fn compose(ledgers: &[MomentsLedger]) -> Result<MomentsLedger> {
    let first = ledgers
        .first()
        .ok_or_else(|| Error::Invalid("cannot compose an empty list of ledgers".into()))?;
    let mut total = MomentsLedger::zeros(first.lmax);
    for l in ledgers {
        total.add_assign(l)?;
    }
    Ok(total)
}

/// `min_l (α(l) + ln(1/δ))/l`.
pub fn tail_epsilon(ledger: &MomentsLedger, delta: f64) -> Result<f64> {
    tail_epsilon_at(ledger, delta).map(|(e, _)| e)
}

/// [`tail_epsilon`] together with the minimizing `l`.
pub fn tail_epsilon_at(ledger: &MomentsLedger, delta: f64) -> Result<(f64, usize)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta", delta, "must lie in (0, 1)"));
    }
    check_lmax(ledger.lmax)?;
    let log_inv = -delta.ln();
    Ok(ledger
        .alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| ((a + log_inv) / (i + 1) as f64, i + 1))
        .fold(
            (f64::INFINITY, 0),
            |best, cur| if cur.0 < best.0 { cur } else { best },
        ))
}
