//! Privacy accounting for report-noisy-max with generalized Laplace noise.
//!
//! The per-query cost depends only on `(γ, τ)`. The probability that the
//! noisy winner differs from the clear winner depends on the vote margins and
//! feeds a data-dependent moment bound. Moments compose additively and are
//! converted to an `(ε, δ)` guarantee at the end.

mod analysis;
mod mistake;
mod moments;

use crate::error::{Error, Result};
use crate::genlap::{
    eval_kernel, head_integral, kernel_at_zero, tail_integral, total_mass, GenLapDist, QuadSettings,
};

pub use analysis::{analyze, analyze_with, PrivacyReport, QueryCost, REPORT_SCHEMA};
pub use mistake::{mistake_bound, mistake_bound_general, mistake_term, MistakeInput};
pub use moments::{
    compose, moment_per_query, moment_threshold, tail_epsilon, tail_epsilon_at, MomentBranch,
    MomentsLedger,
};

pub const DEFAULT_DELTA: f64 = 1e-5;
pub const DEFAULT_LMAX: usize = 25;

/// Below this `τ` the refined bound leans on `I(0)`, whose closed form
/// blows up as `τ → 1/2`.
pub const REFINED_WARN_TAU: f64 = 0.55;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma", gamma, "must be positive and finite"));
    }
    Ok(())
}

/// `ε = ln(1 + 2 ∫₀^γ e^{-v}I(v)dv / ∫_{2γ}^∞ e^{-v}I(v)dv)`, for `0 < τ < 1`.
pub fn per_query_epsilon(gamma: f64, tau: f64) -> Result<f64> {
    per_query_epsilon_with(gamma, tau, &QuadSettings::default())
}

pub fn per_query_epsilon_with(gamma: f64, tau: f64, settings: &QuadSettings) -> Result<f64> {
    check_gamma(gamma)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("tau", tau, "must lie in (0, 1)"));
    }
    let head = head_integral(tau, gamma, settings)?;
    let tail = tail_integral(tau, 2.0 * gamma, settings)?;
    Ok((2.0 * head / tail).ln_1p())
}

/// The smaller of the two per-query bounds. The second one, `ln(g(0) − g'(0))`,
/// needs `τ > 1/2`; at `τ = 1` the classical `2γ` is returned.
pub fn per_query_epsilon_refined(gamma: f64, tau: f64) -> Result<f64> {
    per_query_epsilon_refined_with(gamma, tau, &QuadSettings::default())
}

pub fn per_query_epsilon_refined_with(
    gamma: f64,
    tau: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    check_gamma(gamma)?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain("tau", tau, "must lie in (0, 1]"));
    }
    if tau == 1.0 {
        return Ok(2.0 * gamma);
    }
    let first = per_query_epsilon_with(gamma, tau, settings)?;
    if tau <= 0.5 {
        return Ok(first);
    }
    if tau < REFINED_WARN_TAU {
        log::warn!("tau = {tau} is close to 1/2; the refined per-query bound is ill-conditioned");
    }
    Ok(first.min(slope_bound(gamma, tau, settings)?))
}

/// `ln(g(0) − g'(0))`, or `+∞` when the argument is not above one.
fn slope_bound(gamma: f64, tau: f64, settings: &QuadSettings) -> Result<f64> {
    let mass = total_mass(tau);
    let tail = tail_integral(tau, 2.0 * gamma, settings)?;
    let g0 = mass / tail;
    let slope = gamma
        * (mass * (-2.0 * gamma).exp() * eval_kernel(tau, 2.0 * gamma, settings)?
            - kernel_at_zero(tau)? * tail)
        / (tail * tail);
    let m = g0 - slope;
    Ok(if m > 1.0 { m.ln() } else { f64::INFINITY })
}

/// `g(t) = (1 − F(t)) / (1 − F(t + 2))`, the worst-case output-probability
/// ratio at offset `t` between adjacent histograms.
pub fn loss_ratio(dist: &GenLapDist, t: f64) -> Result<f64> {
    Ok(dist.sf(t)? / dist.sf(t + 2.0)?)
}

/// Locates `max g` on `[lo, hi]` by a grid scan refined with golden-section
/// search. Returns `(argmax, max)`.
pub fn max_loss_ratio(dist: &GenLapDist, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    if !(hi > lo) || points < 3 {
        return Err(Error::Invalid(format!(
            "need hi > lo and at least 3 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (lo, loss_ratio(dist, lo)?);
    let mut best_i = 0;
    for i in 1..points {
        let t = lo + step * i as f64;
        let v = loss_ratio(dist, t)?;
        if v > best.1 {
            best = (t, v);
            best_i = i;
        }
    }
    let (mut a, mut b) = (
        lo + step * best_i.saturating_sub(1) as f64,
        (lo + step * (best_i + 1) as f64).min(hi),
    );
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (loss_ratio(dist, c)?, loss_ratio(dist, d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = loss_ratio(dist, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = loss_ratio(dist, d)?;
        }
    }
    let (t, v) = if fc > fd { (c, fc) } else { (d, fd) };
    Ok(if v > best.1 { (t, v) } else { best })
}
