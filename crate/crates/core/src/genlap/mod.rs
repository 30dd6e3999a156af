//! The generalized Laplace law: the distribution of a sum of `τn` independent
//! Gamma-difference shares, each `G₁ − G₂` with `Gᵢ ~ Gamma(1/n, 1/γ)`.
//!
//! Its density is `L e^{-γ|u|} I_τ(γ|u|)` with `L = γ/Γ(τ)²`, and everything
//! here reduces to the classical Laplace law at `τ = 1`.

pub mod kernel;
pub mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

pub use kernel::{
    eval_kernel, head_integral, kernel_at_zero, tail_integral, tail_integral_iterated, total_mass,
    MAX_TAIL_ARGUMENT,
};
pub use sample::{sample_aggregate, sample_aggregates, sample_laplace, sample_share, GammaSampler};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Inverse noise scale.
    pub gamma: f64,
    /// Fraction of teachers whose noise stays secret.
    pub tau: f64,
    /// Number of teachers.
    pub n: usize,
}

impl NoiseParams {
    pub fn new(gamma: f64, tau: f64, n: usize) -> Result<Self> {
        let p = Self { gamma, tau, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(
                "gamma",
                self.gamma,
                "must be positive and finite",
            ));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::domain("tau", self.tau, "must lie in (0, 1]"));
        }
        if self.n == 0 {
            return Err(Error::domain("n", 0.0, "at least one teacher is required"));
        }
        Ok(())
    }

    /// Number of secret shares, `round(τn)`.
    pub fn share_count(&self) -> usize {
        (self.tau * self.n as f64).round() as usize
    }

    /// The same parameters with `τ` moved to `round(τn)/n`.
    pub fn snapped(&self) -> Result<Self> {
        self.validate()?;
        let m = self.share_count();
        if m == 0 {
            return Err(Error::domain(
                "tau",
                self.tau,
                "round(tau * n) must be at least 1",
            ));
        }
        Ok(Self {
            tau: m as f64 / self.n as f64,
            ..*self
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityMode {
    /// Integrate `[0, 1]` in the variable `u = t^τ`.
    #[default]
    PowerSubstitution,
    /// Integrate the raw integrand and let adaptive bisection cope.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub singularity: SingularityMode,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            singularity: SingularityMode::PowerSubstitution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenLapDist {
    pub params: NoiseParams,
    pub settings: QuadSettings,
}

impl GenLapDist {
    pub fn new(params: NoiseParams) -> Result<Self> {
        Self::with_settings(params, QuadSettings::default())
    }

    pub fn with_settings(params: NoiseParams, settings: QuadSettings) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, settings })
    }

    /// Normalizing constant `γ/Γ(τ)²`.
    pub fn normalizer(&self) -> f64 {
        let g = gamma(self.params.tau);
        self.params.gamma / (g * g)
    }

    pub fn density(&self, u: f64) -> Result<f64> {
        let NoiseParams { gamma: g, tau, .. } = self.params;
        let x = g * u.abs();
        if tau == 1.0 {
            return Ok(0.5 * g * (-x).exp());
        }
        if u == 0.0 && tau <= 0.5 {
            return Err(Error::domain(
                "u",
                u,
                "density is unbounded at 0 for tau <= 1/2",
            ));
        }
        Ok(self.normalizer() * (-x).exp() * eval_kernel(tau, x, &self.settings)?)
    }

    /// `P(X ≤ t)`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.5);
        }
        let upper = self.upper_tail(t.abs())?;
        Ok(if t > 0.0 { 1.0 - upper } else { upper })
    }

    /// `P(X > t)`, accurate far into the right tail.
    pub fn sf(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.5);
        }
        let upper = self.upper_tail(t.abs())?;
        Ok(if t > 0.0 { upper } else { 1.0 - upper })
    }

    /// `P(X > s)` for `s > 0`.
    fn upper_tail(&self, s: f64) -> Result<f64> {
        let NoiseParams { gamma: g, tau, .. } = self.params;
        let a = g * s;
        if tau == 1.0 {
            return Ok(0.5 * (-a).exp());
        }
        if a > MAX_TAIL_ARGUMENT {
            return Ok(0.0);
        }
        let gt = gamma(tau);
        let p = tail_integral(tau, a, &self.settings)? / (gt * gt);
        Ok(p.clamp(0.0, 0.5))
    }
}
