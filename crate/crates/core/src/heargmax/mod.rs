//! Non-interactive argmax over encrypted class scores.
//!
//! Scores are shifted by `A`, rescaled by `b_i` onto the torus and encrypted.
//! Every ordered pair is compared with a sign bootstrap, the `K − 1` results
//! for each class are summed, and a threshold bootstrap at `K − 3/2` marks
//! the class that beat all others.

mod backend;
mod bench;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use backend::{
    signed, torus, Cipher, CipherBackend, CountingBackend, IdealBackend, NoisyBackend, StepFunction,
};
pub use bench::{
    calibrate_sigma, circuit_accuracy, uniform_vote_workload, AccuracyReport, Calibration,
};

pub const DEFAULT_OFFSET: f64 = 900.0;
pub const DEFAULT_THETA1: u32 = 36;
pub const DEFAULT_THETA2: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArgmaxCircuitConfig {
    /// Offset `A` added before rescaling.
    pub offset: f64,
    /// Input modulus `b_i`.
    pub input_modulus: f64,
    /// Output modulus of the comparison bootstraps.
    pub theta1: u32,
    /// Output modulus of the threshold bootstraps.
    pub theta2: u32,
    /// Encryption noise of the noisy backend, in torus units.
    pub sigma_c: f64,
}

impl Default for ArgmaxCircuitConfig {
    fn default() -> Self {
        Self::for_teachers(250)
    }
}

/// Smallest `A` with `P(Y < −A) < 2^{-64}` for `Y ~ Laplace(0, 1/γ)`.
pub fn min_offset(gamma: f64) -> f64 {
    63.0 * std::f64::consts::LN_2 / gamma
}

impl ArgmaxCircuitConfig {
    /// Default constants with `b_i = 2(n + 2A)`.
    pub fn for_teachers(n: usize) -> Self {
        Self::with_offset(n, DEFAULT_OFFSET)
    }

    pub fn with_offset(n: usize, offset: f64) -> Self {
        Self {
            offset,
            input_modulus: 2.0 * (n as f64 + 2.0 * offset),
            theta1: DEFAULT_THETA1,
            theta2: DEFAULT_THETA2,
            sigma_c: 0.0,
        }
    }

    /// Default constants, with `A` raised if `γ` is small enough for 900 to
    /// be an unsafe offset.
    pub fn for_noise(n: usize, gamma: f64) -> Self {
        Self::with_offset(n, DEFAULT_OFFSET.max(min_offset(gamma).ceil()))
    }

    pub fn validate(&self, classes: usize) -> Result<()> {
        if classes < 2 {
            return Err(Error::domain(
                "classes",
                classes as f64,
                "argmax needs K >= 2",
            ));
        }
        if !(self.offset >= 0.0 && self.offset.is_finite()) {
            return Err(Error::domain(
                "offset",
                self.offset,
                "must be finite and non-negative",
            ));
        }
        if !(self.input_modulus > 2.0 * self.offset) {
            return Err(Error::domain(
                "input_modulus",
                self.input_modulus,
                "must exceed twice the offset",
            ));
        }
        if self.theta2 < 2 {
            return Err(Error::domain(
                "theta2",
                self.theta2 as f64,
                "must be at least 2",
            ));
        }
        if 2 * (classes - 1) >= self.theta1 as usize {
            return Err(Error::domain(
                "theta1",
                self.theta1 as f64,
                "must exceed 2(K - 1) so the comparison sum stays below 1/2",
            ));
        }
        if !(self.sigma_c >= 0.0 && self.sigma_c.is_finite()) {
            return Err(Error::domain(
                "sigma_c",
                self.sigma_c,
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }

    /// Comparison noise on a difference of two fresh ciphertexts.
    pub fn sigma_eff(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.sigma_c
    }

    fn sign_step(&self) -> StepFunction {
        StepFunction::new(0.0, 1.0 / self.theta1 as f64, 0.0)
    }

    /// `1/b_θ1` when the phase is not positive, for the `≥` comparisons.
    fn non_positive_step(&self) -> StepFunction {
        StepFunction::new(0.0, 0.0, 1.0 / self.theta1 as f64)
    }

    fn threshold_step(&self, classes: usize) -> StepFunction {
        StepFunction::new(
            (classes as f64 - 1.5) / self.theta1 as f64,
            1.0 / self.theta2 as f64,
            0.0,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rescaled {
    pub phase: f64,
    /// The shifted value fell outside `[0, b_i/2)`.
    pub overflow: bool,
}

/// `(value + A)/b_i mod 1`.
pub fn rescale(value: f64, config: &ArgmaxCircuitConfig) -> Rescaled {
    let shifted = (value + config.offset) / config.input_modulus;
    Rescaled {
        phase: torus(shifted),
        overflow: !(0.0..0.5).contains(&shifted),
    }
}

/// `θ = 1/b_θ1` if `left > right` on the torus, else `0`.
pub fn compare<B: CipherBackend>(
    backend: &mut B,
    left: &B::Cipher,
    right: &B::Cipher,
    config: &ArgmaxCircuitConfig,
) -> Result<B::Cipher> {
    let diff = backend.sub(left, right)?;
    backend.bootstrap(&diff, &config.sign_step())
}

/// `θ = 1/b_θ1` if `left ≥ right`: the complementary step applied to
/// `right − left`.
pub fn compare_at_least<B: CipherBackend>(
    backend: &mut B,
    left: &B::Cipher,
    right: &B::Cipher,
    config: &ArgmaxCircuitConfig,
) -> Result<B::Cipher> {
    let diff = backend.sub(right, left)?;
    backend.bootstrap(&diff, &config.non_positive_step())
}

/// Runs the circuit. The output decrypts to `1/b_θ2` at the winner and `0`
/// elsewhere. Class `k` beats a later class on `≥` and an earlier one on
/// `>`, so tied maxima resolve to the lowest index.
pub fn argmax_circuit<B: CipherBackend>(
    backend: &mut B,
    ciphers: &[B::Cipher],
    config: &ArgmaxCircuitConfig,
) -> Result<Vec<B::Cipher>> {
    let k = ciphers.len();
    config.validate(k)?;
    let threshold = config.threshold_step(k);
    let mut out = Vec::with_capacity(k);
    for (i, ci) in ciphers.iter().enumerate() {
        let mut total: Option<B::Cipher> = None;
        for (j, cj) in ciphers.iter().enumerate() {
            if i == j {
                continue;
            }
            let theta = if i < j {
                compare_at_least(backend, ci, cj, config)?
            } else {
                compare(backend, ci, cj, config)?
            };
            total = Some(match total {
                None => theta,
                Some(t) => backend.add(&t, &theta)?,
            });
        }
        let total = total.expect("K >= 2");
        out.push(backend.bootstrap(&total, &threshold)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneHotDecision {
    pub index: usize,
    /// Zero or several classes were marked.
    pub degenerate: bool,
}

/// Position of the single marked class. Degenerate outputs fall back to the
/// lowest marked index, or to 0 when nothing is marked.
pub fn decrypt_onehot<B: CipherBackend>(
    backend: &B,
    ciphers: &[B::Cipher],
    config: &ArgmaxCircuitConfig,
) -> Result<OneHotDecision> {
    let m = config.theta2 as f64;
    let mut marked = Vec::new();
    for (i, c) in ciphers.iter().enumerate() {
        let level = (backend.decrypt(c)? * m).round() as i64 % config.theta2 as i64;
        if level != 0 {
            marked.push(i);
        }
    }
    Ok(match marked.as_slice() {
        [one] => OneHotDecision {
            index: *one,
            degenerate: false,
        },
        [] => OneHotDecision {
            index: 0,
            degenerate: true,
        },
        [first, ..] => OneHotDecision {
            index: *first,
            degenerate: true,
        },
    })
}

/// Per-call record of a circuit evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitTrace {
    pub bootstraps: u64,
    pub overflow: bool,
    pub decision: OneHotDecision,
}

/// Rescales, encrypts, runs the circuit and decrypts.
pub fn encrypted_argmax<B: CipherBackend>(
    backend: &mut B,
    scores: &[f64],
    config: &ArgmaxCircuitConfig,
) -> Result<CircuitTrace> {
    let mut counting = CountingBackend::new(backend);
    let mut overflow = false;
    let ciphers: Vec<_> = scores
        .iter()
        .map(|&s| {
            let r = rescale(s, config);
            overflow |= r.overflow;
            counting.encrypt(r.phase)
        })
        .collect();
    let out = argmax_circuit(&mut counting, &ciphers, config)?;
    let decision = decrypt_onehot(&counting, &out, config)?;
    Ok(CircuitTrace {
        bootstraps: counting.bootstraps(),
        overflow,
        decision,
    })
}

impl<B: CipherBackend + ?Sized> CipherBackend for &mut B {
    type Cipher = B::Cipher;

    fn encrypt(&mut self, message: f64) -> Self::Cipher {
        (**self).encrypt(message)
    }

    fn add(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher> {
        (**self).add(a, b)
    }

    fn sub(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher> {
        (**self).sub(a, b)
    }

    fn add_plain(&mut self, a: &Self::Cipher, message: f64) -> Result<Self::Cipher> {
        (**self).add_plain(a, message)
    }

    fn bootstrap(&mut self, a: &Self::Cipher, step: &StepFunction) -> Result<Self::Cipher> {
        (**self).bootstrap(a, step)
    }

    fn decrypt(&self, a: &Self::Cipher) -> Result<f64> {
        (**self).decrypt(a)
    }
}

/// Index of the largest score, lowest index on ties.
pub fn clear_argmax<T: PartialOrd + Copy>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
