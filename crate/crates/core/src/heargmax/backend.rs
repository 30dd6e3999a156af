//! Encrypted-scalar backends. Plaintexts live on the torus `[0, 1)`.

use std::sync::atomic::{AtomicU64, Ordering};

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// `g_{t,a,b}`: `above` when the signed phase offset from `threshold` is
/// strictly positive, `below` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFunction {
    pub threshold: f64,
    pub above: f64,
    pub below: f64,
}

impl StepFunction {
    pub fn new(threshold: f64, above: f64, below: f64) -> Self {
        Self {
            threshold,
            above,
            below,
        }
    }

    pub fn eval(&self, phase: f64) -> f64 {
        if signed(phase - self.threshold) > 0.0 {
            self.above
        } else {
            self.below
        }
    }
}

/// Reduces to `[0, 1)`.
pub fn torus(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of a torus element in `[-1/2, 1/2)`.
pub fn signed(x: f64) -> f64 {
    let r = torus(x);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

pub trait CipherBackend {
    type Cipher: Clone + std::fmt::Debug;

    fn encrypt(&mut self, message: f64) -> Self::Cipher;
    fn add(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher>;
    fn sub(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher>;
    fn add_plain(&mut self, a: &Self::Cipher, message: f64) -> Result<Self::Cipher>;
    fn bootstrap(&mut self, a: &Self::Cipher, step: &StepFunction) -> Result<Self::Cipher>;
    fn decrypt(&self, a: &Self::Cipher) -> Result<f64>;
}

/// A simulated ciphertext: its phase plus the id of the backend that made it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cipher {
    owner: u64,
    phase: f64,
}

fn next_owner() -> u64 {
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

/// Phase arithmetic shared by the simulated backends.
#[derive(Debug)]
struct PhaseCore {
    id: u64,
}

impl PhaseCore {
    fn new() -> Self {
        Self { id: next_owner() }
    }

    fn own(&self, c: &Cipher) -> Result<f64> {
        if c.owner == self.id {
            Ok(c.phase)
        } else {
            Err(Error::BackendMismatch)
        }
    }

    fn make(&self, phase: f64) -> Cipher {
        Cipher {
            owner: self.id,
            phase: torus(phase),
        }
    }

    fn add(&self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        Ok(self.make(self.own(a)? + self.own(b)?))
    }

    fn sub(&self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        Ok(self.make(self.own(a)? - self.own(b)?))
    }

    fn add_plain(&self, a: &Cipher, m: f64) -> Result<Cipher> {
        Ok(self.make(self.own(a)? + m))
    }
}

/// Exact arithmetic: decryption returns the encrypted value and bootstraps
/// apply the step function without error.
#[derive(Debug)]
pub struct IdealBackend {
    core: PhaseCore,
}

impl IdealBackend {
    pub fn new() -> Self {
        Self {
            core: PhaseCore::new(),
        }
    }
}

impl Default for IdealBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl CipherBackend for IdealBackend {
    type Cipher = Cipher;

    fn encrypt(&mut self, message: f64) -> Cipher {
        self.core.make(message)
    }

    fn add(&mut self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        self.core.add(a, b)
    }

    fn sub(&mut self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        self.core.sub(a, b)
    }

    fn add_plain(&mut self, a: &Cipher, message: f64) -> Result<Cipher> {
        self.core.add_plain(a, message)
    }

    fn bootstrap(&mut self, a: &Cipher, step: &StepFunction) -> Result<Cipher> {
        Ok(self.core.make(step.eval(self.core.own(a)?)))
    }

    fn decrypt(&self, a: &Cipher) -> Result<f64> {
        self.core.own(a)
    }
}

/// Noise model of an LWE-style scheme: encryption perturbs the phase by
/// `N(0, σ_c)`, perturbations add up under linear operations, and a
/// bootstrap decides on the perturbed phase and emits a fresh, noiseless
/// multiple of `1/modulus`.
#[derive(Debug)]
pub struct NoisyBackend {
    core: PhaseCore,
    sigma: f64,
    normal: Normal<f64>,
    rng: StreamRng,
}

impl NoisyBackend {
    pub fn new(sigma: f64, rng: StreamRng) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain(
                "sigma_c",
                sigma,
                "must be finite and non-negative",
            ));
        }
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        Ok(Self {
            core: PhaseCore::new(),
            sigma,
            normal,
            rng,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl CipherBackend for NoisyBackend {
    type Cipher = Cipher;

    fn encrypt(&mut self, message: f64) -> Cipher {
        let e = self.sigma * self.normal.sample(&mut self.rng);
        self.core.make(message + e)
    }

    fn add(&mut self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        self.core.add(a, b)
    }

    fn sub(&mut self, a: &Cipher, b: &Cipher) -> Result<Cipher> {
        self.core.sub(a, b)
    }

    fn add_plain(&mut self, a: &Cipher, message: f64) -> Result<Cipher> {
        self.core.add_plain(a, message)
    }

    fn bootstrap(&mut self, a: &Cipher, step: &StepFunction) -> Result<Cipher> {
        Ok(self.core.make(step.eval(self.core.own(a)?)))
    }

    fn decrypt(&self, a: &Cipher) -> Result<f64> {
        self.core.own(a)
    }
}

/// Wraps a backend and counts bootstraps.
#[derive(Debug)]
pub struct CountingBackend<B> {
    inner: B,
    bootstraps: u64,
}

impl<B> CountingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self {
            inner,
            bootstraps: 0,
        }
    }

    pub fn bootstraps(&self) -> u64 {
        self.bootstraps
    }

    pub fn reset(&mut self) {
        self.bootstraps = 0;
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: CipherBackend> CipherBackend for CountingBackend<B> {
    type Cipher = B::Cipher;

    fn encrypt(&mut self, message: f64) -> Self::Cipher {
        self.inner.encrypt(message)
    }

    fn add(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher> {
        self.inner.add(a, b)
    }

    fn sub(&mut self, a: &Self::Cipher, b: &Self::Cipher) -> Result<Self::Cipher> {
        self.inner.sub(a, b)
    }

    fn add_plain(&mut self, a: &Self::Cipher, message: f64) -> Result<Self::Cipher> {
        self.inner.add_plain(a, message)
    }

    fn bootstrap(&mut self, a: &Self::Cipher, step: &StepFunction) -> Result<Self::Cipher> {
        self.bootstraps += 1;
        self.inner.bootstrap(a, step)
    }

    fn decrypt(&self, a: &Self::Cipher) -> Result<f64> {
        self.inner.decrypt(a)
    }
}
