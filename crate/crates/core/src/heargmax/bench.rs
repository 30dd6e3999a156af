//! Accuracy of the circuit under the noisy backend, and calibration of the
//! encryption noise against a target accuracy.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{clear_argmax, encrypted_argmax, ArgmaxCircuitConfig, NoisyBackend};
use crate::error::{Error, Result};
use crate::genlap::sample_laplace;
use crate::rng::{Purpose, SeedTree};

/// Noisy class scores for queries where each of `n` teachers votes uniformly
/// at random among `k` classes and Laplace(0, 1/γ) noise is added per class.
pub fn uniform_vote_workload(
    n: usize,
    k: usize,
    queries: usize,
    gamma: f64,
    seeds: &SeedTree,
) -> Vec<Vec<f64>> {
    (0..queries)
        .into_par_iter()
        .map(|q| {
            let mut rng = seeds.stream(Purpose::Workload, q as u64, 0);
            let mut counts = vec![0.0; k];
            for _ in 0..n {
                counts[rng.random_range(0..k)] += 1.0;
            }
            counts
                .into_iter()
                .map(|c| c + sample_laplace(gamma, &mut rng))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub queries: usize,
    pub correct: usize,
    pub degenerate: usize,
    pub overflow: usize,
    pub accuracy: f64,
}

/// Fraction of queries where the noisy-backend circuit returns a
/// non-degenerate one-hot at the argmax of its inputs.
pub fn circuit_accuracy(
    config: &ArgmaxCircuitConfig,
    workload: &[Vec<f64>],
    seeds: &SeedTree,
) -> Result<AccuracyReport> {
    let outcomes = workload
        .par_iter()
        .enumerate()
        .map(|(q, scores)| {
            let mut backend = NoisyBackend::new(
                config.sigma_c,
                seeds.stream(Purpose::Encryption, q as u64, 0),
            )?;
            let trace = encrypted_argmax(&mut backend, scores, config)?;
            let ok = !trace.decision.degenerate && trace.decision.index == clear_argmax(scores);
            Ok((ok, trace.decision.degenerate, trace.overflow))
        })
        .collect::<Result<Vec<_>>>()?;
    let correct = outcomes.iter().filter(|o| o.0).count();
    Ok(AccuracyReport {
        queries: workload.len(),
        correct,
        degenerate: outcomes.iter().filter(|o| o.1).count(),
        overflow: outcomes.iter().filter(|o| o.2).count(),
        accuracy: correct as f64 / workload.len().max(1) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sigma_c: f64,
    pub accuracy: f64,
    pub target: f64,
    pub iterations: usize,
}

/// Bisection on `ln σ_c` so that [`circuit_accuracy`] on `workload` meets
/// `target`. The same encryption streams are reused at every step.
pub fn calibrate_sigma(
    target: f64,
    config: &ArgmaxCircuitConfig,
    workload: &[Vec<f64>],
    seeds: &SeedTree,
) -> Result<Calibration> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain("target", target, "must lie in (0, 1)"));
    }
    if workload.is_empty() {
        return Err(Error::Invalid("calibration workload is empty".into()));
    }
    let eval = |sigma: f64| -> Result<f64> {
        let c = ArgmaxCircuitConfig {
            sigma_c: sigma,
            ..*config
        };
        Ok(circuit_accuracy(&c, workload, seeds)?.accuracy)
    };
    let (mut lo, mut hi) = (1e-7f64.ln(), 0.25f64.ln());
    if eval(lo.exp())? < target || eval(hi.exp())? > target {
        return Err(Error::Invalid(format!(
            "target accuracy {target} is not bracketed by sigma_c in [1e-7, 0.25]"
        )));
    }
    let mut iterations = 0;
    let mut best = (lo.exp(), 1.0);
    while iterations < 60 && hi - lo > 1e-6 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let acc = eval(mid.exp())?;
        if (acc - target).abs() <= (best.1 - target).abs() {
            best = (mid.exp(), acc);
        }
        if acc >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Calibration {
        sigma_c: best.0,
        accuracy: best.1,
        target,
        iterations,
    })
}
