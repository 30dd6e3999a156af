use anyhow::Result;
use serde::Serialize;
use speed_core::genlap::{sample_aggregates, NoiseParams};
use speed_core::rng::SeedTree;
use speed_core::stats::{ks_distance, laplace_cdf, moments};

use crate::cli::DistCheckArgs;
use crate::config::{domain, ExperimentConfig};
use crate::output::{emit, Artifact};

pub const SCHEMA: &str = "speed.dist-check/1";
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct DistCheck {
    pub teachers: usize,
    pub gamma: f64,
    pub reference_gamma: f64,
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub reference_variance: f64,
    pub variance_rel_error: f64,
    pub ks: f64,
    pub max_variance_error: f64,
    pub max_ks: f64,
    pub pass: bool,
}

/// Sums all `n` shares and compares with `Laplace(0, 1/reference_gamma)`.
/// Returns whether the check passed.
pub fn run(config: &ExperimentConfig, args: &DistCheckArgs) -> Result<bool> {
    if args.samples < MIN_SAMPLES {
        return Err(domain(format!(
            "samples = {}: need at least {MIN_SAMPLES}",
            args.samples
        )));
    }
    let reference = args.reference_gamma.unwrap_or(config.gamma);
    if !(reference > 0.0 && reference.is_finite()) {
        return Err(domain(format!(
            "reference_gamma = {reference}: must be positive"
        )));
    }
    let params = NoiseParams::new(config.gamma, 1.0, config.teachers)?;
    let mut xs = sample_aggregates(&params, args.samples, &SeedTree::new(config.seed))?;
    let m = moments(&xs);
    let reference_variance = 2.0 / (reference * reference);
    let variance_rel_error = (m.variance - reference_variance).abs() / reference_variance;
    let ks = ks_distance(&mut xs, |x| laplace_cdf(x, 1.0 / reference));
    let pass = variance_rel_error < args.max_variance_error && ks < args.max_ks;
    let check = DistCheck {
        teachers: config.teachers,
        gamma: config.gamma,
        reference_gamma: reference,
        samples: args.samples,
        mean: m.mean,
        variance: m.variance,
        reference_variance,
        variance_rel_error,
        ks,
        max_variance_error: args.max_variance_error,
        max_ks: args.max_ks,
        pass,
    };
    let verdict = if pass { "PASS" } else { "FAIL" };
    eprintln!(
        "{verdict}: variance {:.4} (relative error {variance_rel_error:.4}), KS {ks:.5}",
        m.variance
    );
    emit(
        config,
        "dist-check",
        "dist_check.json",
        &Artifact {
            schema: SCHEMA,
            command: "dist-check",
            config,
            body: check,
        },
    )?;
    Ok(pass)
}
