use anyhow::{Context, Result};
use serde::Serialize;
use speed_core::accountant::{analyze, PrivacyReport};
use speed_core::genlap::NoiseParams;
use speed_core::protocol::{
    noisy_ensemble, run_session, CollusionSpec, Disclosure, NoiseMode, QueryTrace, SessionConfig,
    Workload,
};
use speed_core::rng::{hash3, unit_from_hash};

use crate::config::ExperimentConfig;
use crate::failure::Failure;
use crate::output::{Artifact, OutDir};

pub const REPORT_SCHEMA: &str = "speed.simulate-report/1";
pub const TRACES_SCHEMA: &str = "speed.traces/1";
pub const LABELS_SCHEMA: &str = "speed.labels/1";

#[derive(Debug, Serialize)]
struct ReportBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<PrivacyReport>,
    clear_agreement: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth_accuracy: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TracesBody<'a> {
    traces: &'a [QueryTrace],
}

/// Ground-truth label of simulated input `x`.
fn true_label(seed: u64, x: usize, classes: usize) -> usize {
    let u = unit_from_hash(hash3(seed, x as u64, 0x7417));
    ((u * classes as f64) as usize).min(classes - 1)
}

pub fn run(config: &ExperimentConfig) -> Result<()> {
    let dir = config
        .out
        .as_ref()
        .context("simulate writes several files and needs --out")
        .context(Failure::Usage)?;
    let n = config.teachers;
    let k = config.classes;
    let truth: Vec<usize> = (0..config.queries)
        .map(|x| true_label(config.seed, x, k))
        .collect();
    let teachers = noisy_ensemble(n, &truth, config.teacher_error, config.seed);
    let collusion = if config.tau < 1.0 && config.mode == NoiseMode::Distributed {
        Some(CollusionSpec::from_tau(
            n,
            config.tau,
            Disclosure::Withheld,
        )?)
    } else {
        None
    };
    let params = NoiseParams::new(config.gamma, config.tau, n)?;
    let session = SessionConfig {
        params,
        classes: k,
        mode: config.mode,
        he: config.he,
        seed: config.seed,
        collusion,
        circuit: config.heargmax,
    };
    let workload = Workload {
        inputs: (0..config.queries).collect(),
        truth: Some(truth.clone()),
    };
    let start = std::time::Instant::now();
    let output = run_session(&teachers, &workload, &session)?;
    log::info!(
        "{} queries answered in {:.2?}",
        config.queries,
        start.elapsed()
    );

    let report = match config.mode {
        NoiseMode::Distributed => Some(analyze(&output.votes, &params, config.delta, config.lmax)?),
        NoiseMode::Centralised => {
            let central = NoiseParams::new(config.gamma, 1.0, n)?;
            Some(analyze(&output.votes, &central, config.delta, config.lmax)?)
        }
        NoiseMode::NoNoise => {
            log::warn!("no noise was added; the session has no privacy guarantee");
            None
        }
    };
    let queries = output.traces.len().max(1) as f64;
    let clear_agreement = output
        .traces
        .iter()
        .filter(|t| t.label == t.clear_label)
        .count() as f64
        / queries;
    let truth_accuracy = (!output.traces.is_empty()).then(|| {
        output
            .traces
            .iter()
            .filter(|t| t.label == truth[t.x])
            .count() as f64
            / queries
    });
    if let Some(r) = &report {
        println!("epsilon = {} at delta = {}", r.epsilon, r.delta);
    }

    let mut out = OutDir::create(dir)?;
    out.write("labels.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["schema", "query", "x", "label", "clear_label", "true_label"])?;
        for t in &output.traces {
            csv.write_record([
                LABELS_SCHEMA.to_string(),
                t.index.to_string(),
                t.x.to_string(),
                t.label.to_string(),
                t.clear_label.to_string(),
                truth[t.x].to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    out.write("votes.json", |w| Ok(output.votes.to_json(w)?))?;
    out.json(
        "report.json",
        &Artifact {
            schema: REPORT_SCHEMA,
            command: "simulate",
            config,
            body: ReportBody {
                report,
                clear_agreement,
                truth_accuracy,
            },
        },
    )?;
    out.json(
        "traces.json",
        &Artifact {
            schema: TRACES_SCHEMA,
            command: "simulate",
            config,
            body: TracesBody {
                traces: &output.traces,
            },
        },
    )?;
    out.finish("simulate", config)
}
