use anyhow::{Context, Result};
use serde::Serialize;
use speed_core::accountant::{analyze, PrivacyReport};
use speed_core::genlap::NoiseParams;

use super::load_votes;
use crate::config::ExperimentConfig;
use crate::failure::Failure;
use crate::output::{emit, Artifact};

pub const SCHEMA: &str = "speed.accountant/1";

#[derive(Debug, Serialize)]
pub struct Body {
    pub votes_file: String,
    pub report: PrivacyReport,
}

pub fn run(config: &ExperimentConfig) -> Result<()> {
    let path = config
        .votes
        .as_ref()
        .context("the accountant needs --votes")
        .context(Failure::Usage)?;
    let votes = load_votes(path, config)?;
    let params = NoiseParams::new(config.gamma, config.tau, votes.n)?;
    let report = analyze(&votes, &params, config.delta, config.lmax)?;
    log::info!(
        "{} queries, per-query epsilon {:.6}, total epsilon {:.6}",
        votes.len(),
        report.per_query_epsilon,
        report.epsilon
    );
    if config.out.is_some() {
        println!("epsilon = {} at delta = {}", report.epsilon, report.delta);
    }
    let artifact = Artifact {
        schema: SCHEMA,
        command: "accountant",
        config,
        body: Body {
            votes_file: path.display().to_string(),
            report,
        },
    };
    emit(config, "accountant", "report.json", &artifact)
}
