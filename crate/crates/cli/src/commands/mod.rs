pub mod accountant;
pub mod argmax_bench;
pub mod attack;
pub mod dist_check;
pub mod simulate;
pub mod sweep;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use speed_core::protocol::VoteHistogram;

use crate::config::{domain, ExperimentConfig};
use crate::failure::Failure;

/// Reads a vote histogram as JSON, or as CSV when the extension says so.
/// An empty file is a session with no queries.
pub fn load_votes(path: &Path, config: &ExperimentConfig) -> Result<VoteHistogram> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading votes file {}", path.display()))
        .context(Failure::Input)?;
    let explicit_n = config.teachers_explicit.then_some(config.teachers);
    let votes = if text.trim().is_empty() {
        VoteHistogram::new(config.teachers, config.classes, Vec::new(), None)
    } else if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        VoteHistogram::from_csv(text.as_bytes(), explicit_n)
    } else {
        VoteHistogram::from_json(text.as_bytes())
    }
    .with_context(|| format!("parsing votes file {}", path.display()))
    .context(Failure::Input)?;
    if let Some(n) = explicit_n {
        if n != votes.n {
            return Err(domain(format!(
                "teachers = {n}, but {} records n = {}",
                path.display(),
                votes.n
            )));
        }
    }
    Ok(votes)
}

/// Votes from `--votes`, or a unanimous synthetic session shaped by the
/// config when no file is given.
pub fn votes_or_unanimous(config: &ExperimentConfig) -> Result<VoteHistogram> {
    match &config.votes {
        Some(path) => load_votes(path, config),
        None => {
            let mut row = vec![0u64; config.classes];
            row[0] = config.teachers as u64;
            Ok(VoteHistogram::new(
                config.teachers,
                config.classes,
                vec![row; config.queries],
                None,
            )?)
        }
    }
}
