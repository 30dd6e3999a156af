use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use speed_core::genlap::NoiseParams;
use speed_core::protocol::{attack_demo, AttackNoise, AttackOutcome, AttackScenario};

use crate::cli::AttackArgs;
use crate::config::{domain, ExperimentConfig};
use crate::failure::Failure;
use crate::output::{emit, Artifact};

pub const SCHEMA: &str = "speed.attack-demo/1";

#[derive(Debug, Serialize)]
struct Body {
    scenario: AttackScenario,
    known_noise: AttackOutcome,
    distributed_noise: AttackOutcome,
}

/// Half the teachers on class 1, a fifth on class 0 (the alternative vote),
/// a tenth on class 2 (the victim's vote) and the rest spread evenly.
pub fn default_scenario(n: usize, k: usize) -> Result<AttackScenario> {
    if k < 3 || n < 10 {
        return Err(domain(format!(
            "the built-in attack scenario needs at least 3 classes and 10 teachers, got {k} and {n}"
        )));
    }
    let mut counts = vec![0u64; k];
    counts[1] = (n / 2) as u64;
    counts[0] = (n / 5) as u64;
    counts[2] = (n / 10) as u64;
    let mut rest = n as u64 - counts[0] - counts[1] - counts[2];
    let mut i = 3;
    while rest > 0 {
        let slot = if k > 3 { 3 + (i - 3) % (k - 3) } else { 2 };
        counts[slot] += 1;
        rest -= 1;
        i += 1;
    }
    Ok(AttackScenario {
        counts,
        k0: 2,
        k1: 0,
    })
}

fn load_scenario(path: &Path) -> Result<AttackScenario> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))
        .context(Failure::Input)?;
    let parsed: Result<AttackScenario> = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(Into::into)
    } else {
        serde_json::from_str(&text).map_err(Into::into)
    };
    parsed
        .with_context(|| format!("parsing scenario {}", path.display()))
        .context(Failure::Input)
}

pub fn run(config: &ExperimentConfig, args: &AttackArgs) -> Result<()> {
    let scenario = match &args.scenario {
        Some(p) => load_scenario(p)?,
        None => default_scenario(config.teachers, config.classes)?,
    };
    let n = scenario.counts.iter().sum::<u64>() as usize;
    let params = NoiseParams::new(config.gamma, config.tau, n)?;
    let known = attack_demo(
        &scenario,
        AttackNoise::CentralisedKnown,
        &params,
        args.trials,
        config.seed,
    )?;
    let distributed = attack_demo(
        &scenario,
        AttackNoise::Distributed,
        &params,
        args.trials,
        config.seed,
    )?;
    eprintln!(
        "known noise: accuracy {:.4}; distributed noise: accuracy {:.4} (bound {:.4})",
        known.accuracy, distributed.accuracy, distributed.accuracy_bound
    );
    emit(
        config,
        "attack-demo",
        "attack.json",
        &Artifact {
            schema: SCHEMA,
            command: "attack-demo",
            config,
            body: Body {
                scenario,
                known_noise: known,
                distributed_noise: distributed,
            },
        },
    )
}
