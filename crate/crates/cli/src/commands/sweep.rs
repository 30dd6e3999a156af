use anyhow::Result;
use speed_core::accountant::analyze;
use speed_core::genlap::NoiseParams;
use speed_core::protocol::VoteHistogram;

use super::votes_or_unanimous;
use crate::cli::{SweepArgs, SweepParam};
use crate::config::{domain, ExperimentConfig};
use crate::output::OutDir;

pub const SCHEMA: &str = "speed.sweep/1";

const HEADER: [&str; 9] = [
    "schema",
    "param",
    "value",
    "gamma",
    "tau",
    "epsilon",
    "per_query_epsilon",
    "best_l",
    "data_independent_queries",
];

pub fn grid(args: &SweepArgs) -> Result<Vec<f64>> {
    let (lo, hi, points) = (args.from, args.to, args.points);
    if !(lo > 0.0 && hi.is_finite() && hi > lo) {
        return Err(domain(format!("range [{lo}, {hi}]: need 0 < from < to")));
    }
    if points < 2 {
        return Err(domain(format!("points = {points}: need at least 2")));
    }
    if args.param == SweepParam::Tau && hi > 1.0 {
        return Err(domain(format!(
            "tau range ends at {hi}: tau cannot exceed 1"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if args.log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect())
}

fn row(
    config: &ExperimentConfig,
    votes: &VoteHistogram,
    param: SweepParam,
    value: f64,
) -> Result<Vec<String>> {
    let (gamma, tau) = match param {
        SweepParam::Gamma => (value, config.tau),
        SweepParam::Tau => (config.gamma, value),
    };
    let params = NoiseParams::new(gamma, tau, votes.n)?;
    let r = analyze(votes, &params, config.delta, config.lmax)?;
    Ok(vec![
        SCHEMA.to_string(),
        match param {
            SweepParam::Gamma => "gamma",
            SweepParam::Tau => "tau",
        }
        .to_string(),
        value.to_string(),
        r.params.gamma.to_string(),
        r.params.tau.to_string(),
        r.epsilon.to_string(),
        r.per_query_epsilon.to_string(),
        r.best_l.map_or(String::new(), |l| l.to_string()),
        r.data_independent_queries.to_string(),
    ])
}

pub fn run(config: &ExperimentConfig, args: &SweepArgs) -> Result<()> {
    let values = grid(args)?;
    let votes = votes_or_unanimous(config)?;
    let rows = values
        .iter()
        .map(|&v| row(config, &votes, args.param, v))
        .collect::<Result<Vec<_>>>()?;
    let write = |w: &mut dyn std::io::Write| -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(HEADER)?;
        for r in &rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    };
    match &config.out {
        Some(dir) => {
            let mut out = OutDir::create(dir)?;
            out.write("sweep.csv", |w| write(w))?;
            out.finish("sweep", config)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}
