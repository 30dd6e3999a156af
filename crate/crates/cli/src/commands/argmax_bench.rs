use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use speed_core::heargmax::{
    calibrate_sigma, circuit_accuracy, uniform_vote_workload, AccuracyReport, ArgmaxCircuitConfig,
    Calibration,
};
use speed_core::rng::{Purpose, SeedTree};

use crate::cli::ArgmaxBenchArgs;
use crate::config::ExperimentConfig;
use crate::output::{emit, Artifact};

pub const SCHEMA: &str = "speed.argmax-bench/1";

#[derive(Debug, Serialize)]
struct Body {
    circuit: ArgmaxCircuitConfig,
    sigma_eff: f64,
    bootstraps_per_query: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<Calibration>,
    accuracy: AccuracyReport,
}

pub fn run(config: &ExperimentConfig, args: &ArgmaxBenchArgs) -> Result<()> {
    let (n, k) = (config.teachers, config.classes);
    config.heargmax.validate(k)?;
    let seeds = SeedTree::new(config.seed);
    let mut circuit = config.heargmax;
    let calibration = match args.target_accuracy {
        Some(target) => {
            let workload = uniform_vote_workload(
                n,
                k,
                config.queries,
                config.gamma,
                &seeds.child(Purpose::Calibration, 0),
            );
            let c = calibrate_sigma(
                target,
                &circuit,
                &workload,
                &seeds.child(Purpose::Calibration, 1),
            )?;
            circuit.sigma_c = c.sigma_c;
            Some(c)
        }
        None => None,
    };
    let workload = uniform_vote_workload(
        n,
        k,
        config.queries,
        config.gamma,
        &seeds.child(Purpose::Workload, 0),
    );
    let start = Instant::now();
    let accuracy = circuit_accuracy(&circuit, &workload, &seeds.child(Purpose::Encryption, 0))?;
    log::info!(
        "{} circuit evaluations in {:.2?}",
        accuracy.queries,
        start.elapsed()
    );
    eprintln!(
        "sigma_c {:.4e}: accuracy {:.4} over {} queries",
        circuit.sigma_c, accuracy.accuracy, accuracy.queries
    );
    emit(
        config,
        "argmax-bench",
        "argmax_bench.json",
        &Artifact {
            schema: SCHEMA,
            command: "argmax-bench",
            config,
            body: Body {
                circuit,
                sigma_eff: circuit.sigma_eff(),
                bootstraps_per_query: (k * k) as u64,
                calibration,
                accuracy,
            },
        },
    )
}
