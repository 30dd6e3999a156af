use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    aggregate, centralised_noise, encode_vote, CollusionSpec, TeacherOracle, VoteHistogram,
};
use crate::error::{Error, Result};
use crate::genlap::NoiseParams;
use crate::heargmax::{
    clear_argmax, encrypted_argmax, ArgmaxCircuitConfig, CircuitTrace, IdealBackend, NoisyBackend,
};
use crate::rng::{Purpose, SeedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Every non-colluding teacher adds its own Gamma-difference shares.
    #[default]
    Distributed,
    /// The aggregator adds Laplace noise to the clear sum.
    Centralised,
    NoNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HeMode {
    /// Argmax in the clear.
    #[default]
    Off,
    Ideal,
    Noisy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// `params.n` is the teacher count; `params.tau` is not used by the
    /// simulation, where collusion is explicit.
    pub params: NoiseParams,
    pub classes: usize,
    pub mode: NoiseMode,
    pub he: HeMode,
    pub seed: u64,
    #[serde(default)]
    pub collusion: Option<CollusionSpec>,
    pub circuit: ArgmaxCircuitConfig,
}

impl SessionConfig {
    pub fn validate(&self, teachers: usize) -> Result<()> {
        self.params.validate()?;
        if teachers != self.params.n {
            return Err(Error::ShapeMismatch {
                expected: self.params.n,
                found: teachers,
            });
        }
        if self.classes < 2 {
            return Err(Error::domain(
                "classes",
                self.classes as f64,
                "at least 2 classes",
            ));
        }
        if let Some(c) = &self.collusion {
            if c.n != teachers {
                return Err(Error::ShapeMismatch {
                    expected: teachers,
                    found: c.n,
                });
            }
        }
        if self.he != HeMode::Off {
            self.circuit.validate(self.classes)?;
        }
        Ok(())
    }

    fn colluding(&self, teacher: usize) -> bool {
        self.collusion
            .as_ref()
            .is_some_and(|c| c.is_colluding(teacher))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTrace {
    pub index: usize,
    pub x: usize,
    pub clear_counts: Vec<u64>,
    /// Aggregate noise per class.
    pub noise: Vec<f64>,
    pub noisy_shares: usize,
    pub clear_label: usize,
    pub label: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitTrace>,
}

/// Answers query `x` (the `index`-th of the session).
pub fn run_query(
    teachers: &[TeacherOracle],
    x: usize,
    index: usize,
    config: &SessionConfig,
) -> Result<(usize, QueryTrace)> {
    config.validate(teachers.len())?;
    let k = config.classes;
    let seeds = SeedTree::new(config.seed);
    let q = index as u64;

    let mut clear_counts = vec![0u64; k];
    let mut votes = Vec::with_capacity(teachers.len());
    for (i, t) in teachers.iter().enumerate() {
        let label = t.label(x, k)?;
        clear_counts[label] += 1;
        let noised = config.mode == NoiseMode::Distributed && !config.colluding(i);
        let mut rng = seeds.stream(Purpose::TeacherNoise, q, i as u64);
        votes.push(encode_vote(i, label, k, &config.params, &mut rng, noised)?);
    }
    let noisy_shares = votes.iter().filter(|v| v.noised).count();
    let summed = aggregate(k, &votes)?;
    let scores = match config.mode {
        NoiseMode::Centralised => {
            let mut rng = seeds.stream(Purpose::AggregatorNoise, q, 0);
            centralised_noise(&summed, config.params.gamma, &mut rng)?
        }
        NoiseMode::Distributed | NoiseMode::NoNoise => summed,
    };
    let noise = scores
        .iter()
        .zip(&clear_counts)
        .map(|(s, &c)| s - c as f64)
        .collect();

    let circuit = match config.he {
        HeMode::Off => None,
        HeMode::Ideal => Some(encrypted_argmax(
            &mut IdealBackend::new(),
            &scores,
            &config.circuit,
        )?),
        HeMode::Noisy => {
            let rng = seeds.stream(Purpose::Encryption, q, 0);
            let mut backend = NoisyBackend::new(config.circuit.sigma_c, rng)?;
            Some(encrypted_argmax(&mut backend, &scores, &config.circuit)?)
        }
    };
    let label = circuit.map_or_else(|| clear_argmax(&scores), |c| c.decision.index);
    let clear_label = clear_argmax(&clear_counts);
    Ok((
        label,
        QueryTrace {
            index,
            x,
            clear_counts,
            noise,
            noisy_shares,
            clear_label,
            label,
            circuit,
        },
    ))
}

/// Inputs submitted by the student, with optional ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub inputs: Vec<usize>,
    #[serde(default)]
    pub truth: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutput {
    pub labels: Vec<LabeledPoint>,
    pub votes: VoteHistogram,
    pub traces: Vec<QueryTrace>,
}

/// Runs every query of `workload`, in parallel, merged in query order.
pub fn run_session(
    teachers: &[TeacherOracle],
    workload: &Workload,
    config: &SessionConfig,
) -> Result<SessionOutput> {
    config.validate(teachers.len())?;
    if let Some(t) = &workload.truth {
        if t.len() != workload.inputs.len() {
            return Err(Error::ShapeMismatch {
                expected: workload.inputs.len(),
                found: t.len(),
            });
        }
    }
    let traces = workload
        .inputs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| run_query(teachers, x, i, config).map(|(_, t)| t))
        .collect::<Result<Vec<_>>>()?;
    let labels = traces
        .iter()
        .map(|t| LabeledPoint {
            x: t.x,
            label: t.label,
        })
        .collect();
    let votes = VoteHistogram::new(
        teachers.len(),
        config.classes,
        traces.iter().map(|t| t.clear_counts.clone()).collect(),
        workload.truth.clone(),
    )?;
    Ok(SessionOutput {
        labels,
        votes,
        traces,
    })
}
