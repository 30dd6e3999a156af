//! Experiment configuration: built-in defaults, then the TOML file, then
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use speed_core::genlap::NoiseParams;
use speed_core::heargmax::ArgmaxCircuitConfig;
use speed_core::protocol::{HeMode, NoiseMode};

use crate::cli::Overrides;
use crate::failure::Failure;

pub const DEFAULT_TEACHERS: usize = 250;
pub const DEFAULT_CLASSES: usize = 10;
pub const DEFAULT_QUERIES: usize = 100;
pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_TEACHER_ERROR: f64 = 0.2;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    teachers: Option<usize>,
    classes: Option<usize>,
    queries: Option<usize>,
    gamma: Option<f64>,
    tau: Option<f64>,
    delta: Option<f64>,
    lmax: Option<usize>,
    mode: Option<NoiseMode>,
    he: Option<HeMode>,
    seed: Option<u64>,
    teacher_error: Option<f64>,
    votes: Option<PathBuf>,
    out: Option<PathBuf>,
    #[serde(default)]
    heargmax: HeargmaxSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeargmaxSection {
    offset: Option<f64>,
    input_modulus: Option<f64>,
    theta1: Option<u32>,
    theta2: Option<u32>,
    sigma_c: Option<f64>,
}

/// Fully resolved settings. Copied into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub teachers: usize,
    pub classes: usize,
    pub queries: usize,
    pub gamma: f64,
    pub tau: f64,
    pub delta: f64,
    pub lmax: usize,
    pub mode: NoiseMode,
    pub he: HeMode,
    pub seed: u64,
    /// Probability that a simulated teacher mislabels an input.
    pub teacher_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub votes: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub heargmax: ArgmaxCircuitConfig,
    #[serde(skip)]
    pub teachers_explicit: bool,
}

impl ExperimentConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let (file, base) = match &flags.config {
            Some(path) => (load_file(path)?, path.parent().map(Path::to_path_buf)),
            None => (FileConfig::default(), None),
        };
        let relative = |p: PathBuf| match &base {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        };

        let teachers_explicit = flags.teachers.is_some() || file.teachers.is_some();
        let teachers = flags.teachers.or(file.teachers).unwrap_or(DEFAULT_TEACHERS);
        let gamma = flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA);

        let h = &file.heargmax;
        let mut heargmax = match h.offset {
            Some(a) => ArgmaxCircuitConfig::with_offset(teachers, a),
            None if gamma > 0.0 && gamma.is_finite() => {
                ArgmaxCircuitConfig::for_noise(teachers, gamma)
            }
            None => ArgmaxCircuitConfig::for_teachers(teachers),
        };
        if let Some(b) = h.input_modulus {
            heargmax.input_modulus = b;
        }
        if let Some(t) = h.theta1 {
            heargmax.theta1 = t;
        }
        if let Some(t) = h.theta2 {
            heargmax.theta2 = t;
        }
        if let Some(s) = h.sigma_c {
            heargmax.sigma_c = s;
        }

        let cfg = Self {
            teachers,
            classes: flags.classes.or(file.classes).unwrap_or(DEFAULT_CLASSES),
            queries: flags.queries.or(file.queries).unwrap_or(DEFAULT_QUERIES),
            gamma,
            tau: flags.tau.or(file.tau).unwrap_or(1.0),
            delta: flags
                .delta
                .or(file.delta)
                .unwrap_or(speed_core::DEFAULT_DELTA),
            lmax: flags.lmax.or(file.lmax).unwrap_or(speed_core::DEFAULT_LMAX),
            mode: flags.mode.or(file.mode).unwrap_or_default(),
            he: flags.he.or(file.he).unwrap_or_default(),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            teacher_error: file.teacher_error.unwrap_or(DEFAULT_TEACHER_ERROR),
            votes: flags.votes.clone().or(file.votes.map(&relative)),
            out: flags.out.clone().or(file.out.map(&relative)),
            heargmax,
            teachers_explicit,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Domain checks shared by every command. Runs before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.noise_params().context(Failure::Domain)?;
        if self.classes < 2 {
            bail!(domain(format!(
                "classes = {}: at least 2 classes are required",
                self.classes
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!(domain(format!(
                "delta = {}: must lie in (0, 1)",
                self.delta
            )));
        }
        if self.lmax == 0 {
            bail!(domain("lmax = 0: must be at least 1".to_string()));
        }
        if !(0.0..1.0).contains(&self.teacher_error) {
            bail!(domain(format!(
                "teacher_error = {}: must lie in [0, 1)",
                self.teacher_error
            )));
        }
        if self.he != HeMode::Off {
            self.heargmax
                .validate(self.classes)
                .context(Failure::Domain)?;
        }
        if let Some(v) = &self.votes {
            if !v.is_file() {
                return Err(anyhow::anyhow!("votes file {} does not exist", v.display()))
                    .context(Failure::Input);
            }
        }
        Ok(())
    }

    pub fn noise_params(&self) -> speed_core::Result<NoiseParams> {
        NoiseParams::new(self.gamma, self.tau, self.teachers)
    }
}

/// A domain error carrying its message.
pub fn domain(message: String) -> anyhow::Error {
    anyhow::Error::msg(message).context(Failure::Domain)
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .context(Failure::Input)?;
    toml::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))
        .context(Failure::Input)
}
