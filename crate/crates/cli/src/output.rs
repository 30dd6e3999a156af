//! Artifact emission. Every JSON artifact carries a schema tag and the
//! resolved configuration; directories also get a manifest.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::failure::Failure;

pub const MANIFEST_SCHEMA: &str = "speed.manifest/1";

#[derive(Debug, Serialize)]
pub struct Artifact<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: &'a ExperimentConfig,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    files: &'a [String],
}

/// Collects the files written into an output directory.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))
            .context(Failure::Input)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    pub fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path)
            .with_context(|| format!("creating {}", path.display()))
            .context(Failure::Input)?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush().map_err(Into::into))
            .with_context(|| format!("writing {}", path.display()))
            .context(Failure::Input)?;
        log::info!("wrote {}", path.display());
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, command: &'static str, config: &ExperimentConfig) -> Result<()> {
        let files = std::mem::take(&mut self.files);
        self.json(
            "manifest.json",
            &Manifest {
                schema: MANIFEST_SCHEMA,
                command,
                config,
                files: &files,
            },
        )
    }
}

pub fn stdout_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes one artifact either into `out` (plus a manifest) or to stdout.
pub fn emit<T: Serialize>(
    config: &ExperimentConfig,
    command: &'static str,
    file: &str,
    artifact: &Artifact<'_, T>,
) -> Result<()> {
    match &config.out {
        Some(dir) => {
            let mut out = OutDir::create(dir)?;
            out.json(file, artifact)?;
            out.finish(command, config)
        }
        None => stdout_json(artifact),
    }
}
