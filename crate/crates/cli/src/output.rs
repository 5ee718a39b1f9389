//! Output directory layout and file formats.
//!
//! * `*.csv`: comma-separated, one header row, numbers in Rust's shortest
//!   round-trip notation. Time series use `time,h_norm,v_norm,a_norm,fn_value`.
//! * `reports.json`: monitor summaries (`inequality_id`, `residual`
//!   statistics, `violation_fraction`, `fitted_c`, `constants`) plus
//!   experiment-specific results.
//! * `*.field`: field checkpoints (`GMNSE-FIELD v1` text format).
//! * Ensemble directories: member checkpoints and a `manifest.json`.
//! * `config.toml`: the resolved configuration.
//! * `manifest.json`: [`RunManifest`].

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gmnse::attractor::{write_ensemble, EnsembleState};
use gmnse::dynamics::TrajectoryRecord;
use gmnse::spectral::{write_field, SpectralVelocityField};
use serde::{Deserialize, Serialize};

use crate::{CliError, Experiment};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const SERIES_HEADER: [&str; 5] = ["time", "h_norm", "v_norm", "a_norm", "fn_value"];

/// Written last into the output directory. Everything except the two
/// wall-clock fields depends only on the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub experiment: Experiment,
    pub config_hash: String,
    pub code_version: String,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    /// Paths relative to the output directory.
    pub files: Vec<String>,
    /// Set when the run stopped on an error; `files` then lists what was
    /// written before it.
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Tracks every file written under one output directory.
pub(crate) struct Outputs {
    root: PathBuf,
    files: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

impl Outputs {
    pub(crate) fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self {
            root: root.to_owned(),
            files: Vec::new(),
        })
    }

    pub(crate) fn files(&self) -> &[String] {
        &self.files
    }

    pub(crate) fn root(&self) -> &Path {
        &self.root
    }

    pub(crate) fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    pub(crate) fn write_csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: std::fmt::Display,
    {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let mut first = true;
            for cell in row {
                if !first {
                    text.push(',');
                }
                first = false;
                write!(text, "{cell}").expect("writing to a string");
            }
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    pub(crate) fn write_series(&mut self, name: &str, tr: &TrajectoryRecord) -> Result<(), CliError> {
        let rows = tr
            .times
            .iter()
            .zip(&tr.norm_series)
            .zip(&tr.fn_series)
            .map(|((t, n), f)| [*t, n.h_norm, n.v_norm, n.a_norm, *f]);
        self.write_csv(name, &SERIES_HEADER, rows)
    }

    pub(crate) fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?;
        self.write_text(name, &(text + "\n"))
    }

    pub(crate) fn write_field(&mut self, name: &str, u: &SpectralVelocityField) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        write_field(u, &mut w).and_then(|_| w.flush()).map_err(io_err(&path))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    pub(crate) fn write_ensemble(&mut self, dir: &str, e: &EnsembleState, params_hash: &str) -> Result<(), CliError> {
        let path = self.root.join(dir);
        write_ensemble(&path, e, params_hash)?;
        for i in 0..e.len() {
            self.files.push(format!("{dir}/member_{i:04}.field"));
        }
        self.files.push(format!("{dir}/manifest.json"));
        Ok(())
    }

    pub(crate) fn write_manifest(&self, manifest: &RunManifest) -> Result<(), CliError> {
        let path = self.root.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Other(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(io_err(&path))
    }
}
