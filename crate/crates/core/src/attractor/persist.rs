use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::spectral::{read_field, write_field, TorusDomain};

use super::{AttractorError, EnsembleLabel, EnsembleState};

pub const ENSEMBLE_FORMAT: &str = "gmnse-ensemble";
pub const ENSEMBLE_VERSION: u32 = 1;
const MANIFEST_NAME: &str = "manifest.json";

/// `manifest.json` of an ensemble directory. Member files are field
/// checkpoints, listed relative to the directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub format: String,
    pub version: u32,
    pub label: EnsembleLabel,
    pub member_count: usize,
    pub domain: TorusDomain,
    /// Fingerprint of the parameters that produced the ensemble.
    pub params_hash: String,
    pub members: Vec<String>,
}

/// Writes `member_NNNN.field` files and a manifest into `dir` (created if
/// needed). Returns the manifest path.
pub fn write_ensemble(dir: &Path, e: &EnsembleState, params_hash: &str) -> Result<PathBuf, AttractorError> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(e.len());
    for (i, m) in e.members().iter().enumerate() {
        let name = format!("member_{i:04}.field");
        let mut w = BufWriter::new(File::create(dir.join(&name))?);
        write_field(m, &mut w)?;
        w.flush()?;
        names.push(name);
    }
    let manifest = EnsembleManifest {
        format: ENSEMBLE_FORMAT.into(),
        version: ENSEMBLE_VERSION,
        label: e.label(),
        member_count: e.len(),
        domain: *e.domain(),
        params_hash: params_hash.into(),
        members: names,
    };
    let path = dir.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(&manifest).map_err(|err| AttractorError::Manifest(err.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

/// Reads an ensemble written by [`write_ensemble`], checking the manifest
/// against the member files.
pub fn read_ensemble(dir: &Path) -> Result<(EnsembleState, EnsembleManifest), AttractorError> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    let manifest: EnsembleManifest =
        serde_json::from_str(&text).map_err(|err| AttractorError::Manifest(err.to_string()))?;
    if manifest.format != ENSEMBLE_FORMAT || manifest.version != ENSEMBLE_VERSION {
        return Err(AttractorError::Manifest(format!(
            "unsupported format {} v{}",
            manifest.format, manifest.version
        )));
    }
    if manifest.members.len() != manifest.member_count {
        return Err(AttractorError::Manifest(format!(
            "member_count {} but {} files listed",
            manifest.member_count,
            manifest.members.len()
        )));
    }
    let mut members = Vec::with_capacity(manifest.member_count);
    for name in &manifest.members {
        let u = read_field(BufReader::new(File::open(dir.join(name))?))?;
        if *u.domain() != manifest.domain {
            return Err(AttractorError::Manifest(format!("{name} does not match the manifest domain")));
        }
        members.push(u);
    }
    Ok((EnsembleState::new(members, manifest.label)?, manifest))
}
