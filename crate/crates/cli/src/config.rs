//! Experiment configuration: a TOML file with every field optional.
//!
//! ```toml
//! experiment = "verify-estimates"
//! seeds = [1, 2, 3]
//! output_dir = "runs/verify"
//!
//! [params]
//! nu = 1.0
//! n_cap = 10.0
//! dt = 0.001
//! resolution = 16
//! dimension = 3
//!
//! [forcing]
//! preset = "taylor-green-like"
//! amplitude = 1.0
//!
//! [run]
//! t_final = 2.0
//! record_every = 10
//! ```
//!
//! Explicit forcing modes replace the preset; the `-k` partner of every
//! listed mode is filled in so the forcing is real:
//!
//! ```toml
//! [[forcing.modes]]
//! k = [0, 0, 1]
//! re = [0.3, 0.0, 0.0]
//! im = [0.0, -0.2, 0.0]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use gmnse::dynamics::GmnseParams;
use gmnse::presets::{self, taylor_green_like};
use gmnse::spectral::{dealias, leray_project, norms, SpectralVelocityField, TorusDomain, VectorCoefficients};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    VerifyEstimates,
    Attractor,
    Dimension,
    Smoothing,
    TimeRegularity,
    RateFit,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Simulate,
        Self::VerifyEstimates,
        Self::Attractor,
        Self::Dimension,
        Self::Smoothing,
        Self::TimeRegularity,
        Self::RateFit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::VerifyEstimates => "verify-estimates",
            Self::Attractor => "attractor",
            Self::Dimension => "dimension",
            Self::Smoothing => "smoothing",
            Self::TimeRegularity => "time-regularity",
            Self::RateFit => "rate-fit",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSpec {
    pub nu: f64,
    pub n_cap: f64,
    pub dt: f64,
    pub resolution: usize,
    pub dimension: usize,
    pub edge_length: f64,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        Self {
            nu: presets::DEFAULT_NU,
            n_cap: presets::DEFAULT_N_CAP,
            dt: presets::DEFAULT_DT,
            resolution: presets::DEFAULT_RESOLUTION,
            dimension: presets::DEFAULT_DIMENSION,
            edge_length: std::f64::consts::TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingPreset {
    TaylorGreenLike,
    /// Unforced run; the only way to ask for `f = 0`.
    Zero,
}

/// One Fourier mode of the forcing, one entry per velocity component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingMode {
    pub k: Vec<i64>,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingSpec {
    /// Defaults to `taylor-green-like` when no modes are listed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<ForcingPreset>,
    /// Multiplies the preset or the listed modes.
    pub amplitude: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ForcingMode>,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        Self {
            preset: None,
            amplitude: presets::DEFAULT_AMPLITUDE,
            modes: Vec::new(),
        }
    }
}

/// Durations are in time units and cadences in steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Length of the recorded trajectory (simulate, verify-estimates,
    /// time-regularity).
    pub t_final: f64,
    pub record_every: usize,
    /// Full-state checkpoints; time-regularity uses 100 when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<usize>,
    /// `‖u₀‖₂` of the seeded random initial data.
    pub initial_h_norm: f64,
    /// Transient certified before attractor, smoothing and time-regularity
    /// experiments.
    pub t_burn_in: f64,
    /// Window sampled for the attractor approximation.
    pub t_sample: f64,
    /// Snapshots per seed in the attractor approximation.
    pub n_snapshots: usize,
    /// `‖w(0)‖₂` of the perturbations in the smoothing experiment.
    pub perturbations: Vec<f64>,
    /// Length of the paired runs in the smoothing experiment.
    pub t_pair: f64,
    pub projection_dims: Vec<usize>,
    pub box_levels: usize,
    /// Times at which the rate fit measures the semidistance.
    pub rate_times: Vec<f64>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            record_every: 10,
            checkpoint_every: None,
            initial_h_norm: 20.0,
            t_burn_in: 2.0,
            t_sample: 2.0,
            n_snapshots: 16,
            perturbations: vec![1e-2, 1e-4],
            t_pair: 2.0,
            projection_dims: vec![6, 12],
            box_levels: 6,
            rate_times: (1..=8).map(|i| 0.5 * i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub params: ParamsSpec,
    pub forcing: ForcingSpec,
    pub run: RunSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Simulate,
            seeds: vec![0],
            output_dir: PathBuf::from("gmnse-output"),
            params: ParamsSpec::default(),
            forcing: ForcingSpec::default(),
            run: RunSettings::default(),
        }
    }
}

/// Reads, parses and validates a configuration file. Forcing adjustments
/// (projection, truncation) are logged as warnings.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let config = parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    for w in config.validate()? {
        log::warn!("{}: {w}", path.display());
    }
    Ok(config)
}

/// Parses TOML text without validating it.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

impl ExperimentConfig {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML form with `output_dir` cleared,
    /// lowercase hex. Equal hashes mean equal results.
    pub fn hash(&self) -> String {
        let located = Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        Sha256::digest(located.to_toml_string().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn domain(&self) -> Result<TorusDomain, CliError> {
        let p = &self.params;
        TorusDomain::new(p.dimension, p.resolution, p.edge_length).map_err(|e| CliError::Config(format!("params: {e}")))
    }

    /// Checks every invariant and returns warnings about adjustments.
    pub fn validate(&self) -> Result<Vec<String>, CliError> {
        let (_, warnings) = self.build_params()?;
        let r = &self.run;
        let bad = |msg: &str| Err(CliError::Config(msg.to_owned()));
        if self.seeds.is_empty() {
            return bad("seeds: at least one seed is required");
        }
        if r.record_every == 0 || r.checkpoint_every == Some(0) {
            return bad("run: cadences must be positive");
        }
        for (name, v) in [
            ("t_final", r.t_final),
            ("t_burn_in", r.t_burn_in),
            ("t_sample", r.t_sample),
            ("t_pair", r.t_pair),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Config(format!("run.{name} must be a nonnegative number, got {v}")));
            }
        }
        if !(r.initial_h_norm.is_finite() && r.initial_h_norm >= 0.0) {
            return bad("run.initial_h_norm must be nonnegative");
        }
        if r.n_snapshots == 0 {
            return bad("run.n_snapshots must be positive");
        }
        if r.perturbations.is_empty() || r.perturbations.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad("run.perturbations must be a nonempty list of positive sizes");
        }
        if r.projection_dims.is_empty() || r.projection_dims.contains(&0) {
            return bad("run.projection_dims must be a nonempty list of positive integers");
        }
        if r.box_levels < 2 {
            return bad("run.box_levels must be at least 2");
        }
        if r.rate_times.windows(2).any(|w| w[1] <= w[0]) || r.rate_times.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        {
            return bad("run.rate_times must be nonnegative and strictly increasing");
        }
        Ok(warnings)
    }

    /// Parameters with the forcing projected and truncated, plus warnings
    /// describing what projection or truncation changed.
    pub fn build_params(&self) -> Result<(GmnseParams, Vec<String>), CliError> {
        let dom = self.domain()?;
        let (forcing, warnings) = self.build_forcing(dom)?;
        let s = &self.params;
        let p = GmnseParams::new(s.nu, s.n_cap, s.dt, forcing).map_err(|e| CliError::Config(format!("params: {e}")))?;
        Ok((p, warnings))
    }

    fn build_forcing(&self, dom: TorusDomain) -> Result<(SpectralVelocityField, Vec<String>), CliError> {
        let spec = &self.forcing;
        let cfg = |msg: String| CliError::Config(format!("forcing: {msg}"));
        if !spec.amplitude.is_finite() {
            return Err(cfg(format!("amplitude must be finite, got {}", spec.amplitude)));
        }
        let mut warnings = Vec::new();
        let forcing = match (spec.preset, spec.modes.is_empty()) {
            (Some(_), false) => return Err(cfg("`preset` and `modes` are mutually exclusive".into())),
            (Some(ForcingPreset::Zero), true) => return Ok((SpectralVelocityField::zeros(dom), warnings)),
            (Some(ForcingPreset::TaylorGreenLike) | None, true) => {
                taylor_green_like(dom, spec.amplitude).map_err(|e| cfg(e.to_string()))?
            }
            (None, false) => {
                let d = dom.dimension();
                let mut raw = VectorCoefficients::zeros(dom);
                for (i, m) in spec.modes.iter().enumerate() {
                    let im = if m.im.is_empty() { vec![0.0; d] } else { m.im.clone() };
                    if m.k.len() != d || m.re.len() != d || im.len() != d {
                        return Err(cfg(format!("modes[{i}]: k, re and im need {d} entries each")));
                    }
                    let mut k = [0i64; 3];
                    k[..d].copy_from_slice(&m.k);
                    if k == [0, 0, 0] {
                        return Err(cfg(format!("modes[{i}]: the mean mode cannot be forced")));
                    }
                    let mut value = [Complex64::new(0.0, 0.0); 3];
                    for c in 0..d {
                        value[c] = Complex64::new(m.re[c], im[c]) * spec.amplitude;
                    }
                    raw.set_real_mode(k, value).map_err(|e| cfg(format!("modes[{i}]: {e}")))?;
                }
                let raw_sq: f64 = dom.volume() * raw.data().iter().map(|z| z.norm_sqr()).sum::<f64>();
                let projected = leray_project(&raw);
                let kept = norms(&projected).h_norm.powi(2);
                if raw_sq - kept > 1e-12 * raw_sq {
                    warnings.push(format!(
                        "forcing was not divergence-free (or touched Nyquist modes); projection removed {:.3e} of ‖f‖₂²",
                        (raw_sq - kept) / raw_sq
                    ));
                }
                projected
            }
        };
        let truncated = dealias(&forcing);
        if truncated != forcing {
            warnings.push("forcing modes beyond the dealiasing limit were dropped".into());
        }
        if truncated.is_zero() {
            return Err(cfg("forcing projects to zero; use preset = \"zero\" for an unforced run".into()));
        }
        Ok((truncated, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_documented_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.params.resolution, 16);
        assert_eq!(c.run.perturbations, vec![1e-2, 1e-4]);
        assert!(c.validate().unwrap().is_empty());
    }

    #[test]
    fn round_trip_is_lossless() {
        let mut c = ExperimentConfig::default();
        c.experiment = Experiment::RateFit;
        c.params.dt = 1.0 / 3.0 * 1e-3;
        c.run.checkpoint_every = Some(7);
        c.forcing.modes = vec![ForcingMode {
            k: vec![0, 1, 2],
            re: vec![0.1, 0.0, 0.0],
            im: vec![0.0, 0.0, 0.7],
        }];
        let back = parse_config(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let err = parse_config("experiment = \"simualte\"").unwrap_err().to_string();
        for e in Experiment::ALL {
            assert!(err.contains(e.name()), "{err}");
        }
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse_config("[params]\nnuu = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("nuu"), "{err}");
    }

    #[test]
    fn divergent_forcing_is_projected_with_warning() {
        let c = parse_config("[[forcing.modes]]\nk = [1, 0, 0]\nre = [1.0, 1.0, 0.0]\n").unwrap();
        let w = c.validate().unwrap();
        assert_eq!(w.len(), 1, "{w:?}");
        let (p, _) = c.build_params().unwrap();
        let m = p.forcing().mode([1, 0, 0]).unwrap();
        assert_eq!(m[0], Complex64::new(0.0, 0.0));
        assert_eq!(m[1], Complex64::new(1.0, 0.0));
        assert_eq!(p.forcing().mode([-1, 0, 0]).unwrap()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pure_gradient_forcing_is_rejected() {
        let err = parse_config("[[forcing.modes]]\nk = [1, 0, 0]\nre = [1.0, 0.0, 0.0]\n")
            .unwrap()
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("projects to zero"));
        let zero = parse_config("[forcing]\npreset = \"zero\"\n").unwrap();
        assert!(zero.build_params().unwrap().0.forcing().is_zero());
    }

    #[test]
    fn invalid_settings_are_named() {
        let err = parse_config("seeds = []").unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("seeds"));
        let err = parse_config("[params]\nresolution = 7\n").unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("params"));
        let err = parse_config("[[forcing.modes]]\nk = [1, 0]\nre = [1.0, 0.0, 0.0]\n")
            .unwrap()
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("modes[0]"));
    }
}
