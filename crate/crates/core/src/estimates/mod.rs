//! Explicit absorbing radii and inequality monitors along computed
//! trajectories.
//!
//! Every monitor produces a [`MonitorReport`] holding `lhs − rhs` residuals
//! (nonpositive means the inequality holds). Inequalities whose constant is
//! only known to exist are fitted: the reported constant is the smallest
//! one for which every recorded sample satisfies the inequality.

mod burn_in;
mod difference;
mod radii;
mod regularity;
mod trajectory;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::DynamicsError;

pub use burn_in::{burn_in, BurnIn};
pub use difference::{evolve_pair, monitor_lipschitz, monitor_smoothing, PairRecord, SMOOTHING_FIT_START};
pub use radii::{absorbing_radii, AbsorbingRadii};
pub use regularity::{monitor_time_regularity, rho3_formula};
pub use trajectory::{monitor_absorbing, monitor_energy, monitor_enstrophy, monitor_enstrophy_family};

/// Absolute slack in the "inequality holds" test.
pub const ABSOLUTE_SLACK: f64 = 1e-8;
/// Slack relative to the magnitude of the right-hand side.
pub const RELATIVE_SLACK: f64 = 1e-2;

/// `residual ≤ 1e-8 + 1e-2·|rhs|`.
pub fn holds(residual: f64, rhs: f64) -> bool {
    residual <= ABSOLUTE_SLACK + RELATIVE_SLACK * rhs.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    /// `d/dt‖u‖₂² + ν‖u‖² ≤ ‖f‖₂²/(νλ₁)`.
    EnergyBalance,
    /// Entry into and stay inside the `H` and `V` absorbing balls.
    AbsorbingBalls,
    /// `d/dt‖u‖² + ν‖Au‖₂² ≤ (2/ν)‖f‖₂² + C N⁴ ‖u‖²`.
    EnstrophyBalance,
    /// `‖w(t)‖₂² + ν∫₀ᵗ‖w‖² ≤ e^{C N⁴ t}‖w(0)‖₂²` for a difference of solutions.
    DifferenceLipschitz,
    /// `t̄‖w(t)‖² ≤ ϱ₁ e^{ϱ₂ t̄} ‖w(0)‖₂²`.
    Smoothing,
    /// `‖u(t) − u(t̃)‖₂ ≤ ϱ₃(|t − t̃|)|t − t̃|^{1/2}`.
    TimeRegularity,
}

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::EnergyBalance => "energy-balance",
            Self::AbsorbingBalls => "absorbing-balls",
            Self::EnstrophyBalance => "enstrophy-balance",
            Self::DifferenceLipschitz => "difference-lipschitz",
            Self::Smoothing => "smoothing",
            Self::TimeRegularity => "time-regularity",
        }
    }
}

/// Residual series of one inequality along one trajectory family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub inequality_id: InequalityId,
    /// Abscissa of each residual: a time, or a time separation for
    /// pairwise checks.
    pub times: Vec<f64>,
    /// `lhs − rhs`; nonpositive means satisfied.
    pub residual_series: Vec<f64>,
    pub fitted_c: Option<f64>,
    /// Fraction of samples failing [`holds`].
    pub violation_fraction: f64,
    /// Named measured or fitted quantities (entry times, `ϱ̂` values, ...).
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl MonitorReport {
    pub(crate) fn new(inequality_id: InequalityId) -> Self {
        Self {
            inequality_id,
            times: Vec::new(),
            residual_series: Vec::new(),
            fitted_c: None,
            violation_fraction: 0.0,
            constants: BTreeMap::new(),
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub(crate) fn set(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_owned(), value);
    }

    pub fn residual_stats(&self) -> ResidualStats {
        let count = self.residual_series.len();
        if count == 0 {
            return ResidualStats {
                count,
                min: 0.0,
                max: 0.0,
                mean: 0.0,
            };
        }
        let min = self.residual_series.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.residual_series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = self.residual_series.iter().sum::<f64>() / count as f64;
        ResidualStats { count, min, max, mean }
    }

    /// Report summary with residual statistics instead of the full series.
    pub fn to_summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "inequality_id": self.inequality_id,
            "residual": self.residual_stats(),
            "violation_fraction": self.violation_fraction,
            "fitted_c": self.fitted_c,
            "constants": self.constants,
        })
    }
}

/// Fraction of `(residual, rhs)` pairs failing [`holds`].
pub(crate) fn violation_fraction(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut bad, mut total) = (0usize, 0usize);
    for (r, rhs) in pairs {
        total += 1;
        if !holds(r, rhs) {
            bad += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        bad as f64 / total as f64
    }
}

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("need at least {needed} samples, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("series lengths disagree: {0}")]
    MismatchedSeries(String),
    #[error("identical initial data: the difference ratio is undefined")]
    IdenticalInitialData,
    #[error("burn-in of {t_burn} time units not certified: {reason}; extend the transient")]
    BurnInNotCertified { t_burn: f64, reason: String },
    #[error("initial data live on different domains")]
    DomainMismatch,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_rule() {
        assert!(holds(0.0, 0.0));
        assert!(holds(5e-9, 0.0));
        assert!(!holds(2e-8, 0.0));
        assert!(holds(0.9, 100.0));
        assert!(!holds(1.1, -100.0));
        assert_eq!(violation_fraction([(1.0, 0.0), (-1.0, 0.0)]), 0.5);
    }
}
