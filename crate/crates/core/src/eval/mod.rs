//! Detection AP under the Chamfer match criterion, geometric error
//! statistics, report rendering and the point accumulation study.

mod ap;
mod matcher;
mod report;
mod stats;
mod study;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ap::average_precision;
pub use matcher::{accepts, check_matching, extract_detections, match_for_eval, Detection, SceneMatch};
pub use report::{aggregate, dataset_weights, errors_csv, evaluate, evaluate_scene, ClassReport, EvalReport, SceneEval, SceneEvalInput};
pub use stats::{geometric_stats, pair_errors, GeometricStats, PairErrors, Summary};
pub use study::{accumulation_study, AccumulationReport, Capture, CountResult, StageTiming, StudyConfig, DEFAULT_COUNTS, STAGES};

use crate::lidar::LidarError;
use crate::matching::MatchError;
use crate::mesh::MeshError;
use crate::stub::StubError;

/// Chamfer distance below which a same-class prediction matches, in
/// normalized units.
pub const CD_THRESHOLD: f64 = 0.00125;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub cd_threshold: f64,
    /// Only queries whose argmax is an object class become detections.
    pub suppress_no_object: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { cd_threshold: CD_THRESHOLD, suppress_no_object: true }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.cd_threshold > 0.0 && self.cd_threshold.is_finite()) {
            return Err(EvalError::InvalidConfig(format!("cd_threshold must be positive, got {}", self.cd_threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("class has no ground truth")]
    NoGroundTruth,
    #[error("invalid eval config: {0}")]
    InvalidConfig(String),
    #[error("predictions and targets must be in the normalized frame")]
    NotNormalized,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("capture {scene} has {have} points, {need} requested")]
    InsufficientPoints { scene: u64, have: usize, need: usize },
    #[error("report formatting failed: {0}")]
    Format(String),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Lidar(#[from] LidarError),
    #[error(transparent)]
    Stub(#[from] StubError),
}
