//! Stage-file orchestration: scene generation, scanning, stub prediction
//! and evaluation, each reading only the previous stage's artifacts.

mod artifact;
mod config;
mod stages;

use thiserror::Error;

pub use artifact::{read_json, sha256_hex, text_header, write_atomic, write_json, Envelope, FileEntry, SCHEMA_VERSION, TOOL, TOOL_VERSION};
pub use config::{AugmentConfig, BenchConfig, LidarConfig, PathsConfig, PipelineConfig, DEFAULT_SCENE_COUNT};
pub use stages::{
    check_report, Pipeline, PredictionManifest, RunManifest, ScanManifest, ScanTruth, SceneManifest, ScenePredictions, BENCH_DIR, EVAL_DIR, PREDICTIONS_DIR,
    RUN_MANIFEST, SCANS_DIR, SCENES_DIR,
};

use crate::eval::EvalError;
use crate::lidar::LidarError;
use crate::matching::MatchError;
use crate::mesh::MeshError;
use crate::scene::SceneError;
use crate::stub::StubError;

/// Errors sorted by the exit status they map to.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Invariant(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<MeshError> for PipelineError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::Io(_) => Self::Io(e.to_string()),
            MeshError::MeshParse { .. } => Self::Config(e.to_string()),
            _ => Self::Invariant(e.to_string()),
        }
    }
}

impl From<SceneError> for PipelineError {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Mesh(m) => m.into(),
            SceneError::Serialization(_) => Self::Io(e.to_string()),
            // Exhausted retries mean the layout ranges cannot be satisfied.
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<LidarError> for PipelineError {
    fn from(e: LidarError) -> Self {
        match e {
            LidarError::Io(_) | LidarError::CloudFormat(_) => Self::Io(e.to_string()),
            LidarError::InvalidRayTable { .. } | LidarError::InvalidParameter(_) => Self::Config(e.to_string()),
            _ => Self::Invariant(e.to_string()),
        }
    }
}

impl From<StubError> for PipelineError {
    fn from(e: StubError) -> Self {
        match e {
            StubError::InvalidConfig(_) => Self::Config(e.to_string()),
            _ => Self::Invariant(e.to_string()),
        }
    }
}

impl From<MatchError> for PipelineError {
    fn from(e: MatchError) -> Self {
        match e {
            MatchError::Mesh(m) => m.into(),
            _ => Self::Invariant(e.to_string()),
        }
    }
}

impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InvalidConfig(_) => Self::Config(e.to_string()),
            EvalError::Format(_) => Self::Io(e.to_string()),
            EvalError::Match(m) => m.into(),
            EvalError::Mesh(m) => m.into(),
            EvalError::Lidar(l) => l.into(),
            EvalError::Stub(s) => s.into(),
            _ => Self::Invariant(e.to_string()),
        }
    }
}
