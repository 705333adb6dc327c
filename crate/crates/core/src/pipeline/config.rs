use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::eval::{EvalConfig, DEFAULT_COUNTS};
use crate::lidar::{CullThresholds, NoiseParams, DEFAULT_BUDGET, DEFAULT_MAX_RANGE};
use crate::scene::{SceneConfig, SplitRatios};
use crate::stub::StubConfig;

/// Desk-scale scene count; 5000 matches a full-size synthetic dataset.
pub const DEFAULT_SCENE_COUNT: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub enabled: bool,
    pub noise: NoiseParams,
    pub max_tilt_deg: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self { enabled: false, noise: NoiseParams::default(), max_tilt_deg: 5.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarConfig {
    /// CSV ray table; a rosette pattern is generated when absent.
    pub ray_table: Option<PathBuf>,
    pub rays: usize,
    pub fov_deg: f64,
    pub rate_hz: f64,
    pub max_range: f64,
    pub budget: usize,
    pub cull: CullThresholds,
    pub augment: AugmentConfig,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            ray_table: None,
            rays: 100_000,
            fov_deg: 70.4,
            rate_hz: 240_000.0,
            max_range: DEFAULT_MAX_RANGE,
            budget: DEFAULT_BUDGET,
            cull: CullThresholds::default(),
            augment: AugmentConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Accumulated point counts per capture.
    pub counts: Vec<usize>,
    /// Number of scenes turned into dense captures.
    pub scenes: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { counts: DEFAULT_COUNTS.to_vec(), scenes: 5 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Directory with `<class>.obj` meshes; built-in meshes when absent.
    pub mesh_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Mixed into every section seed.
    pub seed: u64,
    pub count: usize,
    pub scene: SceneConfig,
    pub lidar: LidarConfig,
    pub stub: StubConfig,
    pub eval: EvalConfig,
    pub split: SplitRatios,
    pub bench: BenchConfig,
    pub paths: PathsConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: DEFAULT_SCENE_COUNT,
            scene: SceneConfig::default(),
            lidar: LidarConfig::default(),
            stub: StubConfig::default(),
            eval: EvalConfig::default(),
            split: SplitRatios::default(),
            bench: BenchConfig::default(),
            paths: PathsConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, PipelineError> {
        toml::to_string(self).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Sha-256 over everything that influences artifact content; output
    /// locations are excluded so relocated runs hash alike.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.paths.out = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self, max_opening_deg: f64) -> Result<(), PipelineError> {
        self.scene.validate(max_opening_deg).map_err(|e| PipelineError::Config(e.to_string()))?;
        self.stub.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.eval.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        let l = &self.lidar;
        if l.rays == 0 || l.budget == 0 {
            return Err(PipelineError::Config("lidar.rays and lidar.budget must be at least 1".into()));
        }
        if !(l.max_range > 0.0) {
            return Err(PipelineError::Config(format!("lidar.max_range must be positive, got {}", l.max_range)));
        }
        if self.bench.counts.is_empty() || self.bench.counts.contains(&0) {
            return Err(PipelineError::Config("bench.counts must be non-empty and positive".into()));
        }
        Ok(())
    }
}
