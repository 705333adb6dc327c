//! Scan simulation: ray tables, scene raycasting, point reduction,
//! occlusion culling, real-capture preprocessing and augmentations.

mod augment;
mod bvh;
mod cloud;
mod raycast;
mod rays;
mod reduce;
mod scene;

use thiserror::Error;

pub use augment::{add_point_noise, random_tilt, NoiseParams, Tilt};
pub use cloud::{Frame, Provenance, ScanCloud, CLOUD_MAGIC, CLOUD_VERSION, NO_SOURCE};
pub use raycast::{raycast_scan, DEFAULT_MAX_RANGE};
pub use rays::{Ray, RayTable};
pub use reduce::{cull_occluded_targets, fps_reduce, preprocess_ingested, range_filter, to_blender_convention, CullThresholds, FrameFlip, DEFAULT_BUDGET};
pub use scene::{Hit, Primitive, SceneGeometry, T_MIN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LidarError {
    #[error("invalid ray table at row {row}: {message}")]
    InvalidRayTable { row: usize, message: String },
    #[error("scene has no geometry")]
    EmptyScene,
    #[error("cloud has no per-point source ids")]
    MissingSourceIds,
    #[error("no points left after the range filter")]
    EmptyAfterFilter,
    #[error("operation requires a normalized cloud")]
    NotNormalized,
    #[error("expected a {expected:?} cloud, found {found:?}")]
    WrongFrame { expected: Frame, found: Frame },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed cloud file: {0}")]
    CloudFormat(String),
    #[error("i/o: {0}")]
    Io(String),
}
