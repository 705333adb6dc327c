//! Class meshes, the posed sample-point mapping and frame normalization.

mod class;
mod io;
mod library;
mod model;
mod normalize;
pub mod procedural;
mod sampling;

use thiserror::Error;

pub use class::{LabeledTarget, ObjectClass, ParamTarget, OBJECT_CLASSES};
pub use io::{format_obj, load_mesh, parse_obj, read_sample_cache, sample_cache_path, save_mesh, sidecar_path, ArticulationMetadata, MeshMetadata};
pub use library::MeshLibrary;
pub(crate) use model::center_of_mass;
pub use model::{point_triangle_distance, Articulation, ClassMesh, MeshPart, TriangleSoup, DEFAULT_MAX_OPENING_DEG, SAMPLE_COUNT};
pub use normalize::{normalize_frame, ScaleRecord, MIN_EXTENT};
pub use sampling::{area_weighted_samples, generate_sample_points, CANDIDATE_COUNT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("{0} meshes are not articulated")]
    NotArticulable(ObjectClass),
    #[error("opening {opening_deg}° outside [0, {max_deg}]°")]
    OpeningOutOfRange { opening_deg: f64, max_deg: f64 },
    #[error("mesh of class {mesh} cannot pose a {target} target")]
    ClassMismatch { mesh: ObjectClass, target: ObjectClass },
    #[error("target and mesh disagree on the normalized frame")]
    NormalizationMismatch,
    #[error("longest extent {longest} m is too small to normalize")]
    DegenerateExtent { longest: f64 },
    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },
    #[error("mesh has no triangles or no surface area")]
    EmptyMesh,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("bad sample points: {0}")]
    BadSamples(String),
    #[error("i/o: {0}")]
    Io(String),
}
