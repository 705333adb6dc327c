//! Domain-randomized scene synthesis around a truck-mounted crane.

mod builder;
mod config;
mod footprint;
mod perlin;
mod placement;
mod poisson;
mod split;
mod verify;

use thiserror::Error;

pub use builder::{
    build_scene, default_interest_points, scene_rng, Layout, ObjectKind, PalletSite, SceneInstance, SceneObject, Shape, DECK_HALF_WIDTH, DECK_LENGTH, DECK_TOP,
    TRUCK_BACKSIDE,
};
pub use config::{PerlinParams, Range, SceneConfig};
pub use footprint::Footprint;
pub use perlin::Perlin;
pub use placement::{place_on_circle, yaw_toward, CirclePlacement, Facing, OrientationRule};
pub use poisson::{sample_annulus_radius, DiskSample, KeepOut, PoissonDisk, Region};
pub use split::{dataset_split, SplitRatios, Splits};
pub use verify::{derive_reference_point, verify_scene};

use crate::mesh::MeshError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("invalid scene config: {0}")]
    InvalidConfig(String),
    #[error("sampling region admits no placement")]
    RegionTooSmall,
    #[error("could not place {what} within {attempts} attempts")]
    PlacementFailure { what: String, attempts: u32 },
    #[error("bad split ratios {0}")]
    BadRatios(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("scene serialization: {0}")]
    Serialization(String),
}
