//! Quaternion algebra, symmetry sets, rigid poses and angular metrics.

mod metrics;
mod pose;
mod quaternion;
mod symmetry;

pub use metrics::{geodesic_error, heading, spherical_to_cartesian, wrapped_angle_diff_deg, yaw_error};
pub use pose::Pose;
pub use quaternion::UnitQuaternion;
pub use symmetry::{quat_symmetry_loss, SymmetrySet};

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("quaternion has degenerate norm {norm}")]
    DegenerateQuaternion { norm: f64 },
    #[error("rotation axis has zero length")]
    DegenerateAxis,
    #[error("heading undefined: rotated +x axis is parallel to z")]
    DegenerateYaw,
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Self { min: Vector3::repeat(f64::INFINITY), max: Vector3::repeat(f64::NEG_INFINITY) }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vector3<f64>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vector3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb { min: self.min.inf(&other.min), max: self.max.sup(&other.max) }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn center(&self) -> Vector3<f64> {
        (self.min + self.max) * 0.5
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn distance_squared(&self, p: &Vector3<f64>) -> f64 {
        let d = (self.min - p).sup(&Vector3::zeros()).sup(&(p - self.max));
        d.norm_squared()
    }
}
