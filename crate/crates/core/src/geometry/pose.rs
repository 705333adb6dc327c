use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use super::UnitQuaternion;

/// Rigid placement of an object: position plus orientation.
///
/// `normalized` records whether `position` is in meters or in the
/// normalized `[-1, 1]` frame of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion,
    #[serde(default)]
    pub normalized: bool,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion) -> Self {
        Self { position, orientation, normalized: false }
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), UnitQuaternion::IDENTITY)
    }

    pub fn from_translation(position: Vector3<f64>) -> Self {
        Self::new(position, UnitQuaternion::IDENTITY)
    }

    /// Maps a body-frame point into the parent frame.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.orientation.rotate(p) + self.position
    }

    /// Maps a parent-frame point into the body frame.
    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.orientation.conjugate().rotate(&(p - self.position))
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.orientation.rotate(v)
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose { position: self.transform_point(&other.position), orientation: self.orientation * other.orientation, normalized: other.normalized }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.conjugate();
        Pose { position: -inv.rotate(&self.position), orientation: inv, normalized: self.normalized }
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.orientation.to_rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        m
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}
