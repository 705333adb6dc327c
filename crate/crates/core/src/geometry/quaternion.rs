//! Unit quaternions stored in `(w, x, y, z)` order.
//!
//! The scalar part comes first, so `(0, 0, 0, 1)` is the 180° rotation about
//! the z-axis. ROS messages and Blender both use different orderings; convert
//! at the boundary, never inside the library.

use std::ops::{Mul, Neg};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Norms below this are rejected when constructing from raw components.
const MIN_NORM: f64 = 1e-12;

/// A rotation encoded as a unit quaternion `(w, x, y, z)`.
///
/// `q` and `-q` encode the same rotation; use [`UnitQuaternion::same_rotation`]
/// for rotation equality. `PartialEq` compares components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// 180° rotation about +z, the `[0, 0, 0, 1]` multiplier of the symmetry sets.
    pub const Z_FLIP: Self = Self { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes the given components.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < MIN_NORM {
            return Err(GeometryError::DegenerateQuaternion { norm });
        }
        Ok(Self { w: w / norm, x: x / norm, y: y / norm, z: z / norm })
    }

    /// Rotation of `angle` radians about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self, GeometryError> {
        let n = axis.norm();
        if !n.is_finite() || n < MIN_NORM {
            return Err(GeometryError::DegenerateAxis);
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let a = axis / n;
        Self::new(c, a.x * s, a.y * s, a.z * s)
    }

    /// Rotation about +z by `yaw` radians.
    pub fn from_yaw(yaw: f64) -> Self {
        let (s, c) = (0.5 * yaw).sin_cos();
        Self { w: c, x: 0.0, y: 0.0, z: s }
    }

    /// Intrinsic z-y-x (yaw, pitch, roll) composition: `Rz(yaw) * Ry(pitch) * Rx(roll)`.
    pub fn from_yaw_pitch_roll(yaw: f64, pitch: f64, roll: f64) -> Self {
        let qz = Self::from_yaw(yaw);
        let (sp, cp) = (0.5 * pitch).sin_cos();
        let qy = Self { w: cp, x: 0.0, y: sp, z: 0.0 };
        let (sr, cr) = (0.5 * roll).sin_cos();
        let qx = Self { w: cr, x: sr, y: 0.0, z: 0.0 };
        qz * qy * qx
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector_part(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn conjugate(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Hamilton product `self ⊗ rhs`, renormalized.
    pub fn multiply(&self, rhs: &Self) -> Self {
        let (a, b) = (self, rhs);
        let w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
        let x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y;
        let y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x;
        let z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w;
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self { w: w / n, x: x / n, y: y / n, z: z / n }
    }

    /// `self ⊗ (0, 0, 0, 1)`: the body-frame 180° flip about z.
    pub fn z_flipped(&self) -> Self {
        Self { w: -self.z, x: self.y, y: -self.x, z: self.w }
    }

    pub fn to_rotation_matrix(&self) -> Matrix3<f64> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        // v' = v + 2 u × (u × v + w v)
        let u = self.vector_part();
        let t = u.cross(v) + v * self.w;
        v + 2.0 * u.cross(&t)
    }

    /// Rotation angle of `self⁻¹ ⊗ other` in radians, in `[0, π]`.
    ///
    /// Uses `atan2` on the relative quaternion, which stays accurate for tiny
    /// angles where `acos` of the dot product loses precision.
    pub fn angle_to(&self, other: &Self) -> f64 {
        // conj(self) ⊗ other, grouped so that equal inputs cancel exactly.
        let (a, b) = (self, other);
        let w = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
        let x = (a.w * b.x - b.w * a.x) + (a.z * b.y - a.y * b.z);
        let y = (a.w * b.y - b.w * a.y) + (a.x * b.z - a.z * b.x);
        let z = (a.w * b.z - b.w * a.z) + (a.y * b.x - a.x * b.y);
        2.0 * (x * x + y * y + z * z).sqrt().atan2(w.abs())
    }

    /// True when both quaternions encode the same rotation within `tol` radians.
    pub fn same_rotation(&self, other: &Self, tol: f64) -> bool {
        self.angle_to(other) <= tol
    }

    /// Sum of absolute component differences.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        (self.w - other.w).abs() + (self.x - other.x).abs() + (self.y - other.y).abs() + (self.z - other.z).abs()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Neg for UnitQuaternion {
    type Output = Self;

    fn neg(self) -> Self {
        Self { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

impl Mul for UnitQuaternion {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs)
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = GeometryError;

    /// Components already unit within `1e-12` are kept bit-for-bit so that
    /// serialized quaternions round-trip exactly.
    fn try_from(c: [f64; 4]) -> Result<Self, Self::Error> {
        let norm2 = c.iter().map(|v| v * v).sum::<f64>();
        if (norm2 - 1.0).abs() < 1e-12 {
            return Ok(Self { w: c[0], x: c[1], y: c[2], z: c[3] });
        }
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.to_array()
    }
}
