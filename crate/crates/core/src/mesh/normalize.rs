use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{MeshError, ParamTarget};
use crate::geometry::Aabb;

/// Longest-axis extents below this (meters) cannot be normalized.
pub const MIN_EXTENT: f64 = 1e-6;

/// Records how a scan was mapped into the `[-1, 1]` frame so that every
/// normalized quantity can be mapped back exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub center: Vector3<f64>,
    /// Half of the longest bounding-box axis, in meters.
    pub half_extent: f64,
    /// Opening range upper bound used for the `[0, max] → [-1, 1]` map.
    pub max_opening_deg: f64,
}

impl ScaleRecord {
    pub fn from_bounds(bounds: &Aabb, max_opening_deg: f64) -> Result<Self, MeshError> {
        if bounds.is_empty() {
            return Err(MeshError::DegenerateExtent { longest: 0.0 });
        }
        let longest = bounds.extent().max();
        if !(longest >= MIN_EXTENT) {
            return Err(MeshError::DegenerateExtent { longest });
        }
        Ok(Self { center: bounds.center(), half_extent: 0.5 * longest, max_opening_deg })
    }

    pub fn normalize_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (p - self.center) / self.half_extent
    }

    pub fn denormalize_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        p * self.half_extent + self.center
    }

    pub fn normalize_length(&self, meters: f64) -> f64 {
        meters / self.half_extent
    }

    pub fn denormalize_length(&self, units: f64) -> f64 {
        units * self.half_extent
    }

    pub fn normalize_opening(&self, deg: f64) -> f64 {
        2.0 * deg / self.max_opening_deg - 1.0
    }

    pub fn denormalize_opening(&self, v: f64) -> f64 {
        (v + 1.0) * 0.5 * self.max_opening_deg
    }

    pub fn normalize_target(&self, t: &ParamTarget) -> ParamTarget {
        if t.pose.normalized {
            return *t;
        }
        let mut out = *t;
        out.pose.position = self.normalize_point(&t.pose.position);
        out.pose.normalized = true;
        out.opening = t.opening.map(|a| self.normalize_opening(a));
        out
    }

    pub fn denormalize_target(&self, t: &ParamTarget) -> ParamTarget {
        if !t.pose.normalized {
            return *t;
        }
        let mut out = *t;
        out.pose.position = self.denormalize_point(&t.pose.position);
        out.pose.normalized = false;
        out.opening = t.opening.map(|a| self.denormalize_opening(a));
        out
    }

    /// Scale factor applied to meshes living in the normalized frame.
    pub fn mesh_scale(&self) -> f64 {
        1.0 / self.half_extent
    }
}

/// Normalizes targets and points with respect to the longest axis of
/// `cloud_bounds`: center, then divide by half the longest extent.
#[allow(clippy::type_complexity)]
pub fn normalize_frame(
    cloud_bounds: &Aabb,
    targets: &[ParamTarget],
    points: &[Vector3<f64>],
    max_opening_deg: f64,
) -> Result<(Vec<ParamTarget>, Vec<Vector3<f64>>, ScaleRecord), MeshError> {
    let rec = ScaleRecord::from_bounds(cloud_bounds, max_opening_deg)?;
    let t = targets.iter().map(|t| rec.normalize_target(t)).collect();
    let p = points.iter().map(|p| rec.normalize_point(p)).collect();
    Ok((t, p, rec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose, UnitQuaternion};
    use crate::mesh::{procedural, ObjectClass};
    use approx::assert_abs_diff_eq;

    fn bounds(min: [f64; 3], max: [f64; 3]) -> Aabb {
        Aabb { min: Vector3::from(min), max: Vector3::from(max) }
    }

    #[test]
    fn boundary_maps_to_one() {
        let b = bounds([-12.5, -3.0, -1.0], [12.5, 4.0, 2.0]);
        let (_, pts, rec) = normalize_frame(&b, &[], &[Vector3::new(12.5, 0.5, 0.5)], 90.0).unwrap();
        assert_eq!(rec.half_extent, 12.5);
        assert_abs_diff_eq!(pts[0], Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn opening_midpoint_is_zero() {
        let rec = ScaleRecord::from_bounds(&bounds([0.0; 3], [1.0; 3]), 90.0).unwrap();
        assert_eq!(rec.normalize_opening(45.0), 0.0);
        assert_eq!(rec.normalize_opening(0.0), -1.0);
        assert_eq!(rec.normalize_opening(90.0), 1.0);
    }

    #[test]
    fn degenerate_extent() {
        let b = bounds([1.0, 1.0, 1.0], [1.0 + 1e-7, 1.0, 1.0]);
        assert!(matches!(ScaleRecord::from_bounds(&b, 90.0), Err(MeshError::DegenerateExtent { .. })));
        assert!(ScaleRecord::from_bounds(&Aabb::empty(), 90.0).is_err());
    }

    #[test]
    fn round_trip() {
        let rec = ScaleRecord::from_bounds(&bounds([-3.0, -20.0, -2.0], [17.0, 5.0, 6.0]), 90.0).unwrap();
        let t = ParamTarget::gripper(Pose::new(Vector3::new(4.0, -7.5, 2.2), UnitQuaternion::new(0.3, 0.2, 0.1, 0.9).unwrap()), 33.0);
        let back = rec.denormalize_target(&rec.normalize_target(&t));
        assert_abs_diff_eq!(back.pose.position, t.pose.position, epsilon = 1e-9);
        assert_abs_diff_eq!(back.opening.unwrap(), 33.0, epsilon = 1e-9);
        assert!(!back.pose.normalized);
    }

    #[test]
    fn normalization_commutes_with_phi() {
        let rec = ScaleRecord::from_bounds(&bounds([-10.0, -20.0, -2.0], [30.0, 5.0, 6.0]), 90.0).unwrap();
        let mesh = procedural::gripper(4).unwrap();
        let t = ParamTarget::gripper(Pose::new(Vector3::new(4.0, -7.5, 2.2), UnitQuaternion::new(0.3, 0.2, 0.1, 0.9).unwrap()), 52.0);
        let metric: Vec<_> = mesh.phi(&t).unwrap().iter().map(|p| rec.normalize_point(p)).collect();
        let nmesh = mesh.scaled(rec.mesh_scale(), true);
        let normalized = nmesh.phi(&rec.normalize_target(&t)).unwrap();
        for (a, b) in metric.iter().zip(&normalized) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        let pallet = procedural::pallet(4).unwrap();
        let t = ParamTarget::rigid(ObjectClass::Pallet, Pose::from_translation(Vector3::new(1.0, 2.0, 0.0)));
        assert!(pallet.phi(&rec.normalize_target(&t)).is_err());
    }
}
