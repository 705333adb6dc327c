//! Angular error metrics used in evaluation.
//!
//! Both metrics minimize over the class symmetry set so that a gripper or
//! pallet predicted with the opposite heading is not penalized.

use nalgebra::Vector3;

use super::{GeometryError, SymmetrySet, UnitQuaternion};

/// Projections of the heading axis shorter than this have no defined yaw.
const MIN_HEADING_NORM: f64 = 1e-9;

/// Smallest rotation angle in degrees between any symmetric image of
/// `predicted` and `target`. Range `[0, 180]`.
pub fn geodesic_error(predicted: &UnitQuaternion, target: &UnitQuaternion, set: SymmetrySet) -> f64 {
    set.expand(predicted).iter().map(|q| q.angle_to(target)).fold(f64::INFINITY, f64::min).to_degrees().clamp(0.0, 180.0)
}

/// Heading in radians: angle of the rotated body +x axis projected onto the xy-plane.
pub fn heading(q: &UnitQuaternion) -> Result<f64, GeometryError> {
    let fwd = q.rotate(&Vector3::x());
    if fwd.xy().norm() < MIN_HEADING_NORM {
        return Err(GeometryError::DegenerateYaw);
    }
    Ok(fwd.y.atan2(fwd.x))
}

/// Absolute wrapped difference of two angles in degrees, in `[0, 180]`.
pub fn wrapped_angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

/// Smallest heading difference in degrees over the symmetry set. Range `[0, 180]`.
pub fn yaw_error(predicted: &UnitQuaternion, target: &UnitQuaternion, set: SymmetrySet) -> Result<f64, GeometryError> {
    let t = heading(target)?.to_degrees();
    let mut best = f64::INFINITY;
    for q in set.expand(predicted) {
        let h = heading(&q)?.to_degrees();
        best = best.min(wrapped_angle_diff_deg(h, t));
    }
    Ok(best)
}

/// Unit direction for a ray given azimuth (about +z from +x) and elevation
/// (above the xy-plane), both in radians.
pub fn spherical_to_cartesian(azimuth: f64, elevation: f64) -> Vector3<f64> {
    let (se, ce) = elevation.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    Vector3::new(ce * ca, ce * sa, se)
}
