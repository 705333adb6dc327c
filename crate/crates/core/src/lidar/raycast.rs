use rayon::prelude::*;

use super::{Frame, LidarError, RayTable, ScanCloud, SceneGeometry};

/// Default cutoff of the simulated sensor in meters.
pub const DEFAULT_MAX_RANGE: f64 = 25.0;

/// Casts every ray of `rays` from the scene's sensor and returns the nearest
/// hits (world frame, time order) with their owning instance ids.
pub fn raycast_scan(scene: &SceneGeometry, rays: &RayTable, max_range: f64) -> Result<ScanCloud, LidarError> {
    if scene.is_empty() {
        return Err(LidarError::EmptyScene);
    }
    if !(max_range > 0.0) {
        return Err(LidarError::InvalidParameter(format!("max_range must be positive, got {max_range}")));
    }
    let sensor = *scene.sensor();
    let origin = sensor.position;
    let hits: Vec<_> = rays.rows().par_iter().map(|r| scene.cast(&origin, &sensor.transform_vector(&r.direction()), max_range)).collect();
    let (points, ids) = hits.into_iter().flatten().map(|h| (h.point, h.instance_id)).unzip();
    Ok(ScanCloud::simulated(points, ids, Frame::World))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose, UnitQuaternion};
    use crate::lidar::{Primitive, Ray};
    use nalgebra::Vector3;

    fn forward_rays(n: usize) -> RayTable {
        RayTable::new((0..n).map(|i| Ray { timestamp: i as f64, azimuth: 0.0, elevation: 0.0 }).collect()).unwrap()
    }

    #[test]
    fn square_hit_straight_down() {
        let down = UnitQuaternion::from_axis_angle(&Vector3::y(), std::f64::consts::FRAC_PI_2).unwrap();
        let mut s = SceneGeometry::new(Pose::new(Vector3::new(0.0, 0.0, 10.0), down));
        let v = [Vector3::new(-0.5, -0.5, 0.0), Vector3::new(0.5, -0.5, 0.0), Vector3::new(0.5, 0.5, 0.0), Vector3::new(-0.5, 0.5, 0.0)];
        s.add_mesh(3, &v, &[[0, 1, 2], [0, 2, 3]]);
        s.finalize();
        let cloud = raycast_scan(&s, &forward_rays(1), 25.0).unwrap();
        assert_eq!(cloud.len(), 1);
        assert!(cloud.points[0].norm() < 1e-12);
        assert_eq!(cloud.source_ids.unwrap(), vec![3]);
        let h = s.cast(&Vector3::new(0.0, 0.0, 10.0), &-Vector3::z(), 25.0).unwrap();
        assert!((h.distance - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_hit_distance() {
        for r in [0.1, 0.5, 1.7] {
            let mut s = SceneGeometry::new(Pose::identity());
            s.add_primitive(1, Primitive::Sphere { center: Vector3::new(5.0, 0.0, 0.0), radius: r });
            s.finalize();
            let h = s.cast(&Vector3::zeros(), &Vector3::x(), 25.0).unwrap();
            assert!((h.distance - (5.0 - r)).abs() < 1e-9);
        }
    }

    #[test]
    fn beyond_max_range_is_dropped() {
        let mut s = SceneGeometry::new(Pose::identity());
        s.add_primitive(1, Primitive::Sphere { center: Vector3::new(26.5, 0.0, 0.0), radius: 0.5 });
        s.finalize();
        assert!(raycast_scan(&s, &forward_rays(10), 25.0).unwrap().is_empty());
        assert_eq!(raycast_scan(&s, &forward_rays(10), 27.0).unwrap().len(), 10);
    }

    #[test]
    fn preconditions() {
        let s = SceneGeometry::new(Pose::identity());
        assert!(matches!(raycast_scan(&s, &forward_rays(1), 25.0), Err(LidarError::EmptyScene)));
        let mut s = SceneGeometry::new(Pose::identity());
        s.add_primitive(0, Primitive::Sphere { center: Vector3::x(), radius: 0.1 });
        s.finalize();
        assert!(raycast_scan(&s, &forward_rays(1), 0.0).is_err());
    }
}
