use serde::{Deserialize, Serialize};

use crate::geometry::{geodesic_error, yaw_error};
use crate::mesh::{ClassMesh, ObjectClass, ParamTarget, ScaleRecord};

/// Mean and population standard deviation of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    /// `None` for an empty sample: absent statistics are not zero.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt(), count: values.len() })
    }
}

/// Geometric errors of one matched pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairErrors {
    pub scene: u64,
    pub class: ObjectClass,
    /// Position offset in meters.
    pub l2_m: f64,
    pub geodesic_deg: f64,
    /// Absent when either heading is undefined (body axis vertical).
    pub yaw_deg: Option<f64>,
    /// Grippers only.
    pub opening_deg: Option<f64>,
}

/// Errors between a normalized prediction and its normalized target, with
/// distances mapped back to meters through `scale`.
pub fn pair_errors(scene: u64, pred: &ParamTarget, target: &ParamTarget, mesh: &ClassMesh, scale: &ScaleRecord) -> PairErrors {
    let set = target.class.symmetry();
    let (qp, qt) = (&pred.pose.orientation, &target.pose.orientation);
    let opening_deg = match (mesh.opening_degrees(pred), mesh.opening_degrees(target)) {
        (Some(a), Some(b)) if target.class.has_opening() => Some((a.clamp(0.0, mesh.max_opening_deg()) - b).abs()),
        _ => None,
    };
    PairErrors {
        scene,
        class: target.class,
        l2_m: scale.denormalize_length((pred.pose.position - target.pose.position).norm()),
        geodesic_deg: geodesic_error(qp, qt, set),
        yaw_deg: yaw_error(qp, qt, set).ok(),
        opening_deg,
    }
}

/// Per-class statistics of the four geometric error kinds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeometricStats {
    pub l2_m: Option<Summary>,
    pub geodesic_deg: Option<Summary>,
    pub yaw_deg: Option<Summary>,
    pub opening_deg: Option<Summary>,
}

pub fn geometric_stats<'a>(pairs: impl IntoIterator<Item = &'a PairErrors>) -> GeometricStats {
    let (mut l2, mut geo, mut yaw, mut open) = (vec![], vec![], vec![], vec![]);
    for p in pairs {
        l2.push(p.l2_m);
        geo.push(p.geodesic_deg);
        yaw.extend(p.yaw_deg);
        open.extend(p.opening_deg);
    }
    GeometricStats { l2_m: Summary::of(&l2), geodesic_deg: Summary::of(&geo), yaw_deg: Summary::of(&yaw), opening_deg: Summary::of(&open) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Pose, UnitQuaternion};
    use crate::mesh::procedural::DEFAULT_SAMPLE_SEED;
    use crate::mesh::MeshLibrary;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scale() -> ScaleRecord {
        ScaleRecord::from_bounds(&Aabb { min: Vector3::repeat(-8.0), max: Vector3::repeat(8.0) }, 90.0).unwrap()
    }

    #[test]
    fn summary_values() {
        assert!(Summary::of(&[]).is_none());
        let s = Summary::of(&[0.1]).unwrap();
        assert_eq!((s.mean, s.std, s.count), (0.1, 0.0, 1));
        let s = Summary::of(&[1.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std), (2.0, 1.0));
    }

    #[test]
    fn offset_of_ten_centimeters() {
        let rec = scale();
        let lib = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).unwrap().normalized(&rec);
        let t = rec.normalize_target(&ParamTarget::rigid(ObjectClass::Pallet, Pose::from_translation(Vector3::new(1.0, 2.0, 0.0))));
        let p = rec.normalize_target(&ParamTarget::rigid(ObjectClass::Pallet, Pose::from_translation(Vector3::new(1.1, 2.0, 0.0))));
        let e = pair_errors(0, &p, &t, lib.get(ObjectClass::Pallet).unwrap(), &rec);
        assert!((e.l2_m - 0.1).abs() < 1e-12);
        assert_eq!(e.geodesic_deg, 0.0);
        assert_eq!(e.opening_deg, None);
        let same = pair_errors(0, &t, &t, lib.get(ObjectClass::Pallet).unwrap(), &rec);
        assert_eq!((same.l2_m, same.geodesic_deg, same.yaw_deg), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn constructed_five_degree_yaw_offsets() {
        let rec = scale();
        let lib = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).unwrap().normalized(&rec);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pairs = vec![];
        for i in 0..200 {
            let yaw: f64 = rng.random_range(-3.0..3.0);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let t = rec.normalize_target(&ParamTarget::gripper(Pose::new(Vector3::zeros(), UnitQuaternion::from_yaw(yaw)), 30.0));
            let mut p = t;
            p.pose.orientation = UnitQuaternion::from_yaw(yaw + sign * 5f64.to_radians());
            pairs.push(pair_errors(0, &p, &t, lib.get(ObjectClass::Gripper).unwrap(), &rec));
        }
        let s = geometric_stats(&pairs);
        assert!((s.yaw_deg.unwrap().mean - 5.0).abs() < 1e-6);
        assert!((s.geodesic_deg.unwrap().mean - 5.0).abs() < 1e-6);
        assert_eq!(s.opening_deg.unwrap().mean, 0.0);
    }

    #[test]
    fn flip_of_target_leaves_angles_unchanged() {
        let rec = scale();
        let lib = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).unwrap().normalized(&rec);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let q = |rng: &mut ChaCha8Rng| {
                UnitQuaternion::from_yaw_pitch_roll(rng.random_range(-3.0..3.0), rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
            };
            let t = rec.normalize_target(&ParamTarget::rigid(ObjectClass::Pallet, Pose::new(Vector3::zeros(), q(&mut rng))));
            let p = rec.normalize_target(&ParamTarget::rigid(ObjectClass::Pallet, Pose::new(Vector3::zeros(), q(&mut rng))));
            let mut tf = t;
            tf.pose.orientation = t.pose.orientation.z_flipped();
            let mesh = lib.get(ObjectClass::Pallet).unwrap();
            let (a, b) = (pair_errors(0, &p, &t, mesh, &rec), pair_errors(0, &p, &tf, mesh, &rec));
            assert!((a.geodesic_deg - b.geodesic_deg).abs() < 1e-9);
            assert!((a.yaw_deg.unwrap() - b.yaw_deg.unwrap()).abs() < 1e-9);
        }
    }
}
