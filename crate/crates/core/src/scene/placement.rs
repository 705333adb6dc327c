use nalgebra::{Vector2, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poisson::sample_annulus_radius;
use super::Range;
use crate::geometry::{Pose, UnitQuaternion};

/// How a pose placed on a circle picks its heading (+x axis).
#[derive(Clone, Debug, PartialEq)]
pub enum OrientationRule<'a> {
    /// Face one of the points at random, or directly away from it, 50/50.
    TowardOrAway(&'a [Vector3<f64>]),
    Toward(&'a [Vector3<f64>]),
    UniformYaw,
}

/// Which interest point a placement was oriented against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facing {
    pub interest_index: usize,
    pub toward: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirclePlacement {
    pub pose: Pose,
    pub yaw: f64,
    pub facing: Option<Facing>,
}

/// Yaw whose heading points from `from` to `to` in the ground plane.
pub fn yaw_toward(from: &Vector2<f64>, to: &Vector2<f64>) -> f64 {
    let d = to - from;
    d.y.atan2(d.x)
}

/// Area-uniform position in the annulus around `center` (z kept from
/// `center`), heading chosen by `rule`.
pub fn place_on_circle(center: &Vector3<f64>, radius_range: Range, rule: &OrientationRule, rng: &mut impl Rng) -> CirclePlacement {
    let r = sample_annulus_radius(radius_range, rng);
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let position = center + Vector3::new(r * a.cos(), r * a.sin(), 0.0);
    let (yaw, facing) = match rule {
        OrientationRule::UniformYaw => (rng.random_range(-std::f64::consts::PI..std::f64::consts::PI), None),
        OrientationRule::Toward(pts) | OrientationRule::TowardOrAway(pts) => {
            let i = rng.random_range(0..pts.len());
            let toward = matches!(rule, OrientationRule::Toward(_)) || rng.random_bool(0.5);
            let mut yaw = yaw_toward(&position.xy(), &pts[i].xy());
            if !toward {
                yaw = (yaw + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU);
            }
            (yaw, Some(Facing { interest_index: i, toward }))
        }
    };
    CirclePlacement { pose: Pose::new(position, UnitQuaternion::from_yaw(yaw)), yaw, facing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::heading;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_annulus_exact_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = place_on_circle(&Vector3::new(1.0, 2.0, 0.0), [5.0, 5.0], &OrientationRule::UniformYaw, &mut rng);
            assert!(((p.pose.position - Vector3::new(1.0, 2.0, 0.0)).norm() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn heading_points_at_interest() {
        let pts = [Vector3::new(0.0, 0.0, 1.0), Vector3::new(-6.0, 1.2, 1.2)];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seen = [false; 2];
        for _ in 0..200 {
            let p = place_on_circle(&Vector3::zeros(), [5.0, 16.0], &OrientationRule::TowardOrAway(&pts), &mut rng);
            let f = p.facing.unwrap();
            seen[f.toward as usize] = true;
            let h = heading(&p.pose.orientation).unwrap();
            let mut want = yaw_toward(&p.pose.position.xy(), &pts[f.interest_index].xy());
            if !f.toward {
                want += std::f64::consts::PI;
            }
            let diff = (h - want).sin().atan2((h - want).cos()).abs();
            assert!(diff < 1e-6, "heading off by {diff}");
        }
        assert_eq!(seen, [true, true]);
    }
}
