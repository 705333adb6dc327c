use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{LidarError, ScanCloud};
use crate::geometry::{Pose, UnitQuaternion};
use crate::mesh::ParamTarget;

/// Jitter applied to normalized clouds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    /// Chance that a call perturbs the cloud at all.
    pub probability: f64,
    /// σ is drawn from `(0, max_sigma]` unless `fixed_sigma` is set.
    pub max_sigma: f64,
    pub fixed_sigma: Option<f64>,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { probability: 1.0 / 3.0, max_sigma: 0.04, fixed_sigma: None }
    }
}

/// Returns the jittered cloud and the σ used, or `None` when the draw decided
/// against perturbing.
pub fn add_point_noise(cloud: &ScanCloud, params: &NoiseParams, seed: u64) -> Result<(ScanCloud, Option<f64>), LidarError> {
    if !cloud.normalized {
        return Err(LidarError::NotNormalized);
    }
    if !(0.0..=1.0).contains(&params.probability) || !(params.max_sigma > 0.0) {
        return Err(LidarError::InvalidParameter("noise probability must be in [0, 1] and max_sigma positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !rng.random_bool(params.probability) {
        return Ok((cloud.clone(), None));
    }
    // 1 - U[0,1) lies in (0, 1], so σ ∈ (0, max_sigma].
    let sigma = params.fixed_sigma.unwrap_or_else(|| params.max_sigma * (1.0 - rng.random::<f64>()));
    let normal = Normal::new(0.0, sigma).map_err(|e| LidarError::InvalidParameter(e.to_string()))?;
    let mut out = cloud.clone();
    for p in &mut out.points {
        for c in p.iter_mut() {
            *c += normal.sample(&mut rng);
        }
    }
    Ok((out, Some(sigma)))
}

/// Small rotation about the x and y axes, applied about the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub x_deg: f64,
    pub y_deg: f64,
}

impl Tilt {
    pub fn rotation(&self) -> UnitQuaternion {
        let rx = UnitQuaternion::from_axis_angle(&nalgebra::Vector3::x(), self.x_deg.to_radians()).expect("unit axis");
        let ry = UnitQuaternion::from_axis_angle(&nalgebra::Vector3::y(), self.y_deg.to_radians()).expect("unit axis");
        rx * ry
    }

    pub fn motion(&self) -> Pose {
        Pose::new(nalgebra::Vector3::zeros(), self.rotation())
    }

    pub fn apply(&self, cloud: &ScanCloud, targets: &[ParamTarget]) -> (ScanCloud, Vec<ParamTarget>) {
        let m = self.motion();
        (cloud.transformed(&m, cloud.frame), targets.iter().map(|t| t.transformed(&m)).collect())
    }

    pub fn invert(&self, cloud: &ScanCloud, targets: &[ParamTarget]) -> (ScanCloud, Vec<ParamTarget>) {
        let m = self.motion().inverse();
        (cloud.transformed(&m, cloud.frame), targets.iter().map(|t| t.transformed(&m)).collect())
    }
}

/// Tilts points and targets jointly by angles drawn uniformly from
/// `[-max_deg, max_deg]` about x and y.
pub fn random_tilt(cloud: &ScanCloud, targets: &[ParamTarget], max_deg: f64, seed: u64) -> (ScanCloud, Vec<ParamTarget>, Tilt) {
    if max_deg == 0.0 {
        return (cloud.clone(), targets.to_vec(), Tilt { x_deg: 0.0, y_deg: 0.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tilt = Tilt { x_deg: rng.random_range(-max_deg..=max_deg), y_deg: rng.random_range(-max_deg..=max_deg) };
    let (c, t) = tilt.apply(cloud, targets);
    (c, t, tilt)
}
