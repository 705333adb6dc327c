use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Frame, LidarError, ScanCloud};
use crate::geometry::{Pose, UnitQuaternion};
use crate::mesh::{LabeledTarget, ObjectClass, ParamTarget};
use crate::sampling::farthest_point_indices;

pub const DEFAULT_BUDGET: usize = 32_768;

/// Reduces `cloud` to `budget` points by exact farthest point sampling from a
/// seeded random start; clouds already within budget are returned unchanged.
pub fn fps_reduce(cloud: &ScanCloud, budget: usize, seed: u64) -> Result<ScanCloud, LidarError> {
    if budget == 0 {
        return Err(LidarError::InvalidParameter("budget must be at least 1".into()));
    }
    if cloud.len() <= budget {
        return Ok(cloud.clone());
    }
    let start = ChaCha8Rng::seed_from_u64(seed).random_range(0..cloud.len());
    Ok(cloud.select(&farthest_point_indices(&cloud.points, budget, start)))
}

/// Minimum post-reduction hits for a target to stay annotated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CullThresholds {
    pub gripper: usize,
    pub loading_platform: usize,
    pub pallet: usize,
}

impl Default for CullThresholds {
    fn default() -> Self {
        Self { gripper: 50, loading_platform: 80, pallet: 30 }
    }
}

impl CullThresholds {
    pub const ZERO: Self = Self { gripper: 0, loading_platform: 0, pallet: 0 };

    pub fn get(&self, class: ObjectClass) -> usize {
        match class {
            ObjectClass::Gripper => self.gripper,
            ObjectClass::LoadingPlatform => self.loading_platform,
            ObjectClass::Pallet => self.pallet,
            ObjectClass::NoObject => 0,
        }
    }
}

/// Drops targets whose instance received fewer hits than its class threshold.
pub fn cull_occluded_targets(targets: &[LabeledTarget], cloud: &ScanCloud, thresholds: &CullThresholds) -> Result<Vec<LabeledTarget>, LidarError> {
    let counts = cloud.hit_counts()?;
    Ok(targets.iter().filter(|t| counts.get(&t.instance_id).copied().unwrap_or(0) >= thresholds.get(t.target.class)).copied().collect())
}

/// The 180° turn about z between the two sensor conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFlip {
    /// False when the input was already in the target convention.
    pub applied: bool,
}

impl FrameFlip {
    pub fn motion() -> Pose {
        Pose::new(nalgebra::Vector3::zeros(), UnitQuaternion::Z_FLIP)
    }

    /// Maps a prediction made on the preprocessed cloud back to the original
    /// sensor frame.
    pub fn to_original(&self, t: &ParamTarget) -> ParamTarget {
        if self.applied {
            t.transformed(&Self::motion())
        } else {
            *t
        }
    }

    pub fn point_to_original(&self, p: &nalgebra::Vector3<f64>) -> nalgebra::Vector3<f64> {
        if self.applied {
            nalgebra::Vector3::new(-p.x, -p.y, p.z)
        } else {
            *p
        }
    }
}

/// Keeps points within `max_range` of the sensor origin.
pub fn range_filter(cloud: &ScanCloud, max_range: f64) -> Result<ScanCloud, LidarError> {
    if cloud.frame == Frame::World {
        return Err(LidarError::WrongFrame { expected: Frame::SensorRos, found: cloud.frame });
    }
    let keep: Vec<usize> = (0..cloud.len()).filter(|&i| cloud.points[i].norm() <= max_range).collect();
    if keep.is_empty() {
        return Err(LidarError::EmptyAfterFilter);
    }
    Ok(cloud.select(&keep))
}

/// Converts a sensor-frame cloud to the simulation's convention; clouds
/// already in it pass through.
pub fn to_blender_convention(cloud: &ScanCloud) -> Result<(ScanCloud, FrameFlip), LidarError> {
    match cloud.frame {
        Frame::World => Err(LidarError::WrongFrame { expected: Frame::SensorRos, found: cloud.frame }),
        Frame::SensorBlender => Ok((cloud.clone(), FrameFlip { applied: false })),
        Frame::SensorRos => {
            let mut out = cloud.clone();
            for p in &mut out.points {
                *p = nalgebra::Vector3::new(-p.x, -p.y, p.z);
            }
            out.frame = Frame::SensorBlender;
            Ok((out, FrameFlip { applied: true }))
        }
    }
}

/// Real-capture preprocessing: range filter around the sensor, reduction to
/// `budget` points and conversion to the simulation's sensor convention.
pub fn preprocess_ingested(cloud: &ScanCloud, budget: usize, max_range: f64, seed: u64) -> Result<(ScanCloud, FrameFlip), LidarError> {
    let filtered = range_filter(cloud, max_range)?;
    to_blender_convention(&fps_reduce(&filtered, budget, seed)?)
}
