//! Synthetic detector: turns ground truth into query predictions under
//! controlled corruption, so matching and evaluation run end to end without
//! a trained network.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, UnitQuaternion};
use crate::matching::{Hypothesis, Prediction};
use crate::mesh::{ObjectClass, ParamTarget, OBJECT_CLASSES};

/// Query count of the detector head.
pub const DEFAULT_QUERIES: usize = 128;

/// Class distribution of queries that see nothing.
pub const NO_OBJECT_PROBS: [f64; 4] = [0.97, 0.01, 0.01, 0.01];

/// Probability mass given to the predicted class by a clean detection.
const PEAK: f64 = 0.97;
const FLOOR: f64 = 0.01;

// Perturbation magnitudes that halve the coupled confidence's margin.
const POSITION_SCALE: f64 = 0.01;
const ROTATION_SCALE_DEG: f64 = 5.0;
const OPENING_SCALE_DEG: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StubError {
    #[error("{targets} targets exceed the {queries} available queries")]
    TooManyTargets { targets: usize, queries: usize },
    #[error("invalid stub config: {0}")]
    InvalidConfig(String),
    #[error("targets must all be in the normalized frame")]
    NotNormalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceModel {
    /// Detections carry the same confidence regardless of noise.
    Oracle,
    /// Confidence falls along a logistic curve of the injected noise.
    NoiseCoupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StubConfig {
    /// Normalized units.
    pub position_sigma: f64,
    pub rotation_sigma_deg: f64,
    pub opening_sigma_deg: f64,
    pub class_confusion_rate: f64,
    /// Probability of one false positive per scene.
    pub false_positive_rate: f64,
    pub miss_rate: f64,
    pub confidence_model: ConfidenceModel,
    pub queries: usize,
    pub seed: u64,
}

impl Default for StubConfig {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl StubConfig {
    pub fn noiseless() -> Self {
        Self {
            position_sigma: 0.0,
            rotation_sigma_deg: 0.0,
            opening_sigma_deg: 0.0,
            class_confusion_rate: 0.0,
            false_positive_rate: 0.0,
            miss_rate: 0.0,
            confidence_model: ConfidenceModel::Oracle,
            queries: DEFAULT_QUERIES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), StubError> {
        for (name, v) in
            [("position_sigma", self.position_sigma), ("rotation_sigma_deg", self.rotation_sigma_deg), ("opening_sigma_deg", self.opening_sigma_deg)]
        {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(StubError::InvalidConfig(format!("{name} must be a finite value ≥ 0, got {v}")));
            }
        }
        for (name, v) in [("class_confusion_rate", self.class_confusion_rate), ("false_positive_rate", self.false_positive_rate), ("miss_rate", self.miss_rate)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(StubError::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.queries == 0 {
            return Err(StubError::InvalidConfig("queries must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uniformly distributed rotation.
pub fn random_rotation(rng: &mut impl Rng) -> UnitQuaternion {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let tau = std::f64::consts::TAU;
    UnitQuaternion::new(a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos()).expect("unit by construction")
}

fn normal3(rng: &mut impl Rng) -> Vector3<f64> {
    Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn uniform_in(rng: &mut impl Rng, b: &Aabb) -> Vector3<f64> {
    let u = Vector3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
    if b.is_empty() {
        Vector3::zeros()
    } else {
        b.min + u.component_mul(&b.extent())
    }
}

/// Probabilities with `conf` on `class`, `FLOOR` on the other object classes
/// and the rest on no-object.
fn detection_probs(class: ObjectClass, conf: f64) -> [f64; 4] {
    let mut p = [FLOOR; 4];
    p[0] = 1.0 - conf - 2.0 * FLOOR;
    p[class.index()] = conf;
    p
}

fn coupled_confidence(score: f64) -> f64 {
    FLOOR + (PEAK - FLOOR) * 2.0 / (1.0 + score.exp())
}

/// Prediction whose every class hypothesis carries `target`'s pose; the
/// gripper hypothesis opening falls back to mid-range for other classes.
fn query_for(target: &ParamTarget, probs: [f64; 4]) -> Prediction {
    let q = target.pose.position;
    let hypotheses = OBJECT_CLASSES.map(|c| Hypothesis {
        offset: Vector3::zeros(),
        orientation: target.pose.orientation,
        opening: c.has_opening().then(|| target.opening.unwrap_or(0.0)),
    });
    Prediction { query_point: q, class_probs: probs, hypotheses, normalized: true }
}

/// Emits `cfg.queries` predictions for one scene. `targets` must be in the
/// normalized frame; `bounds` is the normalized cloud's bounding box and
/// `max_opening_deg` converts the opening noise into normalized units.
pub fn stub_predict(targets: &[ParamTarget], bounds: &Aabb, cfg: &StubConfig, scene_index: u64, max_opening_deg: f64) -> Result<Vec<Prediction>, StubError> {
    cfg.validate()?;
    if targets.len() > cfg.queries {
        return Err(StubError::TooManyTargets { targets: targets.len(), queries: cfg.queries });
    }
    if targets.iter().any(|t| !t.pose.normalized) {
        return Err(StubError::NotNormalized);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(scene_index);
    let opening_unit = 2.0 / max_opening_deg;
    let mut out = Vec::with_capacity(cfg.queries);

    for t in targets {
        // Every draw happens regardless of the rates so that runs with
        // different noise levels stay coupled draw for draw.
        let missed = rng.random::<f64>() < cfg.miss_rate;
        let dp = normal3(&mut rng) * cfg.position_sigma;
        let axis = normal3(&mut rng);
        let angle_deg = rng.sample::<f64, _>(StandardNormal) * cfg.rotation_sigma_deg;
        let d_open_deg = rng.sample::<f64, _>(StandardNormal) * cfg.opening_sigma_deg;
        let confused = rng.random::<f64>() < cfg.class_confusion_rate;
        let other = rng.random_range(0..2usize);
        if missed {
            continue;
        }

        let mut noisy = *t;
        noisy.pose.position += dp;
        if angle_deg != 0.0 {
            if let Ok(delta) = UnitQuaternion::from_axis_angle(&axis, angle_deg.to_radians()) {
                noisy.pose.orientation = delta.multiply(&t.pose.orientation);
            }
        }
        if let Some(a) = t.opening {
            noisy.opening = Some((a + d_open_deg * opening_unit).clamp(-1.0, 1.0));
        }
        let class = if confused {
            let others: Vec<ObjectClass> = OBJECT_CLASSES.into_iter().filter(|&c| c != t.class).collect();
            others[other]
        } else {
            t.class
        };
        let conf = match cfg.confidence_model {
            ConfidenceModel::Oracle => PEAK,
            ConfidenceModel::NoiseCoupled => {
                let score =
                    dp.norm() / POSITION_SCALE + angle_deg.abs() / ROTATION_SCALE_DEG + d_open_deg.abs() / OPENING_SCALE_DEG + if confused { 1.0 } else { 0.0 };
                coupled_confidence(score)
            }
        };
        out.push(query_for(&noisy, detection_probs(class, conf)));
    }

    let has_fp = rng.random::<f64>() < cfg.false_positive_rate;
    let fp_class = OBJECT_CLASSES[rng.random_range(0..3usize)];
    let fp_conf = rng.random_range(0.3..0.9);
    let fp_position = uniform_in(&mut rng, bounds);
    let fp_rotation = random_rotation(&mut rng);
    let fp_opening = rng.random_range(-1.0..=1.0);
    if has_fp && out.len() < cfg.queries {
        let mut pose = crate::geometry::Pose::new(fp_position, fp_rotation);
        pose.normalized = true;
        let fake = ParamTarget { class: fp_class, pose, opening: fp_class.has_opening().then_some(fp_opening) };
        // The rest of the mass spreads evenly so the fake class stays the argmax.
        let mut probs = [(1.0 - fp_conf) / 3.0; 4];
        probs[fp_class.index()] = fp_conf;
        out.push(query_for(&fake, probs));
    }

    while out.len() < cfg.queries {
        let q = uniform_in(&mut rng, bounds);
        let mut pose = crate::geometry::Pose::from_translation(q);
        pose.normalized = true;
        let filler = ParamTarget { class: ObjectClass::Gripper, pose, opening: Some(-1.0) };
        let mut p = query_for(&filler, NO_OBJECT_PROBS);
        p.hypotheses.iter_mut().for_each(|h| h.orientation = UnitQuaternion::IDENTITY);
        out.push(p);
    }
    Ok(out)
}
