use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::MatchError;
use crate::geometry::{Pose, UnitQuaternion};
use crate::mesh::{ObjectClass, ParamTarget, OBJECT_CLASSES};

/// Per-class parameter hypothesis of one query; the position is an offset
/// from the query point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub offset: Vector3<f64>,
    pub orientation: UnitQuaternion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening: Option<f64>,
}

/// Output of one detector query: class distribution plus one parameter set
/// per object class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub query_point: Vector3<f64>,
    /// Probabilities for `[no_object, gripper, loading_platform, pallet]`.
    pub class_probs: [f64; 4],
    /// Hypotheses in [`OBJECT_CLASSES`] order.
    pub hypotheses: [Hypothesis; 3],
    /// Whether positions and openings are in the normalized frame.
    #[serde(default)]
    pub normalized: bool,
}

pub const SIMPLEX_TOL: f64 = 1e-6;

impl Prediction {
    pub fn validate(&self) -> Result<(), MatchError> {
        let sum: f64 = self.class_probs.iter().sum();
        if self.class_probs.iter().any(|p| !(0.0..=1.0 + SIMPLEX_TOL).contains(p)) || (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(MatchError::InvalidPrediction(format!("class probabilities {:?} are not a distribution", self.class_probs)));
        }
        for (h, c) in self.hypotheses.iter().zip(OBJECT_CLASSES) {
            if h.opening.is_some() != c.has_opening() {
                return Err(MatchError::InvalidPrediction(format!("{c} hypothesis has wrong opening arity")));
            }
            if !h.offset.iter().chain(h.opening.iter()).all(|v| v.is_finite()) {
                return Err(MatchError::InvalidPrediction(format!("{c} hypothesis is not finite")));
            }
        }
        if !self.query_point.iter().all(|v| v.is_finite()) {
            return Err(MatchError::InvalidPrediction("query point is not finite".into()));
        }
        Ok(())
    }

    /// Builds a prediction whose `class` hypothesis equals `target` exactly
    /// and whose other hypotheses are placeholders at the query point.
    pub fn from_target(query_point: Vector3<f64>, target: &ParamTarget, class_probs: [f64; 4]) -> Self {
        let placeholder = |c: ObjectClass| Hypothesis {
            offset: Vector3::zeros(),
            orientation: UnitQuaternion::IDENTITY,
            opening: c.has_opening().then_some(if target.pose.normalized { -1.0 } else { 0.0 }),
        };
        let mut hypotheses = OBJECT_CLASSES.map(placeholder);
        hypotheses[target.class.index() - 1] =
            Hypothesis { offset: target.pose.position - query_point, orientation: target.pose.orientation, opening: target.opening };
        Self { query_point, class_probs, hypotheses, normalized: target.pose.normalized }
    }

    /// Absolute parameter set for `class`: position = offset + query point.
    pub fn target_for(&self, class: ObjectClass) -> Result<ParamTarget, MatchError> {
        if class == ObjectClass::NoObject {
            return Err(MatchError::InvalidPrediction("no-object has no parameters".into()));
        }
        let h = &self.hypotheses[class.index() - 1];
        let mut pose = Pose::new(h.offset + self.query_point, h.orientation);
        pose.normalized = self.normalized;
        Ok(ParamTarget { class, pose, opening: h.opening })
    }

    pub fn prob(&self, class: ObjectClass) -> f64 {
        self.class_probs[class.index()]
    }

    /// Most likely class, lowest index on ties.
    pub fn argmax_class(&self) -> ObjectClass {
        let mut best = 0;
        for i in 1..4 {
            if self.class_probs[i] > self.class_probs[best] {
                best = i;
            }
        }
        ObjectClass::from_index(best).expect("index < 4")
    }

    /// Applies `f` to every hypothesis as an absolute target and re-expresses
    /// the result relative to the (also mapped) query point.
    pub fn map_targets(&self, query: Vector3<f64>, normalized: bool, mut f: impl FnMut(&ParamTarget) -> ParamTarget) -> Result<Self, MatchError> {
        let mut out = self.clone();
        out.query_point = query;
        out.normalized = normalized;
        for (i, c) in OBJECT_CLASSES.into_iter().enumerate() {
            let t = f(&self.target_for(c)?);
            out.hypotheses[i] = Hypothesis { offset: t.pose.position - query, orientation: t.pose.orientation, opening: t.opening };
        }
        Ok(out)
    }
}
