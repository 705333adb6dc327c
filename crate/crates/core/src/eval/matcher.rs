use serde::{Deserialize, Serialize};

use super::{EvalConfig, EvalError};
use crate::matching::{chamfer, phi_clamped, Prediction};
use crate::mesh::{MeshLibrary, ObjectClass, ParamTarget, OBJECT_CLASSES};

/// One query promoted to a detection of `class` with score `confidence`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub query: usize,
    pub class: ObjectClass,
    pub confidence: f64,
    /// Matched target index for true positives.
    pub target: Option<usize>,
    /// Chamfer distance to the matched target.
    pub chamfer: Option<f64>,
}

impl Detection {
    pub fn is_true_positive(&self) -> bool {
        self.target.is_some()
    }
}

/// Detection labeling of one scene.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneMatch {
    /// In descending confidence order.
    pub detections: Vec<Detection>,
    /// Targets left unmatched.
    pub false_negatives: Vec<usize>,
}

impl SceneMatch {
    pub fn true_positives(&self) -> impl Iterator<Item = &Detection> {
        self.detections.iter().filter(|d| d.is_true_positive())
    }
}

/// Turns queries into scored detections. With no-object suppression a query
/// is a detection only when an object class is its argmax; otherwise every
/// query reports its best object class.
pub fn extract_detections(preds: &[Prediction], cfg: &EvalConfig) -> Vec<Detection> {
    let mut dets: Vec<Detection> = preds
        .iter()
        .enumerate()
        .filter_map(|(query, p)| {
            let class = if cfg.suppress_no_object {
                p.argmax_class()
            } else {
                // First maximum wins, as in the argmax.
                OBJECT_CLASSES.into_iter().fold(ObjectClass::Gripper, |best, c| if p.prob(c) > p.prob(best) { c } else { best })
            };
            (class != ObjectClass::NoObject).then(|| Detection { query, class, confidence: p.prob(class), target: None, chamfer: None })
        })
        .collect();
    dets.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then(a.query.cmp(&b.query)));
    dets
}

/// Strict acceptance test of the match criterion.
pub fn accepts(cd: f64, threshold: f64) -> bool {
    cd < threshold
}

/// Greedy confidence-descending matching: each detection takes the
/// unmatched same-class target with the smallest Chamfer distance, provided
/// that distance is strictly below the threshold. `lib` must live in the
/// targets' (normalized) frame.
pub fn match_for_eval(preds: &[Prediction], targets: &[ParamTarget], lib: &MeshLibrary, cfg: &EvalConfig) -> Result<SceneMatch, EvalError> {
    cfg.validate()?;
    if targets.iter().any(|t| !t.pose.normalized) || preds.iter().any(|p| !p.normalized) {
        return Err(EvalError::NotNormalized);
    }
    let target_points = targets.iter().map(|t| Ok(lib.get(t.class)?.phi(t)?)).collect::<Result<Vec<_>, EvalError>>()?;
    let mut taken = vec![false; targets.len()];
    let mut detections = extract_detections(preds, cfg);
    for d in &mut detections {
        let candidates: Vec<usize> = (0..targets.len()).filter(|&i| !taken[i] && targets[i].class == d.class).collect();
        if candidates.is_empty() {
            continue;
        }
        let hyp = preds[d.query].target_for(d.class)?;
        let points = phi_clamped(lib.get(d.class)?, &hyp)?;
        let mut best: Option<(f64, usize)> = None;
        for i in candidates {
            let cd = chamfer(&points, &target_points[i])?;
            if accepts(cd, cfg.cd_threshold) && best.is_none_or(|(b, _)| cd < b) {
                best = Some((cd, i));
            }
        }
        if let Some((cd, i)) = best {
            taken[i] = true;
            d.target = Some(i);
            d.chamfer = Some(cd);
        }
    }
    let false_negatives = (0..targets.len()).filter(|&i| !taken[i]).collect();
    Ok(SceneMatch { detections, false_negatives })
}

/// Checks that a labeling is one-to-one and class-consistent.
pub fn check_matching(m: &SceneMatch, targets: &[ParamTarget], cfg: &EvalConfig) -> Result<(), EvalError> {
    let mut seen = vec![false; targets.len()];
    for d in m.true_positives() {
        let i = d.target.expect("true positive");
        if i >= targets.len() || seen[i] {
            return Err(EvalError::Invariant(format!("target {i} matched more than once or out of range")));
        }
        seen[i] = true;
        if targets[i].class != d.class {
            return Err(EvalError::Invariant(format!("query {} of class {} matched a {} target", d.query, d.class, targets[i].class)));
        }
        if !d.chamfer.is_some_and(|cd| accepts(cd, cfg.cd_threshold)) {
            return Err(EvalError::Invariant(format!("query {} matched without meeting the distance criterion", d.query)));
        }
    }
    let unmatched: Vec<usize> = (0..targets.len()).filter(|&i| !seen[i]).collect();
    if unmatched != m.false_negatives {
        return Err(EvalError::Invariant("false negatives disagree with the matched set".into()));
    }
    Ok(())
}
