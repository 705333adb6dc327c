use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::cost::{match_predictions, param_loss, MatchResult};
use super::{chamfer, MatchError, Prediction};
use crate::mesh::{ClassMesh, MeshLibrary, ObjectClass, ParamTarget};

/// Probability floor inside the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub cross_entropy: f64,
    pub param_loss: f64,
    pub chamfer_loss: f64,
    pub total: f64,
}

/// Weights for `[no_object, gripper, loading_platform, pallet]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights(pub [f64; 4]);

impl Default for ClassWeights {
    fn default() -> Self {
        Self([1.0; 4])
    }
}

impl ClassWeights {
    pub fn get(&self, c: ObjectClass) -> f64 {
        self.0[c.index()]
    }
}

/// Inverse-frequency weights normalized to mean 1.
pub fn class_weights(counts: [u64; 4]) -> Result<ClassWeights, MatchError> {
    if counts.iter().all(|&c| c == 0) {
        return Err(MatchError::EmptyDataset);
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(MatchError::ZeroClassCount(ObjectClass::from_index(i).expect("index < 4")));
    }
    let inv = counts.map(|c| 1.0 / c as f64);
    let mean = inv.iter().sum::<f64>() / 4.0;
    Ok(ClassWeights(inv.map(|w| w / mean)))
}

/// Class counts over a dataset of `scenes` scenes with `queries` queries
/// each; unmatched queries count as no-object.
pub fn class_counts<'a>(targets: impl IntoIterator<Item = &'a ParamTarget>, scenes: u64, queries: u64) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for t in targets {
        counts[t.class.index()] += 1;
    }
    let objects: u64 = counts.iter().sum();
    counts[0] = (scenes * queries).saturating_sub(objects);
    counts
}

/// Posed samples with the opening clamped into the mesh's valid range, so
/// slightly out-of-range predictions can still be compared geometrically.
pub fn phi_clamped(mesh: &ClassMesh, t: &ParamTarget) -> Result<Vec<Vector3<f64>>, MatchError> {
    let mut t = *t;
    if let Some(a) = t.opening {
        t.opening = Some(if t.pose.normalized { a.clamp(-1.0, 1.0) } else { a.clamp(0.0, mesh.max_opening_deg()) });
    }
    Ok(mesh.phi(&t)?)
}

/// Loss of one query against its matched target, or against no-object when
/// `target` is `None`. Meshes must share the targets' frame.
pub fn total_loss(pred: &Prediction, target: Option<&ParamTarget>, weights: &ClassWeights, lib: &MeshLibrary) -> Result<LossBreakdown, MatchError> {
    let class = target.map_or(ObjectClass::NoObject, |t| t.class);
    let cross_entropy = -weights.get(class) * pred.prob(class).max(PROB_FLOOR).ln();
    let (param, cd) = match target {
        None => (0.0, 0.0),
        Some(t) => {
            let hyp = pred.target_for(t.class)?;
            let mesh = lib.get(t.class)?;
            (param_loss(&hyp, t)?, chamfer(&phi_clamped(mesh, &hyp)?, &phi_clamped(mesh, t)?)?)
        }
    };
    Ok(LossBreakdown { cross_entropy, param_loss: param, chamfer_loss: cd, total: cross_entropy + param + cd })
}

/// Losses of a whole scene after matching.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneLoss {
    pub matching: MatchResult,
    /// Per query, in query order.
    pub per_query: Vec<LossBreakdown>,
    /// Cross-entropy averaged over all queries; parameter and Chamfer terms
    /// averaged over matched objects.
    pub normalized: LossBreakdown,
}

pub fn scene_loss(preds: &[Prediction], targets: &[ParamTarget], weights: &ClassWeights, lib: &MeshLibrary) -> Result<SceneLoss, MatchError> {
    let matching = match_predictions(preds, targets)?;
    let per_query: Vec<LossBreakdown> =
        preds.iter().enumerate().map(|(j, p)| total_loss(p, matching.target_of(j).map(|i| &targets[i]), weights, lib)).collect::<Result<_, _>>()?;
    let k = preds.len().max(1) as f64;
    let m = targets.len().max(1) as f64;
    let ce = per_query.iter().map(|l| l.cross_entropy).sum::<f64>() / k;
    let param = per_query.iter().map(|l| l.param_loss).sum::<f64>() / m;
    let cd = per_query.iter().map(|l| l.chamfer_loss).sum::<f64>() / m;
    Ok(SceneLoss { matching, per_query, normalized: LossBreakdown { cross_entropy: ce, param_loss: param, chamfer_loss: cd, total: ce + param + cd } })
}
