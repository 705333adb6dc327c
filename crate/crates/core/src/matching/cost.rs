use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hungarian::{solve_assignment, Matrix};
use super::{MatchError, Prediction};
use crate::geometry::quat_symmetry_loss;
use crate::mesh::{ObjectClass, ParamTarget};

/// ℓ1 position error plus the class's symmetry-aware orientation loss, plus
/// ℓ1 opening error for grippers.
pub fn param_loss(pred: &ParamTarget, target: &ParamTarget) -> Result<f64, MatchError> {
    if pred.class != target.class {
        return Err(MatchError::ClassMismatch { predicted: pred.class, target: target.class });
    }
    if pred.pose.normalized != target.pose.normalized {
        return Err(MatchError::NormalizationMismatch);
    }
    let pos = (pred.pose.position - target.pose.position).abs().sum();
    let quat = quat_symmetry_loss(&pred.pose.orientation, &target.pose.orientation, target.class.symmetry());
    let opening = match (pred.opening, target.opening, target.class.has_opening()) {
        (Some(a), Some(b), true) => (a - b).abs(),
        (None, None, false) => 0.0,
        _ => return Err(MatchError::InvalidPrediction(format!("opening arity does not match class {}", target.class))),
    };
    Ok(pos + quat + opening)
}

/// Matching costs with their two parts; rows are predictions, columns targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    pub total: Matrix,
    pub class_term: Matrix,
    pub param_term: Matrix,
}

/// `C(j, i) = -π̂_j(c_i) + param_loss(T̂_j^{c_i}, T_i)` for every query `j`
/// and target `i`, using query `j`'s hypothesis for the target's class.
pub fn match_cost_matrix(preds: &[Prediction], targets: &[ParamTarget]) -> Result<CostMatrix, MatchError> {
    let (k, m) = (preds.len(), targets.len());
    if k < m {
        return Err(MatchError::TooFewQueries { queries: k, targets: m });
    }
    let rows: Vec<Vec<(f64, f64)>> = preds
        .par_iter()
        .map(|p| targets.iter().map(|t| Ok((-p.prob(t.class), param_loss(&p.target_for(t.class)?, t)?))).collect::<Result<Vec<_>, MatchError>>())
        .collect::<Result<_, _>>()?;
    let class_term = Matrix::from_fn(k, m, |j, i| rows[j][i].0);
    let param_term = Matrix::from_fn(k, m, |j, i| rows[j][i].1);
    let total = Matrix::from_fn(k, m, |j, i| rows[j][i].0 + rows[j][i].1);
    Ok(CostMatrix { total, class_term, param_term })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub target: usize,
    pub prediction: usize,
    pub class_cost: f64,
    pub param_cost: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// `assignment[i]` is the prediction matched to target `i`.
    pub assignment: Vec<usize>,
    pub pairs: Vec<MatchedPair>,
    /// Predictions matched to no target (the no-object class).
    pub unmatched: Vec<usize>,
    pub total_cost: f64,
}

impl MatchResult {
    /// Target matched to prediction `j`, if any.
    pub fn target_of(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.prediction == j).map(|p| p.target)
    }
}

/// Globally optimal injective assignment of targets (columns) to
/// predictions (rows).
pub fn hungarian_assign(cost: &CostMatrix) -> Result<MatchResult, MatchError> {
    let c = &cost.total;
    // Solve with targets as rows.
    let transposed = Matrix::from_fn(c.cols, c.rows, |i, j| c.get(j, i));
    let assignment = solve_assignment(&transposed)?;
    let pairs: Vec<MatchedPair> = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| MatchedPair {
            target: i,
            prediction: j,
            class_cost: cost.class_term.get(j, i),
            param_cost: cost.param_term.get(j, i),
            cost: c.get(j, i),
        })
        .collect();
    let mut taken = vec![false; c.rows];
    for &j in &assignment {
        taken[j] = true;
    }
    let total_cost = pairs.iter().map(|p| p.cost).sum();
    Ok(MatchResult { unmatched: (0..c.rows).filter(|&j| !taken[j]).collect(), assignment, pairs, total_cost })
}

pub fn match_predictions(preds: &[Prediction], targets: &[ParamTarget]) -> Result<MatchResult, MatchError> {
    hungarian_assign(&match_cost_matrix(preds, targets)?)
}

/// Whether `class` carries an orientation symmetry under a half turn about z.
pub fn has_flip_symmetry(class: ObjectClass) -> bool {
    class.symmetry().has_z_flip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose, UnitQuaternion};
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_quat(rng: &mut impl Rng) -> UnitQuaternion {
        UnitQuaternion::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).unwrap()
    }

    fn rand_target(rng: &mut impl Rng, class: ObjectClass) -> ParamTarget {
        let mut pose = Pose::new(Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), rand_quat(rng));
        pose.normalized = true;
        ParamTarget { class, pose, opening: class.has_opening().then(|| rng.random_range(-1.0..1.0)) }
    }

    #[test]
    fn param_loss_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = rand_target(&mut rng, ObjectClass::Gripper);
        assert_eq!(param_loss(&g, &g).unwrap(), 0.0);
        let mut moved = g;
        moved.pose.position.x += 0.1;
        assert!((param_loss(&moved, &g).unwrap() - 0.1).abs() < 1e-15);

        let p = rand_target(&mut rng, ObjectClass::Pallet);
        let mut flipped = p;
        flipped.pose.orientation = p.pose.orientation.z_flipped();
        flipped.pose.position.y -= 0.25;
        assert!((param_loss(&flipped, &p).unwrap() - 0.25).abs() < 1e-15);

        let l = rand_target(&mut rng, ObjectClass::LoadingPlatform);
        let mut lf = l;
        lf.pose.orientation = l.pose.orientation.z_flipped();
        assert!(param_loss(&lf, &l).unwrap() > 0.1);
        assert!(matches!(param_loss(&l, &p), Err(MatchError::ClassMismatch { .. })));
    }

    #[test]
    fn flip_invariance_of_symmetric_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            for class in [ObjectClass::Gripper, ObjectClass::Pallet] {
                let t = rand_target(&mut rng, class);
                let pr = rand_target(&mut rng, class);
                let mut tf = t;
                tf.pose.orientation = t.pose.orientation.z_flipped();
                assert!((param_loss(&pr, &t).unwrap() - param_loss(&pr, &tf).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn positional_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = rand_target(&mut rng, ObjectClass::Pallet);
        let mut prev = param_loss(&t, &t).unwrap();
        for k in 1..50 {
            let mut p = t;
            p.pose.position.z += 0.01 * k as f64;
            let l = param_loss(&p, &t).unwrap();
            assert!(l > prev);
            prev = l;
        }
    }

    #[test]
    fn cost_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = rand_target(&mut rng, ObjectClass::Pallet);
        let q = Vector3::new(0.1, 0.0, 0.0);
        let exact = Prediction::from_target(q, &t, [0.0, 0.0, 0.0, 1.0]);
        let uniform = Prediction::from_target(q, &t, [0.25; 4]);
        let c = match_cost_matrix(&[exact, uniform], &[t]).unwrap();
        assert!((c.total.get(0, 0) + 1.0).abs() < 1e-15);
        assert!((c.total.get(1, 0) + 0.25).abs() < 1e-15);
        assert!(matches!(match_cost_matrix(&[], &[t]), Err(MatchError::TooFewQueries { .. })));
    }

    #[test]
    fn cost_matrix_matches_scalar_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let classes = [ObjectClass::Gripper, ObjectClass::LoadingPlatform, ObjectClass::Pallet];
        let targets: Vec<ParamTarget> = (0..3).map(|i| rand_target(&mut rng, classes[i])).collect();
        let preds: Vec<Prediction> = (0..5)
            .map(|_| {
                let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
                let s: f64 = raw.iter().sum();
                let mut p = Prediction::from_target(
                    Vector3::new(0.1, 0.2, 0.3),
                    &rand_target(&mut rng, ObjectClass::Gripper),
                    [raw[0] / s, raw[1] / s, raw[2] / s, raw[3] / s],
                );
                for (h, c) in p.hypotheses.iter_mut().zip(classes) {
                    let r = rand_target(&mut rng, c);
                    h.offset = r.pose.position - p.query_point;
                    h.orientation = r.pose.orientation;
                    h.opening = r.opening;
                }
                p
            })
            .collect();
        let c = match_cost_matrix(&preds, &targets).unwrap();
        for (j, p) in preds.iter().enumerate() {
            for (i, t) in targets.iter().enumerate() {
                // Independent formulation: explicit expansion set and component sums.
                let h = &p.hypotheses[t.class.index() - 1];
                let pos = h.offset + p.query_point;
                let mut l1 = 0.0;
                for a in 0..3 {
                    l1 += (pos[a] - t.pose.position[a]).abs();
                }
                let tq = t.pose.orientation;
                let mut set = vec![tq.to_array(), (-tq).to_array()];
                if t.class != ObjectClass::LoadingPlatform {
                    let f = tq.z_flipped();
                    set.extend([f.to_array(), (-f).to_array()]);
                }
                let hq = h.orientation.to_array();
                let quat = set.iter().map(|s| (0..4).map(|a| (hq[a] - s[a]).abs()).sum::<f64>()).fold(f64::INFINITY, f64::min);
                let open = match (h.opening, t.opening) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    _ => 0.0,
                };
                let want = -p.class_probs[t.class.index()] + l1 + quat + open;
                assert!((c.total.get(j, i) - want).abs() < 1e-12);
            }
        }
        let r = hungarian_assign(&c).unwrap();
        assert_eq!(r.unmatched.len(), 2);
        assert_eq!(r.pairs.len(), 3);
        assert!((r.total_cost - r.pairs.iter().map(|p| p.class_cost + p.param_cost).sum::<f64>()).abs() < 1e-12);
    }
}
