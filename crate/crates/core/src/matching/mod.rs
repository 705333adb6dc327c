//! Forward computations of the set-prediction objective: Chamfer distance,
//! parameter loss, matching costs, optimal assignment and total loss.

mod chamfer;
mod cost;
mod hungarian;
mod loss;
mod prediction;

use thiserror::Error;

pub use chamfer::chamfer;
pub use cost::{has_flip_symmetry, hungarian_assign, match_cost_matrix, match_predictions, param_loss, CostMatrix, MatchResult, MatchedPair};
pub use hungarian::{assignment_cost, solve_assignment, Matrix};
pub use loss::{class_counts, class_weights, phi_clamped, scene_loss, total_loss, ClassWeights, LossBreakdown, SceneLoss, PROB_FLOOR};
pub use prediction::{Hypothesis, Prediction, SIMPLEX_TOL};

use crate::mesh::{MeshError, ObjectClass};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("point set is empty")]
    EmptySet,
    #[error("prediction of class {predicted} compared against a {target} target")]
    ClassMismatch { predicted: ObjectClass, target: ObjectClass },
    #[error("prediction and target are in different frames")]
    NormalizationMismatch,
    #[error("{queries} queries cannot cover {targets} targets")]
    TooFewQueries { queries: usize, targets: usize },
    #[error("cost matrix contains a non-finite entry")]
    NonFiniteCost,
    #[error("invalid prediction: {0}")]
    InvalidPrediction(String),
    #[error("dataset has no class counts")]
    EmptyDataset,
    #[error("class {0} never occurs in the dataset")]
    ZeroClassCount(ObjectClass),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
