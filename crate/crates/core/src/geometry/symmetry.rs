use serde::{Deserialize, Serialize};

use super::UnitQuaternion;

/// Orientation symmetries under which an object looks the same.
///
/// `SignOnly` covers only the quaternion double cover `{±1}`.
/// `SignAndZFlip` adds the body-frame half turn about z: `{±1, ±r^z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetrySet {
    SignOnly,
    SignAndZFlip,
}

impl SymmetrySet {
    /// Every quaternion reachable from `q` under this symmetry set.
    ///
    /// Order is fixed: `q, -q` followed by `r^z(q), -r^z(q)` when present.
    pub fn expand(self, q: &UnitQuaternion) -> Vec<UnitQuaternion> {
        match self {
            SymmetrySet::SignOnly => vec![*q, -*q],
            SymmetrySet::SignAndZFlip => {
                let f = q.z_flipped();
                vec![*q, -*q, f, -f]
            }
        }
    }

    pub fn len(self) -> usize {
        match self {
            SymmetrySet::SignOnly => 2,
            SymmetrySet::SignAndZFlip => 4,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn has_z_flip(self) -> bool {
        matches!(self, SymmetrySet::SignAndZFlip)
    }
}

/// Quaternion symmetry loss: the smallest component-wise ℓ1 distance between
/// any symmetric image of `predicted` and `target`.
pub fn quat_symmetry_loss(predicted: &UnitQuaternion, target: &UnitQuaternion, set: SymmetrySet) -> f64 {
    set.expand(predicted).iter().map(|q| q.l1_distance(target)).fold(f64::INFINITY, f64::min)
}
