use nalgebra::Vector3;

use super::MatchError;
use crate::sampling::dist2;

fn mean_nearest(from: &[Vector3<f64>], to: &[Vector3<f64>]) -> f64 {
    from.iter().map(|a| to.iter().map(|b| dist2(a, b)).fold(f64::INFINITY, f64::min).sqrt()).sum::<f64>() / from.len() as f64
}

/// Symmetric Chamfer distance: mean nearest-neighbor Euclidean distance from
/// `x` to `y` plus the same from `y` to `x`.
pub fn chamfer(x: &[Vector3<f64>], y: &[Vector3<f64>]) -> Result<f64, MatchError> {
    if x.is_empty() || y.is_empty() {
        return Err(MatchError::EmptySet);
    }
    Ok(mean_nearest(x, y) + mean_nearest(y, x))
}
