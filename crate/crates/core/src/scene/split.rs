use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SceneError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, val: 0.1, test: 0.1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle of `0..n` cut into disjoint parts.
///
/// Ratios summing to more than 1 (up to 1.1) are rescaled to sum to 1, so
/// every scene lands in exactly one split. Ratios summing to less than 1
/// leave the remainder unassigned.
pub fn dataset_split(n: usize, ratios: &SplitRatios, seed: u64) -> Result<Splits, SceneError> {
    let r = [ratios.train, ratios.val, ratios.test];
    let sum: f64 = r.iter().sum();
    if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || sum > 1.1 + 1e-12 || sum <= 0.0 {
        return Err(SceneError::BadRatios(format!("{r:?}")));
    }
    let scale = if sum > 1.0 { 1.0 / sum } else { 1.0 };
    let assigned = if sum >= 1.0 { n } else { (n as f64 * sum).floor() as usize };
    // Largest-remainder apportionment of `assigned` scenes.
    let exact: Vec<f64> = r.iter().map(|v| n as f64 * v * scale).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let mut k = 0;
    while counts.iter().sum::<usize>() < assigned {
        counts[order[k % 3]] += 1;
        k += 1;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, rest) = idx.split_at(counts[0]);
    let (val, rest) = rest.split_at(counts[1]);
    let test = &rest[..counts[2]];
    let sorted = |s: &[usize]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        v
    };
    Ok(Splits { train: sorted(train), val: sorted(val), test: sorted(test) })
}
