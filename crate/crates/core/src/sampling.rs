//! Exact farthest point sampling.
//!
//! Points are grouped into spatial buckets (kd-tree leaves). A bucket whose
//! bounding box is farther from the newly selected point than its current
//! largest min-distance cannot change and is skipped, so late iterations only
//! touch the neighbourhood of the new point. The selection sequence is
//! identical to the quadratic textbook algorithm, including tie-breaking
//! (lowest index wins among equal distances).

use nalgebra::Vector3;

use crate::geometry::Aabb;

const LEAF_SIZE: usize = 64;

#[inline]
pub(crate) fn dist2(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    dx * dx + dy * dy + dz * dz
}

struct Bucket {
    members: Vec<usize>,
    bounds: Aabb,
    best: f64,
    best_index: usize,
}

impl Bucket {
    fn refresh(&mut self, min_d: &[f64]) {
        self.best = f64::NEG_INFINITY;
        self.best_index = usize::MAX;
        for &i in &self.members {
            let d = min_d[i];
            if d == f64::NEG_INFINITY {
                continue;
            }
            if d > self.best || (d == self.best && i < self.best_index) {
                self.best = d;
                self.best_index = i;
            }
        }
    }
}

fn build_buckets(points: &[Vector3<f64>]) -> Vec<Bucket> {
    let mut out = Vec::with_capacity(points.len() / LEAF_SIZE + 1);
    let mut stack = vec![(0..points.len()).collect::<Vec<_>>()];
    while let Some(mut idx) = stack.pop() {
        let bounds = Aabb::from_points(idx.iter().map(|&i| &points[i]));
        if idx.len() <= LEAF_SIZE {
            out.push(Bucket { members: idx, bounds, best: f64::INFINITY, best_index: usize::MAX });
            continue;
        }
        let ext = bounds.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b)));
        let right = idx.split_off(mid);
        stack.push(right);
        stack.push(idx);
    }
    out
}

/// Selects up to `k` indices by farthest point sampling, starting at `start`.
///
/// The first returned index is `start`; each following index is the
/// unselected point with the largest squared distance to the selected set.
/// Returns all `n` indices (in FPS order) when `k >= n`.
///
/// # Panics
/// If `start` is out of bounds for a non-empty `points`.
pub fn farthest_point_indices(points: &[Vector3<f64>], k: usize, start: usize) -> Vec<usize> {
    let n = points.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    assert!(start < n, "start index {start} out of bounds for {n} points");

    let mut min_d = vec![f64::INFINITY; n];
    let mut buckets = build_buckets(points);
    let mut selected = Vec::with_capacity(k);
    let mut current = start;

    loop {
        selected.push(current);
        min_d[current] = f64::NEG_INFINITY;
        if selected.len() == k {
            break;
        }
        let s = points[current];
        for b in buckets.iter_mut() {
            if b.best == f64::NEG_INFINITY {
                continue;
            }
            let lower = b.bounds.distance_squared(&s);
            // Margin keeps the skip conservative under rounding of `lower`.
            if b.best != f64::INFINITY && lower > b.best + b.best.abs() * 1e-9 {
                continue;
            }
            for &i in &b.members {
                let d = dist2(&points[i], &s);
                if d < min_d[i] {
                    min_d[i] = d;
                }
            }
            b.refresh(&min_d);
        }
        let mut next = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for b in &buckets {
            if b.best_index == usize::MAX {
                continue;
            }
            if b.best > best || (b.best == best && b.best_index < next) {
                best = b.best;
                next = b.best_index;
            }
        }
        if next == usize::MAX {
            break;
        }
        current = next;
    }
    selected
}

/// Smallest pairwise distance within a point set (`INFINITY` below two points).
pub fn min_pairwise_distance(points: &[Vector3<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(dist2(&points[i], &points[j]));
        }
    }
    best.sqrt()
}

/// Independent 64-bit seed for sub-stream `stream` of `seed` (SplitMix64
/// finalizer), used where a plain integer seed is expected.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Quadratic reference: recompute every candidate's distance to the
    // selected set at each step.
    fn reference_fps(points: &[Vector3<f64>], k: usize, start: usize) -> Vec<usize> {
        let mut sel = vec![start];
        while sel.len() < k.min(points.len()) {
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for i in 0..points.len() {
                if sel.contains(&i) {
                    continue;
                }
                let d = sel.iter().map(|&j| dist2(&points[i], &points[j])).fold(f64::INFINITY, f64::min);
                if d > best {
                    best = d;
                    arg = i;
                }
            }
            sel.push(arg);
        }
        sel
    }

    #[test]
    fn square_corners_before_center() {
        let pts = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.5, 0.5, 0.0),
        ];
        for start in 0..4 {
            let mut got = farthest_point_indices(&pts, 4, start);
            got.sort();
            assert_eq!(got, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn matches_reference_with_duplicates_and_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..40 {
            let n = rng.random_range(1..400);
            let mut pts: Vec<_> = (0..n)
                .map(|_| {
                    if trial % 2 == 0 {
                        Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0))
                    } else {
                        // Integer lattice produces many exact ties.
                        Vector3::new(rng.random_range(0..6) as f64, rng.random_range(0..6) as f64, 0.0)
                    }
                })
                .collect();
            if n > 3 {
                pts[n - 1] = pts[0];
            }
            let k = rng.random_range(1..=n);
            let start = rng.random_range(0..n);
            assert_eq!(farthest_point_indices(&pts, k, start), reference_fps(&pts, k, start));
        }
    }

    #[test]
    fn k_larger_than_n_returns_permutation() {
        let pts: Vec<_> = (0..10).map(|i| Vector3::new(i as f64, 0.0, 0.0)).collect();
        let mut got = farthest_point_indices(&pts, 100, 3);
        assert_eq!(got.len(), 10);
        got.sort();
        assert_eq!(got, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn empty_input() {
        assert!(farthest_point_indices(&[], 5, 0).is_empty());
    }
}
