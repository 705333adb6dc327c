//! Bounding volume hierarchy over scene primitives.

use nalgebra::Vector3;

use crate::geometry::Aabb;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Leaf: `start..start+count` in `order`. Inner: `start` is the right child,
    /// the left child follows the node directly.
    start: u32,
    count: u32,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

/// Slab test; returns the entry distance when the ray meets `b` within
/// `[0, t_max]`.
fn hit_box(b: &Aabb, origin: &Vector3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    for a in 0..3 {
        let mut near = (b.min[a] - origin[a]) * inv_dir[a];
        let mut far = (b.max[a] - origin[a]) * inv_dir[a];
        // 0 * inf yields NaN when the ray lies in a slab plane; treat as inside.
        if near.is_nan() || far.is_nan() {
            if origin[a] < b.min[a] || origin[a] > b.max[a] {
                return None;
            }
            continue;
        }
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}

impl Bvh {
    /// `bounds[i]` is the box of primitive `i`.
    pub fn build(bounds: &[Aabb]) -> Self {
        let mut bvh = Bvh { nodes: Vec::new(), order: (0..bounds.len() as u32).collect() };
        if !bounds.is_empty() {
            let centers: Vec<Vector3<f64>> = bounds.iter().map(|b| b.center()).collect();
            bvh.split(bounds, &centers, 0, bounds.len());
        }
        bvh
    }

    fn split(&mut self, bounds: &[Aabb], centers: &[Vector3<f64>], lo: usize, hi: usize) -> usize {
        let mut bb = Aabb::empty();
        let mut cb = Aabb::empty();
        for &i in &self.order[lo..hi] {
            bb = bb.union(&bounds[i as usize]);
            cb.grow(&centers[i as usize]);
        }
        // Pad so that hits computed on a face are never rejected by rounding.
        let pad = 1e-9 * (1.0 + bb.extent().amax());
        bb.min.add_scalar_mut(-pad);
        bb.max.add_scalar_mut(pad);
        let id = self.nodes.len();
        self.nodes.push(Node { bounds: bb, start: lo as u32, count: (hi - lo) as u32 });
        let ext = cb.extent();
        if hi - lo <= LEAF_SIZE || ext.amax() <= 0.0 {
            return id;
        }
        let axis = ext.imax();
        let mid = (lo + hi) / 2;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| centers[a as usize][axis].total_cmp(&centers[b as usize][axis]).then(a.cmp(&b)));
        self.split(bounds, centers, lo, mid);
        let right = self.split(bounds, centers, mid, hi);
        self.nodes[id].start = right as u32;
        self.nodes[id].count = 0;
        id
    }

    /// Nearest hit over primitives; `intersect(i)` returns the ray parameter
    /// of primitive `i`, if hit within range. Ties go to the lower index.
    pub fn nearest(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, t_max: f64, mut intersect: impl FnMut(usize) -> Option<f64>) -> Option<(f64, usize)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = dir.map(|d| 1.0 / d);
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let limit = best.map_or(t_max, |b| b.0);
            if hit_box(&node.bounds, origin, &inv, limit).is_none() {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for &p in &self.order[s..s + node.count as usize] {
                    let p = p as usize;
                    if let Some(t) = intersect(p) {
                        let better = match best {
                            None => true,
                            Some((bt, bi)) => t < bt || (t == bt && p < bi),
                        };
                        if better {
                            best = Some((t, p));
                        }
                    }
                }
            } else {
                let (l, r) = (n + 1, node.start as usize);
                let dl = hit_box(&self.nodes[l].bounds, origin, &inv, limit);
                let dr = hit_box(&self.nodes[r].bounds, origin, &inv, limit);
                // Push the farther child first so the nearer one is visited first.
                match (dl, dr) {
                    (Some(a), Some(b)) if a <= b => stack.extend([r, l]),
                    (Some(_), Some(_)) => stack.extend([l, r]),
                    (Some(_), None) => stack.push(l),
                    (None, Some(_)) => stack.push(r),
                    (None, None) => {}
                }
            }
        }
        best
    }
}
