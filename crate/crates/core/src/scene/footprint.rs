use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

/// Convex polygon on the ground plane, counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub corners: Vec<Vector2<f64>>,
}

fn cross(o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn point_segment_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

fn segments_intersect(a: &Vector2<f64>, b: &Vector2<f64>, c: &Vector2<f64>, d: &Vector2<f64>) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

impl Footprint {
    /// Rectangle with half sizes `half` rotated by `yaw` about `center`.
    pub fn rect(center: Vector2<f64>, half: Vector2<f64>, yaw: f64) -> Self {
        let (s, c) = yaw.sin_cos();
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(sx, sy)| {
                let l = Vector2::new(sx * half.x, sy * half.y);
                center + Vector2::new(c * l.x - s * l.y, s * l.x + c * l.y)
            })
            .collect();
        Self { corners }
    }

    /// Convex hull of the xy projection of `points` (monotone chain).
    pub fn hull<'a>(points: impl IntoIterator<Item = &'a Vector3<f64>>) -> Self {
        let mut p: Vec<Vector2<f64>> = points.into_iter().map(|v| v.xy()).collect();
        p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        p.dedup();
        if p.len() < 3 {
            return Self { corners: p };
        }
        let mut lower: Vec<Vector2<f64>> = Vec::new();
        for q in &p {
            while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0.0 {
                lower.pop();
            }
            lower.push(*q);
        }
        let mut upper: Vec<Vector2<f64>> = Vec::new();
        for q in p.iter().rev() {
            while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0.0 {
                upper.pop();
            }
            upper.push(*q);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self { corners: lower }
    }

    fn edges(&self) -> impl Iterator<Item = (&Vector2<f64>, &Vector2<f64>)> {
        let n = self.corners.len();
        (0..n).map(move |i| (&self.corners[i], &self.corners[(i + 1) % n]))
    }

    pub fn contains(&self, p: &Vector2<f64>) -> bool {
        self.corners.len() >= 3 && self.edges().all(|(a, b)| cross(a, b, p) >= 0.0)
    }

    /// Zero inside the polygon.
    pub fn distance_to_point(&self, p: &Vector2<f64>) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        match self.corners.len() {
            0 => f64::INFINITY,
            1 => (p - self.corners[0]).norm(),
            _ => self.edges().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Gap between two polygons; zero when they touch or overlap.
    pub fn distance(&self, other: &Footprint) -> f64 {
        if self.corners.iter().any(|c| other.contains(c)) || other.corners.iter().any(|c| self.contains(c)) {
            return 0.0;
        }
        for (a, b) in self.edges() {
            for (c, d) in other.edges() {
                if segments_intersect(a, b, c, d) {
                    return 0.0;
                }
            }
        }
        let ab = self.corners.iter().map(|c| other.distance_to_point(c)).fold(f64::INFINITY, f64::min);
        let ba = other.corners.iter().map(|c| self.distance_to_point(c)).fold(f64::INFINITY, f64::min);
        ab.min(ba)
    }

    /// Largest distance from `center` to a corner.
    pub fn radius_about(&self, center: &Vector2<f64>) -> f64 {
        self.corners.iter().map(|c| (c - center).norm()).fold(0.0, f64::max)
    }
}
