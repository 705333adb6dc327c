use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::bvh::Bvh;
use crate::geometry::{Aabb, Pose};

/// Rays start this far past the origin to avoid self-hits.
pub const T_MIN: f64 = 1e-9;

/// Triangle or analytic sphere, in world coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Primitive {
    Triangle([Vector3<f64>; 3]),
    Sphere { center: Vector3<f64>, radius: f64 },
}

impl Primitive {
    pub fn bounds(&self) -> Aabb {
        match self {
            Primitive::Triangle(v) => Aabb::from_points(v.iter()),
            Primitive::Sphere { center, radius } => Aabb { min: center.add_scalar(-radius), max: center.add_scalar(*radius) },
        }
    }

    /// Ray parameter of the nearest intersection in `(T_MIN, t_max]`; `dir`
    /// must be unit length. Triangles are two-sided.
    pub fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let t = match self {
            Primitive::Triangle([a, b, c]) => {
                let e1 = b - a;
                let e2 = c - a;
                let p = dir.cross(&e2);
                let det = e1.dot(&p);
                if det == 0.0 || !det.is_finite() {
                    return None;
                }
                let inv = 1.0 / det;
                let s = origin - a;
                let u = s.dot(&p) * inv;
                if !(0.0..=1.0).contains(&u) {
                    return None;
                }
                let q = s.cross(&e1);
                let v = dir.dot(&q) * inv;
                if v < 0.0 || u + v > 1.0 {
                    return None;
                }
                e2.dot(&q) * inv
            }
            Primitive::Sphere { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let near = -b - sq;
                if near > T_MIN {
                    near
                } else {
                    -b + sq
                }
            }
        };
        (t > T_MIN && t <= t_max).then_some(t)
    }

    /// Distance from `p` to the primitive surface.
    pub fn distance(&self, p: &Vector3<f64>) -> f64 {
        match self {
            Primitive::Triangle([a, b, c]) => crate::mesh::point_triangle_distance(p, a, b, c),
            Primitive::Sphere { center, radius } => ((p - center).norm() - radius).abs(),
        }
    }
}

/// First intersection along a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub distance: f64,
    pub point: Vector3<f64>,
    pub instance_id: u32,
    pub primitive: usize,
}

/// World-space primitives tagged with the instance that owns them, the
/// sensor mount and the acceleration structure.
#[derive(Clone, Debug, Default)]
pub struct SceneGeometry {
    primitives: Vec<Primitive>,
    owners: Vec<u32>,
    /// World pose of the sensor frame (+x forward, +z up).
    sensor: Pose,
    bvh: Bvh,
    built: bool,
}

impl SceneGeometry {
    pub fn new(sensor: Pose) -> Self {
        Self { sensor, ..Default::default() }
    }

    pub fn sensor(&self) -> &Pose {
        &self.sensor
    }

    pub fn set_sensor(&mut self, sensor: Pose) {
        self.sensor = sensor;
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn owners(&self) -> &[u32] {
        &self.owners
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn add_primitive(&mut self, instance_id: u32, p: Primitive) {
        self.primitives.push(p);
        self.owners.push(instance_id);
        self.built = false;
    }

    /// Adds a triangle mesh whose vertices are already in world coordinates.
    pub fn add_mesh(&mut self, instance_id: u32, vertices: &[Vector3<f64>], triangles: &[[u32; 3]]) {
        for t in triangles {
            self.add_primitive(instance_id, Primitive::Triangle(t.map(|i| vertices[i as usize])));
        }
    }

    /// Builds the BVH; must be called after the last primitive is added.
    pub fn finalize(&mut self) {
        let bounds: Vec<Aabb> = self.primitives.iter().map(|p| p.bounds()).collect();
        self.bvh = Bvh::build(&bounds);
        self.built = true;
    }

    pub fn is_finalized(&self) -> bool {
        self.built || self.primitives.is_empty()
    }

    fn hit(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, (t, i): (f64, usize)) -> Hit {
        Hit { distance: t, point: origin + dir * t, instance_id: self.owners[i], primitive: i }
    }

    /// Nearest hit within `max_range` using the BVH. Panics if not finalized.
    pub fn cast(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, max_range: f64) -> Option<Hit> {
        assert!(self.is_finalized(), "SceneGeometry::finalize must be called before casting");
        self.bvh.nearest(origin, dir, max_range, |i| self.primitives[i].intersect(origin, dir, max_range)).map(|h| self.hit(origin, dir, h))
    }

    /// Reference nearest hit by testing every primitive.
    pub fn cast_brute_force(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, max_range: f64) -> Option<Hit> {
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in self.primitives.iter().enumerate() {
            if let Some(t) = p.intersect(origin, dir, max_range) {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best.map(|h| self.hit(origin, dir, h))
    }
}
