use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{MeshError, ObjectClass, ParamTarget};
use crate::geometry::{Aabb, UnitQuaternion};

/// Number of surface points in the compact per-object representation.
pub const SAMPLE_COUNT: usize = 64;

/// Default upper bound of the gripper opening angle in degrees.
pub const DEFAULT_MAX_OPENING_DEG: f64 = 90.0;

/// Which rigid part of a mesh a vertex or sample point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshPart {
    Body,
    JawA,
    JawB,
}

/// Single-hinge twin-jaw articulation.
///
/// Opening by `α` rotates jaw A by `+α/2` and jaw B by `-α/2` about the
/// hinge axis through the hinge point.
#[derive(Clone, Debug, PartialEq)]
pub struct Articulation {
    pub jaw_a: Vec<usize>,
    pub jaw_b: Vec<usize>,
    pub hinge_point: Vector3<f64>,
    pub hinge_axis: Vector3<f64>,
}

/// A class mesh in its body frame: +x long axis, +z up, origin at the
/// class reference point.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMesh {
    class: ObjectClass,
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[u32; 3]>,
    vertex_parts: Vec<MeshPart>,
    articulation: Option<Articulation>,
    sample_points: Vec<Vector3<f64>>,
    sample_parts: Vec<MeshPart>,
    sample_seed: u64,
    max_opening_deg: f64,
    normalized: bool,
}

impl ClassMesh {
    /// Builds a mesh and generates its 64 sample points from `sample_seed`.
    pub fn new(
        class: ObjectClass,
        vertices: Vec<Vector3<f64>>,
        triangles: Vec<[u32; 3]>,
        articulation: Option<Articulation>,
        max_opening_deg: f64,
        sample_seed: u64,
    ) -> Result<Self, MeshError> {
        let mut mesh = Self::without_samples(class, vertices, triangles, articulation, max_opening_deg)?;
        let (points, parts) = super::sampling::generate_sample_points(&mesh, sample_seed)?;
        mesh.sample_points = points;
        mesh.sample_parts = parts;
        mesh.sample_seed = sample_seed;
        Ok(mesh)
    }

    /// Builds a mesh with precomputed sample points (e.g. from a cache file).
    pub fn with_samples(
        class: ObjectClass,
        vertices: Vec<Vector3<f64>>,
        triangles: Vec<[u32; 3]>,
        articulation: Option<Articulation>,
        max_opening_deg: f64,
        sample_seed: u64,
        sample_points: Vec<Vector3<f64>>,
    ) -> Result<Self, MeshError> {
        if sample_points.len() != SAMPLE_COUNT {
            return Err(MeshError::BadSamples(format!("expected {SAMPLE_COUNT} sample points, got {}", sample_points.len())));
        }
        let mut mesh = Self::without_samples(class, vertices, triangles, articulation, max_opening_deg)?;
        mesh.sample_parts = sample_points.iter().map(|p| mesh.part_of_nearest_triangle(p)).collect();
        mesh.sample_points = sample_points;
        mesh.sample_seed = sample_seed;
        Ok(mesh)
    }

    fn without_samples(
        class: ObjectClass,
        vertices: Vec<Vector3<f64>>,
        triangles: Vec<[u32; 3]>,
        articulation: Option<Articulation>,
        max_opening_deg: f64,
    ) -> Result<Self, MeshError> {
        if class == ObjectClass::NoObject {
            return Err(MeshError::InvalidTarget("no-object class has no mesh".into()));
        }
        if vertices.is_empty() || triangles.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i as usize >= vertices.len())) {
            return Err(MeshError::MeshParse { line: 0, message: format!("triangle {t:?} references a missing vertex") });
        }
        if articulation.is_some() != (class == ObjectClass::Gripper) {
            return Err(MeshError::InvalidTarget(format!("articulation must be present exactly for grippers (class {class})")));
        }
        if !(max_opening_deg > 0.0 && max_opening_deg.is_finite()) {
            return Err(MeshError::InvalidTarget(format!("max opening {max_opening_deg} must be positive")));
        }
        let mut vertex_parts = vec![MeshPart::Body; vertices.len()];
        if let Some(a) = &articulation {
            if a.hinge_axis.norm() < 1e-12 {
                return Err(MeshError::InvalidTarget("hinge axis has zero length".into()));
            }
            for (set, part) in [(&a.jaw_a, MeshPart::JawA), (&a.jaw_b, MeshPart::JawB)] {
                for &i in set {
                    if i >= vertices.len() {
                        return Err(MeshError::InvalidTarget(format!("jaw vertex {i} out of range")));
                    }
                    if vertex_parts[i] != MeshPart::Body {
                        return Err(MeshError::InvalidTarget(format!("vertex {i} belongs to both jaws")));
                    }
                    vertex_parts[i] = part;
                }
            }
        }
        let articulation = articulation.map(|mut a| {
            a.hinge_axis = a.hinge_axis.normalize();
            a
        });
        Ok(Self {
            class,
            vertices,
            triangles,
            vertex_parts,
            articulation,
            sample_points: Vec::new(),
            sample_parts: Vec::new(),
            sample_seed: 0,
            max_opening_deg,
            normalized: false,
        })
    }

    pub fn class(&self) -> ObjectClass {
        self.class
    }
    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }
    pub fn articulation(&self) -> Option<&Articulation> {
        self.articulation.as_ref()
    }
    pub fn sample_points(&self) -> &[Vector3<f64>] {
        &self.sample_points
    }
    pub fn sample_parts(&self) -> &[MeshPart] {
        &self.sample_parts
    }
    pub fn sample_seed(&self) -> u64 {
        self.sample_seed
    }
    pub fn max_opening_deg(&self) -> f64 {
        self.max_opening_deg
    }
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
    pub fn vertex_parts(&self) -> &[MeshPart] {
        &self.vertex_parts
    }

    /// Part of the triangle `t`: a jaw if all its corners belong to that jaw.
    pub fn triangle_part(&self, t: usize) -> MeshPart {
        let parts = self.triangles[t].map(|i| self.vertex_parts[i as usize]);
        if parts[0] == parts[1] && parts[1] == parts[2] {
            parts[0]
        } else {
            MeshPart::Body
        }
    }

    fn part_of_nearest_triangle(&self, p: &Vector3<f64>) -> MeshPart {
        let mut best = (f64::INFINITY, MeshPart::Body);
        for (ti, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| self.vertices[i as usize]);
            let d = point_triangle_distance(p, &a, &b, &c);
            if d < best.0 {
                best = (d, self.triangle_part(ti));
            }
        }
        best.1
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Opens the jaws by `opening_deg` relative to the current state.
    ///
    /// Accepts `[-max, max]` so that an articulation can be undone by its
    /// negation; absolute openings are range-checked by [`ClassMesh::phi`].
    pub fn articulate(&self, opening_deg: f64) -> Result<ClassMesh, MeshError> {
        let art = self.articulation.as_ref().ok_or(MeshError::NotArticulable(self.class))?;
        self.check_opening(opening_deg.abs(), opening_deg)?;
        let (qa, qb) = jaw_rotations(art, opening_deg);
        let mut out = self.clone();
        for (v, part) in out.vertices.iter_mut().zip(&self.vertex_parts) {
            *v = rotate_part(v, *part, art, &qa, &qb);
        }
        for (v, part) in out.sample_points.iter_mut().zip(&self.sample_parts) {
            *v = rotate_part(v, *part, art, &qa, &qb);
        }
        Ok(out)
    }

    fn check_opening(&self, magnitude: f64, reported: f64) -> Result<(), MeshError> {
        let tol = 1e-9 * self.max_opening_deg;
        if !magnitude.is_finite() || magnitude < -tol || magnitude > self.max_opening_deg + tol {
            return Err(MeshError::OpeningOutOfRange { opening_deg: reported, max_deg: self.max_opening_deg });
        }
        Ok(())
    }

    /// Opening of `target` in degrees, undoing the `[-1, 1]` scaling for
    /// normalized targets.
    pub fn opening_degrees(&self, target: &ParamTarget) -> Option<f64> {
        target.opening.map(|a| if target.pose.normalized { (a + 1.0) * 0.5 * self.max_opening_deg } else { a })
    }

    fn check_target(&self, target: &ParamTarget) -> Result<Option<f64>, MeshError> {
        if target.class != self.class {
            return Err(MeshError::ClassMismatch { mesh: self.class, target: target.class });
        }
        if target.pose.normalized != self.normalized {
            return Err(MeshError::NormalizationMismatch);
        }
        let opening = self.opening_degrees(target);
        match (self.class.has_opening(), opening) {
            (true, Some(a)) => {
                self.check_opening(a, a)?;
                Ok(Some(a))
            }
            (true, None) => Err(MeshError::InvalidTarget("gripper target requires an opening angle".into())),
            (false, Some(_)) => Err(MeshError::InvalidTarget(format!("{} target cannot carry an opening angle", self.class))),
            (false, None) => Ok(None),
        }
    }

    /// The 64-point representation of the mesh configured by `target`:
    /// articulation first (grippers), then the rigid pose.
    pub fn phi(&self, target: &ParamTarget) -> Result<Vec<Vector3<f64>>, MeshError> {
        let opening = self.check_target(target)?;
        let pose = &target.pose;
        match (opening, self.articulation.as_ref()) {
            (Some(a), Some(art)) if a != 0.0 => {
                let (qa, qb) = jaw_rotations(art, a);
                Ok(self.sample_points.iter().zip(&self.sample_parts).map(|(p, part)| pose.transform_point(&rotate_part(p, *part, art, &qa, &qb))).collect())
            }
            _ => Ok(self.sample_points.iter().map(|p| pose.transform_point(p)).collect()),
        }
    }

    /// The full posed mesh (vertices in the parent frame, same triangles).
    pub fn phi_mesh(&self, target: &ParamTarget) -> Result<Vec<Vector3<f64>>, MeshError> {
        let opening = self.check_target(target)?;
        let base = match opening {
            Some(a) if a != 0.0 => self.articulate(a)?.vertices,
            _ => self.vertices.clone(),
        };
        Ok(base.iter().map(|v| target.pose.transform_point(v)).collect())
    }

    /// Uniformly scaled copy used in the normalized frame.
    pub fn scaled(&self, factor: f64, normalized: bool) -> ClassMesh {
        let mut out = self.clone();
        for v in out.vertices.iter_mut().chain(out.sample_points.iter_mut()) {
            *v *= factor;
        }
        if let Some(a) = out.articulation.as_mut() {
            a.hinge_point *= factor;
        }
        out.normalized = normalized;
        out
    }

    /// Volume centroid of the (closed) mesh; falls back to the area centroid
    /// when the enclosed volume vanishes.
    pub fn center_of_mass(&self) -> Vector3<f64> {
        center_of_mass(&self.vertices, &self.triangles)
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize]);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }
}

fn jaw_rotations(art: &Articulation, opening_deg: f64) -> (UnitQuaternion, UnitQuaternion) {
    let half = 0.5 * opening_deg.to_radians();
    let qa = UnitQuaternion::from_axis_angle(&art.hinge_axis, half).expect("hinge axis validated at construction");
    let qb = UnitQuaternion::from_axis_angle(&art.hinge_axis, -half).expect("hinge axis validated at construction");
    (qa, qb)
}

fn rotate_part(v: &Vector3<f64>, part: MeshPart, art: &Articulation, qa: &UnitQuaternion, qb: &UnitQuaternion) -> Vector3<f64> {
    match part {
        MeshPart::Body => *v,
        MeshPart::JawA => art.hinge_point + qa.rotate(&(v - art.hinge_point)),
        MeshPart::JawB => art.hinge_point + qb.rotate(&(v - art.hinge_point)),
    }
}

pub(crate) fn center_of_mass(vertices: &[Vector3<f64>], triangles: &[[u32; 3]]) -> Vector3<f64> {
    let mut volume = 0.0;
    let mut moment = Vector3::zeros();
    let mut area = 0.0;
    let mut area_moment = Vector3::zeros();
    for t in triangles {
        let [a, b, c] = t.map(|i| vertices[i as usize]);
        let v = a.dot(&b.cross(&c)) / 6.0;
        volume += v;
        moment += (a + b + c) * (v / 4.0);
        let s = 0.5 * (b - a).cross(&(c - a)).norm();
        area += s;
        area_moment += (a + b + c) * (s / 3.0);
    }
    let scale = Aabb::from_points(vertices).extent().max();
    if volume.abs() > 1e-12 * scale.powi(3) {
        moment / volume
    } else if area > 0.0 {
        area_moment / area
    } else {
        Vector3::zeros()
    }
}

/// Euclidean distance from `p` to triangle `abc`.
/// Vertices plus triangle index triples.
pub type TriangleSoup = (Vec<Vector3<f64>>, Vec<[u32; 3]>);

pub fn point_triangle_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    // Closest-point classification by Voronoi regions of the triangle.
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}
