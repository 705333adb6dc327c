//! Built-in stand-in meshes for the three object classes.
//!
//! They are coarse box assemblies with realistic dimensions, authored in the
//! body-frame convention (+x long axis, +z up, origin at the class reference
//! point). CAD meshes loaded through [`super::load_mesh`] replace them.

use std::ops::Range;

use nalgebra::Vector3;

use super::model::{center_of_mass, Articulation, ClassMesh, DEFAULT_MAX_OPENING_DEG};
use super::{MeshError, ObjectClass};

/// Default seed for sample-point generation of the built-in meshes.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x5EED_0064;

/// Accumulates closed box meshes.
#[derive(Default, Debug, Clone)]
pub struct MeshBuilder {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[u32; 3]>,
}

impl MeshBuilder {
    /// Adds an axis-aligned box with outward-facing triangles and returns the
    /// index range of its eight vertices.
    pub fn add_box(&mut self, min: Vector3<f64>, max: Vector3<f64>) -> Range<usize> {
        let start = self.vertices.len();
        for i in 0..8 {
            self.vertices.push(Vector3::new(
                if i & 1 == 0 { min.x } else { max.x },
                if i & 2 == 0 { min.y } else { max.y },
                if i & 4 == 0 { min.z } else { max.z },
            ));
        }
        let s = start as u32;
        // Faces as quads (counter-clockwise seen from outside).
        const QUADS: [[u32; 4]; 6] = [
            [0, 2, 3, 1], // -z
            [4, 5, 7, 6], // +z
            [0, 1, 5, 4], // -y
            [2, 6, 7, 3], // +y
            [0, 4, 6, 2], // -x
            [1, 3, 7, 5], // +x
        ];
        for q in QUADS {
            self.triangles.push([s + q[0], s + q[1], s + q[2]]);
            self.triangles.push([s + q[0], s + q[2], s + q[3]]);
        }
        start..start + 8
    }

    pub fn translate(&mut self, offset: &Vector3<f64>) {
        for v in &mut self.vertices {
            *v += offset;
        }
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn finish(self) -> (Vec<Vector3<f64>>, Vec<[u32; 3]>) {
        (self.vertices, self.triangles)
    }
}

fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
    Vector3::new(x, y, z)
}

/// Twin-jaw crane gripper, origin at the center of mass of the closed gripper.
pub fn gripper(sample_seed: u64) -> Result<ClassMesh, MeshError> {
    let mut b = MeshBuilder::default();
    b.add_box(v(-0.4, -0.25, 0.0), v(0.4, 0.25, 0.4));
    let jaw_a = b.add_box(v(0.05, -0.3, -1.0), v(0.2, 0.3, 0.0));
    let jaw_b = b.add_box(v(-0.2, -0.3, -1.0), v(-0.05, 0.3, 0.0));
    let (verts, tris) = b.clone().finish();
    let com = center_of_mass(&verts, &tris);
    b.translate(&-com);
    let (verts, tris) = b.finish();
    let art = Articulation { jaw_a: jaw_a.collect(), jaw_b: jaw_b.collect(), hinge_point: -com, hinge_axis: v(0.0, -1.0, 0.0) };
    ClassMesh::new(ObjectClass::Gripper, verts, tris, Some(art), DEFAULT_MAX_OPENING_DEG, sample_seed)
}

/// Truck loading platform: deck slab with a headboard at the front (+x).
/// Origin at the front-right corner of the deck surface; the deck extends
/// backwards (-x) and to the left (+y).
pub fn loading_platform(sample_seed: u64) -> Result<ClassMesh, MeshError> {
    let mut b = MeshBuilder::default();
    b.add_box(v(-6.0, 0.0, -0.25), v(0.0, 2.4, 0.0));
    b.add_box(v(-0.1, 0.0, 0.0), v(0.0, 2.4, 1.0));
    let (verts, tris) = b.finish();
    ClassMesh::new(ObjectClass::LoadingPlatform, verts, tris, None, DEFAULT_MAX_OPENING_DEG, sample_seed)
}

/// Euro pallet (1.2 × 0.8 × 0.144 m): top deck on three skids.
/// Origin at the bottom center.
pub fn pallet(sample_seed: u64) -> Result<ClassMesh, MeshError> {
    let mut b = MeshBuilder::default();
    b.add_box(v(-0.6, -0.4, PALLET_SKID_HEIGHT), v(0.6, 0.4, PALLET_HEIGHT));
    for y in [-0.35, 0.0, 0.35] {
        b.add_box(v(-0.6, y - 0.05, 0.0), v(0.6, y + 0.05, PALLET_SKID_HEIGHT));
    }
    let (verts, tris) = b.finish();
    ClassMesh::new(ObjectClass::Pallet, verts, tris, None, DEFAULT_MAX_OPENING_DEG, sample_seed)
}

pub const PALLET_HEIGHT: f64 = 0.144;
const PALLET_SKID_HEIGHT: f64 = 0.122;

pub fn builtin(class: ObjectClass, sample_seed: u64) -> Result<ClassMesh, MeshError> {
    match class {
        ObjectClass::Gripper => gripper(sample_seed),
        ObjectClass::LoadingPlatform => loading_platform(sample_seed),
        ObjectClass::Pallet => pallet(sample_seed),
        ObjectClass::NoObject => Err(MeshError::InvalidTarget("no-object class has no mesh".into())),
    }
}
