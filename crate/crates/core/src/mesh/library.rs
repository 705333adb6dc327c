use std::path::Path;

use sha2::{Digest, Sha256};

use super::model::ClassMesh;
use super::normalize::ScaleRecord;
use super::{io, procedural, MeshError, ObjectClass, OBJECT_CLASSES};

/// One mesh per object class.
#[derive(Clone, Debug)]
pub struct MeshLibrary {
    meshes: [ClassMesh; 3],
}

impl MeshLibrary {
    pub fn builtin(sample_seed: u64) -> Result<Self, MeshError> {
        Ok(Self { meshes: [procedural::gripper(sample_seed)?, procedural::loading_platform(sample_seed)?, procedural::pallet(sample_seed)?] })
    }

    /// Library from explicit meshes given in gripper, loading platform,
    /// pallet order.
    pub fn from_meshes(meshes: [ClassMesh; 3]) -> Result<Self, MeshError> {
        for (m, class) in meshes.iter().zip(OBJECT_CLASSES) {
            if m.class() != class {
                return Err(MeshError::ClassMismatch { mesh: m.class(), target: class });
            }
        }
        Ok(Self { meshes })
    }

    /// Loads `<class>.obj` for each class from `dir`, falling back to the
    /// built-in mesh for any class without a file.
    pub fn from_dir(dir: &Path, sample_seed: u64) -> Result<Self, MeshError> {
        let mut lib = Self::builtin(sample_seed)?;
        for class in OBJECT_CLASSES {
            let path = dir.join(format!("{}.obj", class.name()));
            if path.exists() {
                let mesh = io::load_mesh(&path)?;
                if mesh.class() != class {
                    return Err(MeshError::ClassMismatch { mesh: mesh.class(), target: class });
                }
                log::debug!("loaded {} mesh from {}", class, path.display());
                lib.meshes[class.index() - 1] = mesh;
            }
        }
        Ok(lib)
    }

    pub fn get(&self, class: ObjectClass) -> Result<&ClassMesh, MeshError> {
        match class {
            ObjectClass::NoObject => Err(MeshError::InvalidTarget("no-object class has no mesh".into())),
            c => Ok(&self.meshes[c.index() - 1]),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &ClassMesh> {
        self.meshes.iter()
    }

    /// Copy whose meshes live in the normalized frame of `rec`.
    pub fn normalized(&self, rec: &ScaleRecord) -> Self {
        Self { meshes: self.meshes.clone().map(|m| m.scaled(rec.mesh_scale(), true)) }
    }

    /// SHA-256 over vertices, triangles and sample points of every mesh.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for m in &self.meshes {
            h.update(m.class().name().as_bytes());
            for v in m.vertices().iter().chain(m.sample_points()) {
                for c in v.iter() {
                    h.update(c.to_le_bytes());
                }
            }
            for t in m.triangles() {
                for i in t {
                    h.update(i.to_le_bytes());
                }
            }
        }
        hex::encode(h.finalize())
    }
}
