//! Mesh files: a triangulated ASCII OBJ subset plus a TOML sidecar with the
//! class metadata, and an optional cache of the 64 sample points.
//!
//! For `pallet.obj` the sidecar is `pallet.toml` and the cache is
//! `pallet.samples.txt`.

use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::model::{Articulation, ClassMesh, TriangleSoup, DEFAULT_MAX_OPENING_DEG, SAMPLE_COUNT};
use super::procedural::DEFAULT_SAMPLE_SEED;
use super::{MeshError, ObjectClass};

/// Sidecar metadata accompanying an OBJ file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshMetadata {
    pub class: ObjectClass,
    /// Position of the class reference point in OBJ coordinates; subtracted
    /// from every vertex on load.
    #[serde(default)]
    pub reference_offset: [f64; 3],
    #[serde(default = "default_max_opening")]
    pub max_opening_deg: f64,
    #[serde(default = "default_seed")]
    pub sample_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub articulation: Option<ArticulationMetadata>,
}

/// Jaw vertex sets are given as half-open index ranges `[start, end)` into the
/// OBJ vertex list (0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArticulationMetadata {
    pub jaw_a: Vec<[usize; 2]>,
    pub jaw_b: Vec<[usize; 2]>,
    /// In OBJ coordinates.
    pub hinge_point: [f64; 3],
    pub hinge_axis: [f64; 3],
}

fn default_max_opening() -> f64 {
    DEFAULT_MAX_OPENING_DEG
}

fn default_seed() -> u64 {
    DEFAULT_SAMPLE_SEED
}

pub fn sidecar_path(obj: &Path) -> PathBuf {
    obj.with_extension("toml")
}

pub fn sample_cache_path(obj: &Path) -> PathBuf {
    obj.with_extension("samples.txt")
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<u32, MeshError> {
    let head = tok.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| MeshError::MeshParse { line, message: format!("bad face index '{tok}'") })?;
    let idx = if raw > 0 { raw - 1 } else { n as i64 + raw };
    if raw == 0 || idx < 0 || idx >= n as i64 {
        return Err(MeshError::MeshParse { line, message: format!("face index {raw} out of range") });
    }
    Ok(idx as u32)
}

/// Parses `v` and triangular `f` records; other record types are ignored.
pub fn parse_obj(text: &str) -> Result<TriangleSoup, MeshError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<f64> = toks
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| MeshError::MeshParse { line, message: format!("bad vertex: {e}") })?;
                if c.len() != 3 || !c.iter().all(|v| v.is_finite()) {
                    return Err(MeshError::MeshParse { line, message: "vertex needs three finite coordinates".into() });
                }
                vertices.push(Vector3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = toks.map(|t| parse_index(t, vertices.len(), line)).collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(MeshError::MeshParse { line, message: format!("face has {} vertices; mesh must be triangulated", idx.len()) });
                }
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    if vertices.is_empty() || triangles.is_empty() {
        return Err(MeshError::EmptyMesh);
    }
    Ok((vertices, triangles))
}

pub fn format_obj(vertices: &[Vector3<f64>], triangles: &[[u32; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for t in triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

fn expand_ranges(ranges: &[[usize; 2]]) -> Vec<usize> {
    ranges.iter().flat_map(|r| r[0]..r[1]).collect()
}

fn compress_ranges(indices: &[usize]) -> Vec<[usize; 2]> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<Range<usize>> = Vec::new();
    for i in sorted {
        match out.last_mut() {
            Some(r) if r.end == i => r.end += 1,
            _ => out.push(i..i + 1),
        }
    }
    out.into_iter().map(|r| [r.start, r.end]).collect()
}

/// Reads the cached 64×3 sample table, returning `(seed, points)`.
pub fn read_sample_cache(path: &Path) -> Result<(u64, Vec<Vector3<f64>>), MeshError> {
    let text = fs::read_to_string(path).map_err(|e| MeshError::Io(format!("{}: {e}", path.display())))?;
    let mut seed = None;
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('#') {
            if let Some(s) = h.trim().strip_prefix("seed") {
                seed = Some(s.trim().parse::<u64>().map_err(|e| MeshError::MeshParse { line: lineno + 1, message: format!("bad seed: {e}") })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let c: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| MeshError::MeshParse { line: lineno + 1, message: format!("bad sample row: {e}") })?;
        if c.len() != 3 {
            return Err(MeshError::MeshParse { line: lineno + 1, message: "sample row needs three columns".into() });
        }
        points.push(Vector3::new(c[0], c[1], c[2]));
    }
    let seed = seed.ok_or_else(|| MeshError::BadSamples("sample cache has no '# seed' header".into()))?;
    if points.len() != SAMPLE_COUNT {
        return Err(MeshError::BadSamples(format!("sample cache has {} rows, expected {SAMPLE_COUNT}", points.len())));
    }
    Ok((seed, points))
}

pub fn format_sample_cache(mesh: &ClassMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# paramdet sample points v1");
    let _ = writeln!(s, "# class {}", mesh.class());
    let _ = writeln!(s, "# seed {}", mesh.sample_seed());
    let _ = writeln!(s, "# columns x y z");
    for p in mesh.sample_points() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    s
}

/// Loads `path` (OBJ) with its sidecar. Sample points come from the cache
/// when one exists with the sidecar's seed, otherwise they are generated.
pub fn load_mesh(path: &Path) -> Result<ClassMesh, MeshError> {
    let io = |p: &Path, e: std::io::Error| MeshError::Io(format!("{}: {e}", p.display()));
    let obj = fs::read_to_string(path).map_err(|e| io(path, e))?;
    let side = sidecar_path(path);
    let meta_text = fs::read_to_string(&side).map_err(|e| io(&side, e))?;
    let meta: MeshMetadata = toml::from_str(&meta_text).map_err(|e| MeshError::MeshParse { line: 0, message: format!("{}: {e}", side.display()) })?;
    let (mut vertices, triangles) = parse_obj(&obj)?;
    let offset = Vector3::from(meta.reference_offset);
    for v in &mut vertices {
        *v -= offset;
    }
    let articulation = meta.articulation.as_ref().map(|a| Articulation {
        jaw_a: expand_ranges(&a.jaw_a),
        jaw_b: expand_ranges(&a.jaw_b),
        hinge_point: Vector3::from(a.hinge_point) - offset,
        hinge_axis: Vector3::from(a.hinge_axis),
    });
    let cache = sample_cache_path(path);
    if cache.exists() {
        let (seed, points) = read_sample_cache(&cache)?;
        if seed == meta.sample_seed {
            return ClassMesh::with_samples(meta.class, vertices, triangles, articulation, meta.max_opening_deg, seed, points);
        }
    }
    ClassMesh::new(meta.class, vertices, triangles, articulation, meta.max_opening_deg, meta.sample_seed)
}

/// Writes `mesh` as OBJ + sidecar + sample cache under `path` (the OBJ path).
pub fn save_mesh(mesh: &ClassMesh, path: &Path) -> Result<(), MeshError> {
    let io = |p: &Path, e: std::io::Error| MeshError::Io(format!("{}: {e}", p.display()));
    let meta = MeshMetadata {
        class: mesh.class(),
        reference_offset: [0.0; 3],
        max_opening_deg: mesh.max_opening_deg(),
        sample_seed: mesh.sample_seed(),
        articulation: mesh.articulation().map(|a| ArticulationMetadata {
            jaw_a: compress_ranges(&a.jaw_a),
            jaw_b: compress_ranges(&a.jaw_b),
            hinge_point: a.hinge_point.into(),
            hinge_axis: a.hinge_axis.into(),
        }),
    };
    let meta_text = toml::to_string(&meta).map_err(|e| MeshError::Io(e.to_string()))?;
    fs::write(path, format_obj(mesh.vertices(), mesh.triangles())).map_err(|e| io(path, e))?;
    let side = sidecar_path(path);
    fs::write(&side, meta_text).map_err(|e| io(&side, e))?;
    let cache = sample_cache_path(path);
    fs::write(&cache, format_sample_cache(mesh)).map_err(|e| io(&cache, e))?;
    Ok(())
}
