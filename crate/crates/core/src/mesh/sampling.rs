use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{ClassMesh, MeshPart, SAMPLE_COUNT};
use super::MeshError;
use crate::sampling::farthest_point_indices;

/// Candidate pool drawn before thinning to [`SAMPLE_COUNT`].
pub const CANDIDATE_COUNT: usize = 4096;

/// Area-weighted uniform surface samples, `count` of them, with the part of
/// the triangle each sample came from.
pub fn area_weighted_samples(mesh: &ClassMesh, count: usize, rng: &mut impl Rng) -> Result<(Vec<Vector3<f64>>, Vec<MeshPart>), MeshError> {
    let vs = mesh.vertices();
    let mut cumulative = Vec::with_capacity(mesh.triangles().len());
    let mut total = 0.0;
    for t in mesh.triangles() {
        let [a, b, c] = t.map(|i| vs[i as usize]);
        total += 0.5 * (b - a).cross(&(c - a)).norm();
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(MeshError::EmptyMesh);
    }
    let mut points = Vec::with_capacity(count);
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        let r = rng.random::<f64>() * total;
        let ti = cumulative.partition_point(|&c| c <= r).min(cumulative.len() - 1);
        let [a, b, c] = mesh.triangles()[ti].map(|i| vs[i as usize]);
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let su = u.sqrt();
        points.push(a * (1.0 - su) + b * (su * (1.0 - v)) + c * (su * v));
        parts.push(mesh.triangle_part(ti));
    }
    Ok((points, parts))
}

/// The 64-point representation: area-weighted candidates thinned by farthest
/// point sampling, deterministic under `seed`.
pub fn generate_sample_points(mesh: &ClassMesh, seed: u64) -> Result<(Vec<Vector3<f64>>, Vec<MeshPart>), MeshError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (candidates, parts) = area_weighted_samples(mesh, CANDIDATE_COUNT, &mut rng)?;
    let idx = farthest_point_indices(&candidates, SAMPLE_COUNT, 0);
    Ok((idx.iter().map(|&i| candidates[i]).collect(), idx.iter().map(|&i| parts[i]).collect()))
}
