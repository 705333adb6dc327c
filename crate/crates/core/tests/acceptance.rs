//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p paramdet-core --test acceptance -- --nocapture`.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paramdet_core::eval::{accepts, average_precision, evaluate, match_for_eval, EvalConfig, SceneEvalInput, CD_THRESHOLD};
use paramdet_core::geometry::{geodesic_error, quat_symmetry_loss, Aabb, Pose, SymmetrySet, UnitQuaternion};
use paramdet_core::lidar::{Primitive, SceneGeometry};
use paramdet_core::matching::{chamfer, match_predictions, phi_clamped, solve_assignment, Matrix, Prediction};
use paramdet_core::mesh::procedural::DEFAULT_SAMPLE_SEED;
use paramdet_core::mesh::{ClassMesh, MeshLibrary, ObjectClass, ParamTarget, ScaleRecord};
use paramdet_core::pipeline::{read_json, Pipeline, PipelineConfig, RunManifest, ScanManifest, ScanTruth, RUN_MANIFEST};
use paramdet_core::sampling::farthest_point_indices;
use paramdet_core::scene::{build_scene, verify_scene, SceneConfig};
use paramdet_core::stub::{stub_predict, ConfidenceModel, StubConfig};

// Tolerances.
const SYMMETRY_TOL: f64 = 1e-12;
const CHAMFER_TOL: f64 = 1e-12;
const RAY_TOL: f64 = 1e-9;
const METERS_TOL: f64 = 1e-9;
const DEGREES_TOL: f64 = 1e-6;
const AP_TOL: f64 = 1e-12;

// Runtime limits.
const LIMIT_HUNGARIAN: Duration = Duration::from_secs(10);
const LIMIT_SYMMETRY: Duration = Duration::from_secs(1);
const LIMIT_CHAMFER: Duration = Duration::from_secs(5);
const LIMIT_FPS: Duration = Duration::from_secs(30);
const LIMIT_RAYCAST: Duration = Duration::from_secs(30);
const LIMIT_END_TO_END: Duration = Duration::from_secs(300);
const LIMIT_MONOTONICITY: Duration = Duration::from_secs(600);

type Check = Result<String, String>;
type Criterion<'a> = (u32, &'static str, Option<Duration>, Box<dyn FnOnce() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_quat(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if let Ok(q) = UnitQuaternion::new(v[0], v[1], v[2], v[3]) {
            return q;
        }
    }
}

fn rand_vec(rng: &mut impl Rng, s: f64) -> Vector3<f64> {
    Vector3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
}

// 1 ------------------------------------------------------------------------

fn brute_force_min(c: &Matrix, row: usize, used: &mut Vec<bool>) -> f64 {
    if row == c.rows {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for j in 0..c.cols {
        if !used[j] {
            used[j] = true;
            best = best.min(c.get(row, j) + brute_force_min(c, row + 1, used));
            used[j] = false;
        }
    }
    best
}

fn hungarian_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..1000 {
        let k = rng.random_range(1..=7);
        let m = rng.random_range(1..=k);
        let integer = trial % 2 == 0;
        let c = Matrix::from_fn(m, k, |_, _| if integer { rng.random_range(0..5) as f64 } else { rng.random_range(-1.0..1.0) });
        let a = solve_assignment(&c).map_err(|e| e.to_string())?;
        let mut seen = vec![false; k];
        for &j in &a {
            ensure(!seen[j], || format!("trial {trial}: column {j} assigned twice"))?;
            seen[j] = true;
        }
        // Same summation order as the brute force recursion.
        let got = a.iter().enumerate().rev().fold(0.0, |acc, (i, &j)| c.get(i, j) + acc);
        let want = brute_force_min(&c, 0, &mut vec![false; k]);
        ensure(got == want, || format!("trial {trial}: {got} vs brute force {want}"))?;
    }
    Ok("1000 matrices, K ≤ 7, costs equal brute force exactly".into())
}

// 2 ------------------------------------------------------------------------

fn symmetry_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q = rand_quat(&mut rng);
        worst = worst.max(quat_symmetry_loss(&q.z_flipped(), &q, SymmetrySet::SignAndZFlip));
    }
    ensure(worst <= SYMMETRY_TOL, || format!("max loss {worst:e}"))?;
    let g = geodesic_error(&UnitQuaternion::Z_FLIP, &UnitQuaternion::IDENTITY, SymmetrySet::SignAndZFlip);
    ensure(g == 0.0, || format!("geodesic error of the flip is {g}°"))?;
    Ok(format!("max loss {worst:.1e} over 1000 quaternions, flip geodesic 0°"))
}

// 3 ------------------------------------------------------------------------

fn chamfer_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let x: Vec<_> = (0..64).map(|_| rand_vec(&mut rng, 1.0)).collect();
        let y: Vec<_> = (0..64).map(|_| rand_vec(&mut rng, 1.0)).collect();
        let one_way = |a: &[Vector3<f64>], b: &[Vector3<f64>]| {
            let mut s = 0.0;
            for p in a {
                let mut m = f64::INFINITY;
                for q in b {
                    let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2)).sqrt();
                    if d < m {
                        m = d;
                    }
                }
                s += m;
            }
            s / a.len() as f64
        };
        let want = one_way(&x, &y) + one_way(&y, &x);
        worst = worst.max((chamfer(&x, &y).map_err(|e| e.to_string())? - want).abs());
    }
    ensure(worst <= CHAMFER_TOL, || format!("max deviation {worst:e}"))?;
    let hand = chamfer(&[Vector3::zeros()], &[Vector3::new(1.0, 0.0, 0.0)]).map_err(|e| e.to_string())?;
    ensure(hand == 2.0, || format!("hand value {hand}"))?;
    Ok(format!("500 pairs, max deviation {worst:.1e}; hand value 2.0"))
}

// 4 ------------------------------------------------------------------------

fn reference_fps(p: &[Vector3<f64>], k: usize, start: usize) -> Vec<usize> {
    let mut sel = vec![start];
    while sel.len() < k.min(p.len()) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in 0..p.len() {
            if sel.contains(&i) {
                continue;
            }
            let d = sel.iter().map(|&s| (p[i] - p[s]).norm_squared()).fold(f64::INFINITY, f64::min);
            if d > best.0 {
                best = (d, i);
            }
        }
        sel.push(best.1);
    }
    sel
}

fn fps_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for c in 0..100 {
        let n = rng.random_range(1..=500);
        // A coarse grid in some clouds produces distance ties.
        let pts: Vec<_> = (0..n).map(|_| if c % 3 == 0 { rand_vec(&mut rng, 4.0).map(|v| v.round()) } else { rand_vec(&mut rng, 10.0) }).collect();
        let k = rng.random_range(1..=n);
        let start = rng.random_range(0..n);
        ensure(farthest_point_indices(&pts, k, start) == reference_fps(&pts, k, start), || format!("cloud {c}: sequences differ"))?;
    }
    Ok("100 clouds up to 500 points, index sequences identical".into())
}

// 5 ------------------------------------------------------------------------

fn raycast_analytics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut plane = SceneGeometry::new(Pose::identity());
    let s = 1000.0;
    let v = [Vector3::new(-s, -s, 0.0), Vector3::new(s, -s, 0.0), Vector3::new(s, s, 0.0), Vector3::new(-s, s, 0.0)];
    plane.add_mesh(1, &v, &[[0, 1, 2], [0, 2, 3]]);
    plane.finalize();
    for _ in 0..500 {
        let o = Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(0.5..10.0));
        let d = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..-0.2)).normalize();
        let want = -o.z / d.z;
        let hit = plane.cast(&o, &d, 1e4).ok_or("plane ray missed")?;
        worst = worst.max((hit.distance - want).abs());
    }
    for _ in 0..500 {
        let c = rand_vec(&mut rng, 5.0);
        let r = rng.random_range(0.2..2.0);
        let mut sphere = SceneGeometry::new(Pose::identity());
        sphere.add_primitive(1, Primitive::Sphere { center: c, radius: r });
        sphere.finalize();
        let o = c + rand_vec(&mut rng, 1.0).normalize() * rng.random_range(r + 0.5..r + 10.0);
        let aim = (c + rand_vec(&mut rng, 0.5 * r) - o).normalize();
        // Geometric form: closest approach along the ray, then back off.
        let tca = (c - o).dot(&aim);
        let d2 = (c - o).norm_squared() - tca * tca;
        let want = tca - (r * r - d2).sqrt();
        let hit = sphere.cast(&o, &aim, 1e4).ok_or("sphere ray missed")?;
        worst = worst.max((hit.distance - want).abs());
    }
    ensure(worst <= RAY_TOL, || format!("max distance error {worst:e}"))?;

    for scene in 0..50 {
        let mut g = SceneGeometry::new(Pose::identity());
        for id in 0..rng.random_range(1..40u32) {
            if rng.random_bool(0.3) {
                g.add_primitive(id, Primitive::Sphere { center: rand_vec(&mut rng, 8.0), radius: rng.random_range(0.1..1.5) });
            } else {
                let a = rand_vec(&mut rng, 8.0);
                let tri = [a, a + rand_vec(&mut rng, 2.0), a + rand_vec(&mut rng, 2.0)];
                g.add_mesh(id, &tri, &[[0, 1, 2]]);
            }
        }
        g.finalize();
        for _ in 0..200 {
            let o = rand_vec(&mut rng, 2.0);
            let d = rand_vec(&mut rng, 1.0).normalize();
            let (a, b) = (g.cast(&o, &d, 25.0), g.cast_brute_force(&o, &d, 25.0));
            let same = match (a, b) {
                (None, None) => true,
                (Some(x), Some(y)) => x.distance == y.distance && x.primitive == y.primitive && x.instance_id == y.instance_id,
                _ => false,
            };
            ensure(same, || format!("scene {scene}: BVH and brute force disagree"))?;
        }
    }
    Ok(format!("1000 analytic rays, max error {worst:.1e}; 50 scenes BVH == brute force"))
}

// 6 ------------------------------------------------------------------------

fn noiseless_end_to_end(out: &Path) -> Check {
    let pipeline = Pipeline::new(PipelineConfig::default(), out).map_err(|e| e.to_string())?;
    let (report, _) = pipeline.run_all(50).map_err(|e| e.to_string())?;
    ensure(report.map == Some(1.0), || format!("mAP {:?}", report.map))?;
    let (tp, fp, fneg) = report.totals();
    let gt: usize = report.classes.iter().map(|c| c.num_ground_truth).sum();
    ensure(tp == gt && fp == 0 && fneg == 0, || format!("TP {tp} / GT {gt}, FP {fp}, FN {fneg}"))?;
    for c in &report.classes {
        let g = &c.geometry;
        let meters = g.l2_m.map_or(0.0, |s| s.mean.abs());
        let degrees = [g.geodesic_deg, g.yaw_deg, g.opening_deg].iter().flatten().map(|s| s.mean.abs()).fold(0.0, f64::max);
        ensure(meters <= METERS_TOL && degrees <= DEGREES_TOL, || format!("{}: l2 {meters:e} m, angles {degrees:e}°", c.class))?;
    }
    Ok(format!("50 scenes, {gt} targets all matched, mAP = {:.3}", report.map.unwrap_or(f64::NAN)))
}

// 7 ------------------------------------------------------------------------

/// Pallet mesh whose samples sit on the z-axis except one at `(r, 0, 0)`.
/// A half turn about z moves only that sample, by exactly `2r`, so the
/// Chamfer distance to the unturned pose is exactly `2 * 2r / 64 = r / 16`.
fn probe_library(r: f64) -> Result<MeshLibrary, String> {
    let mut samples: Vec<Vector3<f64>> = (1..64).map(|k| Vector3::new(0.0, 0.0, 0.1 * k as f64)).collect();
    samples.push(Vector3::new(r, 0.0, 0.0));
    let verts = vec![Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 0.0, 7.0)];
    let pallet = ClassMesh::with_samples(ObjectClass::Pallet, verts, vec![[0, 1, 2]], None, 90.0, 0, samples).map_err(|e| e.to_string())?;
    let builtin = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).map_err(|e| e.to_string())?;
    let g = builtin.get(ObjectClass::Gripper).map_err(|e| e.to_string())?.clone();
    let l = builtin.get(ObjectClass::LoadingPlatform).map_err(|e| e.to_string())?.clone();
    let lib = MeshLibrary::from_meshes([g, l, pallet]).map_err(|e| e.to_string())?;
    // Unit half extent at the origin: normalization leaves coordinates untouched.
    let unit = ScaleRecord::from_bounds(&Aabb { min: Vector3::repeat(-1.0), max: Vector3::repeat(1.0) }, 90.0).map_err(|e| e.to_string())?;
    Ok(lib.normalized(&unit))
}

fn threshold_semantics() -> Check {
    let mut target = ParamTarget::rigid(ObjectClass::Pallet, Pose::identity());
    target.pose.normalized = true;
    let mut turned = target;
    turned.pose.orientation = UnitQuaternion::Z_FLIP;
    let pred = Prediction::from_target(Vector3::zeros(), &turned, [0.05, 0.05, 0.05, 0.85]);
    let cfg = EvalConfig::default();

    let r_exact = 0.02;
    let lib = probe_library(r_exact)?;
    let mesh = lib.get(ObjectClass::Pallet).map_err(|e| e.to_string())?;
    let cd = chamfer(&phi_clamped(mesh, &turned).map_err(|e| e.to_string())?, &mesh.phi(&target).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(cd == CD_THRESHOLD, || format!("constructed CD {cd:e} is not exactly {CD_THRESHOLD}"))?;
    let m = match_for_eval(std::slice::from_ref(&pred), &[target], &lib, &cfg).map_err(|e| e.to_string())?;
    ensure(m.true_positives().count() == 0, || "CD equal to the threshold was accepted".into())?;

    let lib = probe_library(r_exact.next_down())?;
    let m = match_for_eval(&[pred], &[target], &lib, &cfg).map_err(|e| e.to_string())?;
    let below = m.detections[0].chamfer.unwrap_or(f64::NAN);
    ensure(m.true_positives().count() == 1 && below == CD_THRESHOLD.next_down(), || format!("CD {below:e} just below the threshold was rejected"))?;
    ensure(!accepts(CD_THRESHOLD, CD_THRESHOLD) && accepts(CD_THRESHOLD.next_down(), CD_THRESHOLD), || "predicate is not strict".into())?;
    Ok("CD = 0.00125 rejected, next float below accepted".into())
}

// 8 ------------------------------------------------------------------------

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

fn noise_monotonicity(out: &Path) -> Check {
    let mut cfg = PipelineConfig::default();
    cfg.lidar.rays = 30_000;
    let pipeline = Pipeline::new(cfg, out).map_err(|e| e.to_string())?;
    pipeline.gen_scenes(12).map_err(|e| e.to_string())?;
    let manifest = pipeline.scan().map_err(|e| e.to_string())?;
    let truths: Vec<ScanTruth> = manifest
        .scans
        .iter()
        .map(|e| read_json::<ScanTruth>(&out.join(&e.path), "scan_truth").map(|t| t.data))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let truths: Vec<ScanTruth> = truths.into_iter().filter(|t| t.scale.is_some() && !t.targets.is_empty()).collect();
    ensure(!truths.is_empty(), || "no scene with visible targets".into())?;
    let lib = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).map_err(|e| e.to_string())?;
    let locals: Vec<MeshLibrary> = truths.iter().map(|t| lib.normalized(&t.scale.expect("filtered"))).collect();

    let sigmas = [0.0, 0.01, 0.02, 0.04];
    let mut stats = Vec::new();
    for &sigma in &sigmas {
        let (mut cds, mut aps) = (Vec::new(), Vec::new());
        for seed in 0..200u64 {
            let stub = StubConfig { position_sigma: sigma, confidence_model: ConfidenceModel::NoiseCoupled, seed, ..StubConfig::noiseless() };
            let mut inputs = Vec::new();
            let mut pair_cds = Vec::new();
            for (t, local) in truths.iter().zip(&locals) {
                let targets: Vec<ParamTarget> = t.targets.iter().map(|l| l.target).collect();
                let unit = Aabb { min: Vector3::repeat(-1.0), max: Vector3::repeat(1.0) };
                let preds = stub_predict(&targets, &unit, &stub, t.index, 90.0).map_err(|e| e.to_string())?;
                let matched = match_predictions(&preds, &targets).map_err(|e| e.to_string())?;
                for p in &matched.pairs {
                    let tg = &targets[p.target];
                    let mesh = local.get(tg.class).map_err(|e| e.to_string())?;
                    let hyp = preds[p.prediction].target_for(tg.class).map_err(|e| e.to_string())?;
                    pair_cds.push(
                        chamfer(&phi_clamped(mesh, &hyp).map_err(|e| e.to_string())?, &mesh.phi(tg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
                    );
                }
                inputs.push(SceneEvalInput { index: t.index, predictions: preds, targets, scale: t.scale });
            }
            let (report, _) = evaluate(&inputs, &lib, &EvalConfig::default()).map_err(|e| e.to_string())?;
            cds.push(pair_cds.iter().sum::<f64>() / pair_cds.len() as f64);
            aps.push(report.map.unwrap_or(0.0));
        }
        stats.push((mean_se(&cds), mean_se(&aps)));
    }
    for k in 0..sigmas.len() - 1 {
        let ((cd0, se0), (ap0, sa0)) = stats[k];
        let ((cd1, se1), (ap1, sa1)) = stats[k + 1];
        ensure(cd1 >= cd0 - (se0 * se0 + se1 * se1).sqrt(), || format!("mean CD fell from {cd0:e} to {cd1:e} between σ {} and {}", sigmas[k], sigmas[k + 1]))?;
        ensure(ap1 <= ap0 + (sa0 * sa0 + sa1 * sa1).sqrt(), || format!("mAP rose from {ap0} to {ap1} between σ {} and {}", sigmas[k], sigmas[k + 1]))?;
    }
    let summary: Vec<String> = sigmas.iter().zip(&stats).map(|(s, ((cd, _), (ap, _)))| format!("σ {s}: CD {cd:.2e} mAP {ap:.3}")).collect();
    Ok(format!("{} scenes × 200 seeds; {}", truths.len(), summary.join(", ")))
}

// 9 ------------------------------------------------------------------------

fn scene_audit() -> Check {
    let c = SceneConfig::default();
    let ranges = [
        ("forklift radius", c.forklift_radius_range, [5.0, 16.0]),
        ("gripper radius", c.gripper_radius_range, [3.5, 8.0]),
        ("gripper height", c.gripper_height_range, [0.5, 4.5]),
        ("pallet clearance", [c.pallet_min_clearance; 2], [1.5; 2]),
        ("vegetation spacing", [c.vegetation_min_spacing; 2], [1.0; 2]),
    ];
    for (name, got, want) in ranges {
        ensure(got == want, || format!("{name} is {got:?}, expected {want:?}"))?;
    }
    let lib = MeshLibrary::builtin(DEFAULT_SAMPLE_SEED).map_err(|e| e.to_string())?;
    let mut total = 0;
    for i in 0..100 {
        let scene = build_scene(&c, i, &lib).map_err(|e| e.to_string())?;
        let v = verify_scene(&scene, &lib).map_err(|e| e.to_string())?;
        total += v.len();
        ensure(v.is_empty(), || format!("scene {i}: {}", v.join("; ")))?;
    }
    Ok(format!("100 scenes, {total} violations"))
}

// 10 -----------------------------------------------------------------------

fn determinism(a: &Path, b: &Path) -> Check {
    let mut cfg = PipelineConfig::default();
    cfg.lidar.rays = 30_000;
    cfg.stub = StubConfig {
        position_sigma: 0.002,
        rotation_sigma_deg: 1.0,
        false_positive_rate: 0.5,
        confidence_model: ConfidenceModel::NoiseCoupled,
        ..StubConfig::noiseless()
    };
    cfg.lidar.augment.enabled = true;
    for dir in [a, b] {
        Pipeline::new(cfg.clone(), dir).and_then(|p| p.run_all(8)).map_err(|e| e.to_string())?;
    }
    let ma = read_json::<RunManifest>(&a.join(RUN_MANIFEST), "run_manifest").map_err(|e| e.to_string())?;
    let mb = read_json::<RunManifest>(&b.join(RUN_MANIFEST), "run_manifest").map_err(|e| e.to_string())?;
    ensure(ma.data == mb.data, || "run manifests differ".into())?;
    for f in &ma.data.files {
        let (x, y) = (std::fs::read(a.join(&f.path)), std::fs::read(b.join(&f.path)));
        ensure(matches!((&x, &y), (Ok(x), Ok(y)) if x == y), || format!("{} differs", f.path.display()))?;
    }
    let scans = read_json::<ScanManifest>(&a.join("scans/manifest.json"), "scan_manifest").map_err(|e| e.to_string())?;
    ensure(scans.data.scans.len() == 8, || "scan count".into())?;
    Ok(format!("{} artifacts byte-identical across two runs", ma.data.files.len()))
}

// 11 -----------------------------------------------------------------------

/// Precision envelope by definition: for each recall step, the best
/// precision at any rank reaching at least that recall.
fn definitional_ap(ranked: &[bool], g: usize) -> f64 {
    let mut tp = 0;
    let pr: Vec<(f64, f64)> = ranked
        .iter()
        .enumerate()
        .map(|(k, &hit)| {
            tp += hit as usize;
            (tp as f64 / g as f64, tp as f64 / (k + 1) as f64)
        })
        .collect();
    (1..=g).map(|step| pr.iter().filter(|(r, _)| *r >= step as f64 / g as f64 - 1e-15).map(|(_, p)| *p).fold(0.0, f64::max) / g as f64).sum()
}

fn ap_hand_case() -> Check {
    let ap = average_precision(&[(0.9, true), (0.6, false), (0.3, true)], 2).map_err(|e| e.to_string())?;
    ensure((ap - 5.0 / 6.0).abs() <= AP_TOL, || format!("AP {ap}"))?;
    ensure((definitional_ap(&[true, false, true], 2) - 5.0 / 6.0).abs() <= AP_TOL, || "oracle disagrees with 5/6".into())?;
    let mut cases = 0;
    for len in 1..=8usize {
        for mask in 0u32..1 << len {
            let ranked: Vec<bool> = (0..len).map(|i| mask >> i & 1 == 1).collect();
            let hits = ranked.iter().filter(|&&h| h).count();
            for g in hits.max(1)..=hits + 1 {
                let dets: Vec<(f64, bool)> = ranked.iter().enumerate().map(|(i, &h)| (-(i as f64), h)).collect();
                let a = average_precision(&dets, g).map_err(|e| e.to_string())?;
                ensure((a - definitional_ap(&ranked, g)).abs() <= AP_TOL, || format!("{ranked:?} with {g} GT: {a}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("AP = {ap:.12}; {cases} exhaustive cases agree"))
}

// --------------------------------------------------------------------------

#[test]
fn acceptance() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let dir = |name: &str| tmp.path().join(name);
    let criteria: Vec<Criterion> = vec![
        (1, "hungarian oracle equivalence", Some(LIMIT_HUNGARIAN), Box::new(hungarian_oracle)),
        (2, "symmetry loss invariants", Some(LIMIT_SYMMETRY), Box::new(symmetry_invariants)),
        (3, "chamfer correctness", Some(LIMIT_CHAMFER), Box::new(chamfer_oracle)),
        (4, "fps oracle equivalence", Some(LIMIT_FPS), Box::new(fps_oracle)),
        (5, "raycast analytics", Some(LIMIT_RAYCAST), Box::new(raycast_analytics)),
        (6, "noiseless end to end", Some(LIMIT_END_TO_END), Box::new(|| noiseless_end_to_end(&dir("e2e")))),
        (7, "threshold semantics", None, Box::new(threshold_semantics)),
        (8, "noise monotonicity", Some(LIMIT_MONOTONICITY), Box::new(|| noise_monotonicity(&dir("mono")))),
        (9, "scene constraint audit", None, Box::new(scene_audit)),
        (10, "run-all determinism", None, Box::new(|| determinism(&dir("run_a"), &dir("run_b")))),
        (11, "ap hand case", None, Box::new(ap_hand_case)),
    ];
    println!();
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        let t = Instant::now();
        let result = check();
        let took = t.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {:.2} s, limit {} s", took.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        println!("{tag} [{id:02}] {name:<30} {:>8.2} s  {detail}", took.as_secs_f64());
        if result.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
