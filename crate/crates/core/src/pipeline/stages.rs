use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::artifact::{read_bytes, read_json, sha256_hex, text_header, write_atomic, write_json, FileEntry};
use super::{PipelineConfig, PipelineError};
use crate::eval::{accumulation_study, errors_csv, evaluate, AccumulationReport, Capture, EvalReport, SceneEvalInput, StudyConfig};
use crate::geometry::Pose;
use crate::lidar::{add_point_noise, cull_occluded_targets, fps_reduce, random_tilt, raycast_scan, Frame, RayTable, ScanCloud};
use crate::matching::Prediction;
use crate::mesh::procedural::DEFAULT_SAMPLE_SEED;
use crate::mesh::{LabeledTarget, MeshLibrary, ObjectClass, ScaleRecord};
use crate::sampling::stream_seed;
use crate::scene::{build_scene, dataset_split, SceneInstance, Splits};
use crate::stub::stub_predict;

// Sub-stream tags of the global seed.
const STREAM_SCENE: u64 = 1;
const STREAM_SPLIT: u64 = 2;
const STREAM_FPS: u64 = 3;
const STREAM_STUB: u64 = 4;
const STREAM_AUGMENT: u64 = 5;
const STREAM_BENCH: u64 = 6;

pub const SCENES_DIR: &str = "scenes";
pub const SCANS_DIR: &str = "scans";
pub const PREDICTIONS_DIR: &str = "predictions";
pub const EVAL_DIR: &str = "eval";
pub const BENCH_DIR: &str = "bench";
pub const RUN_MANIFEST: &str = "run_manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub count: usize,
    pub mesh_hash: String,
    pub splits: Splits,
    pub scenes: Vec<FileEntry>,
}

/// Ground truth of one scan: normalized targets that survived culling and
/// the record that maps them back to meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTruth {
    pub index: u64,
    pub scale: Option<ScaleRecord>,
    pub targets: Vec<LabeledTarget>,
    pub raw_hits: usize,
    pub points: usize,
    pub cloud: FileEntry,
    /// Noise σ and tilt angles when augmentation ran.
    pub noise_sigma: Option<f64>,
    pub tilt_deg: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanManifest {
    pub ray_table_sha256: String,
    pub scans: Vec<FileEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenePredictions {
    pub index: u64,
    pub predictions: Vec<Prediction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionManifest {
    pub files: Vec<FileEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub files: Vec<FileEntry>,
}

/// One configured pipeline writing below `out`.
#[derive(Debug)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub out: PathBuf,
    lib: MeshLibrary,
    hash: String,
}

fn rel(out: &Path, p: &Path) -> PathBuf {
    p.strip_prefix(out).unwrap_or(p).to_path_buf()
}

fn scene_file(index: u64) -> String {
    format!("scene_{index:05}")
}

impl Pipeline {
    pub fn new(config: PipelineConfig, out: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let lib = match &config.paths.mesh_dir {
            Some(dir) => MeshLibrary::from_dir(dir, DEFAULT_SAMPLE_SEED)?,
            None => MeshLibrary::builtin(DEFAULT_SAMPLE_SEED)?,
        };
        config.validate(lib.get(ObjectClass::Gripper)?.max_opening_deg())?;
        let hash = config.hash();
        Ok(Self { config, out: out.into(), lib, hash })
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    pub fn library(&self) -> &MeshLibrary {
        &self.lib
    }

    fn max_opening(&self) -> f64 {
        self.lib.get(ObjectClass::Gripper).map(|m| m.max_opening_deg()).unwrap_or(crate::mesh::DEFAULT_MAX_OPENING_DEG)
    }

    fn path(&self, parts: &[&str]) -> PathBuf {
        parts.iter().fold(self.out.clone(), |p, s| p.join(s))
    }

    fn note_upstream(&self, kind: &str, hash: &str) {
        if hash != self.hash {
            log::warn!("{kind} artifacts were produced with config {hash}, current config is {}", self.hash);
        }
    }

    fn write_entry<T: Serialize>(&self, path: &Path, kind: &str, data: &T) -> Result<FileEntry, PipelineError> {
        let sha256 = write_json(path, kind, &self.hash, data)?;
        Ok(FileEntry { path: rel(&self.out, path), sha256 })
    }

    fn scene_config(&self) -> crate::scene::SceneConfig {
        let mut c = self.config.scene.clone();
        c.rng_seed ^= stream_seed(self.config.seed, STREAM_SCENE);
        c
    }

    fn stub_config(&self) -> crate::stub::StubConfig {
        let mut c = self.config.stub;
        c.seed ^= stream_seed(self.config.seed, STREAM_STUB);
        c
    }

    /// Generates `count` scenes plus the split manifest.
    pub fn gen_scenes(&self, count: usize) -> Result<SceneManifest, PipelineError> {
        let cfg = self.scene_config();
        let scenes: Vec<FileEntry> = (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let scene = build_scene(&cfg, i, &self.lib)?;
                self.write_entry(&self.path(&[SCENES_DIR, &format!("{}.json", scene_file(i))]), "scene", &scene)
            })
            .collect::<Result<_, PipelineError>>()?;
        let splits = dataset_split(count, &self.config.split, stream_seed(self.config.seed, STREAM_SPLIT))?;
        let manifest = SceneManifest { count, mesh_hash: self.lib.content_hash(), splits, scenes };
        self.write_entry(&self.path(&[SCENES_DIR, "manifest.json"]), "scene_manifest", &manifest)?;
        log::info!("generated {count} scenes");
        Ok(manifest)
    }

    fn load_scenes(&self) -> Result<Vec<SceneInstance>, PipelineError> {
        let m = read_json::<SceneManifest>(&self.path(&[SCENES_DIR, "manifest.json"]), "scene_manifest")?;
        self.note_upstream("scene", &m.config_hash);
        if m.data.mesh_hash != self.lib.content_hash() {
            return Err(PipelineError::Config("scenes were generated with a different mesh library".into()));
        }
        m.data.scenes.par_iter().map(|e| Ok(read_json::<SceneInstance>(&self.out.join(&e.path), "scene")?.data)).collect()
    }

    fn ray_table(&self) -> Result<RayTable, PipelineError> {
        let l = &self.config.lidar;
        Ok(match &l.ray_table {
            Some(p) => RayTable::read_csv(std::fs::File::open(p).map_err(|e| PipelineError::Io(format!("{}: {e}", p.display())))?)?,
            None => RayTable::rosette(l.rays, l.fov_deg, l.rate_hz)?,
        })
    }

    /// Sensor-frame (simulation convention) cloud of one scene with hit ids.
    fn simulate(&self, scene: &SceneInstance, rays: &RayTable) -> Result<ScanCloud, PipelineError> {
        let geometry = scene.to_geometry(&self.lib)?;
        let world = raycast_scan(&geometry, rays, self.config.lidar.max_range)?;
        Ok(world.transformed(&scene.sensor.inverse(), Frame::SensorBlender))
    }

    fn scan_one(&self, scene: &SceneInstance, rays: &RayTable) -> Result<FileEntry, PipelineError> {
        let l = &self.config.lidar;
        let i = scene.index;
        let local = self.simulate(scene, rays)?;
        let raw_hits = local.len();
        let reduced = fps_reduce(&local, l.budget, stream_seed(stream_seed(self.config.seed, STREAM_FPS), i))?;
        let to_sensor: Pose = scene.sensor.inverse();
        let visible: Vec<LabeledTarget> = cull_occluded_targets(&scene.targets, &reduced, &l.cull)?
            .into_iter()
            .map(|t| LabeledTarget { instance_id: t.instance_id, target: t.target.transformed(&to_sensor) })
            .collect();

        let (mut cloud, scale, mut targets) = if reduced.is_empty() {
            if !visible.is_empty() {
                log::warn!("scene {i}: empty scan, dropping {} targets", visible.len());
            }
            (reduced, None, Vec::new())
        } else {
            let rec = ScaleRecord::from_bounds(&reduced.bounds(), self.max_opening())?;
            let mut c = reduced;
            c.points.iter_mut().for_each(|p| *p = rec.normalize_point(p));
            c.normalized = true;
            let t = visible.iter().map(|t| LabeledTarget { instance_id: t.instance_id, target: rec.normalize_target(&t.target) }).collect();
            (c, Some(rec), t)
        };

        let (mut noise_sigma, mut tilt_deg) = (None, None);
        if l.augment.enabled && !cloud.is_empty() {
            let seed = stream_seed(stream_seed(self.config.seed, STREAM_AUGMENT), i);
            let (noisy, sigma) = add_point_noise(&cloud, &l.augment.noise, seed)?;
            let plain: Vec<_> = targets.iter().map(|t: &LabeledTarget| t.target).collect();
            let (tilted, moved, tilt) = random_tilt(&noisy, &plain, l.augment.max_tilt_deg, seed ^ 1);
            for (t, m) in targets.iter_mut().zip(moved) {
                t.target = m;
            }
            cloud = tilted;
            noise_sigma = sigma;
            tilt_deg = Some([tilt.x_deg, tilt.y_deg]);
        }

        let mut bytes = Vec::new();
        cloud.write_binary(&mut bytes)?;
        let cloud_path = self.path(&[SCANS_DIR, &format!("{}.pdcl", scene_file(i))]);
        let cloud_entry = FileEntry { path: rel(&self.out, &cloud_path), sha256: write_atomic(&cloud_path, &bytes)? };
        let truth = ScanTruth { index: i, scale, targets, raw_hits, points: cloud.len(), cloud: cloud_entry, noise_sigma, tilt_deg };
        self.write_entry(&self.path(&[SCANS_DIR, &format!("{}.truth.json", scene_file(i))]), "scan_truth", &truth)
    }

    /// Raycasts, reduces, culls and normalizes every generated scene.
    pub fn scan(&self) -> Result<ScanManifest, PipelineError> {
        let scenes = self.load_scenes()?;
        let rays = self.ray_table()?;
        let mut table = Vec::new();
        rays.write_csv(&mut table)?;
        let scans = scenes.par_iter().map(|s| self.scan_one(s, &rays)).collect::<Result<Vec<_>, _>>()?;
        let manifest = ScanManifest { ray_table_sha256: sha256_hex(&table), scans };
        self.write_entry(&self.path(&[SCANS_DIR, "manifest.json"]), "scan_manifest", &manifest)?;
        log::info!("scanned {} scenes", manifest.scans.len());
        Ok(manifest)
    }

    fn load_truths(&self) -> Result<Vec<ScanTruth>, PipelineError> {
        let m = read_json::<ScanManifest>(&self.path(&[SCANS_DIR, "manifest.json"]), "scan_manifest")?;
        self.note_upstream("scan", &m.config_hash);
        m.data.scans.par_iter().map(|e| Ok(read_json::<ScanTruth>(&self.out.join(&e.path), "scan_truth")?.data)).collect()
    }

    fn load_cloud(&self, truth: &ScanTruth) -> Result<ScanCloud, PipelineError> {
        let bytes = read_bytes(&self.out.join(&truth.cloud.path))?;
        if sha256_hex(&bytes) != truth.cloud.sha256 {
            return Err(PipelineError::Io(format!("{} does not match its recorded hash", truth.cloud.path.display())));
        }
        Ok(ScanCloud::read_binary(bytes.as_slice())?)
    }

    /// Runs the detector stub on every scan.
    pub fn predict_stub(&self) -> Result<PredictionManifest, PipelineError> {
        let truths = self.load_truths()?;
        let stub = self.stub_config();
        let files = truths
            .par_iter()
            .map(|t| {
                let cloud = self.load_cloud(t)?;
                let targets: Vec<_> = t.targets.iter().map(|l| l.target).collect();
                let predictions = stub_predict(&targets, &cloud.bounds(), &stub, t.index, self.max_opening())?;
                let data = ScenePredictions { index: t.index, predictions };
                self.write_entry(&self.path(&[PREDICTIONS_DIR, &format!("{}.json", scene_file(t.index))]), "predictions", &data)
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        let manifest = PredictionManifest { files };
        self.write_entry(&self.path(&[PREDICTIONS_DIR, "manifest.json"]), "prediction_manifest", &manifest)?;
        log::info!("predicted {} scenes", manifest.files.len());
        Ok(manifest)
    }

    /// Matches predictions against truth and writes the report, the table
    /// and the per-pair error CSV.
    pub fn eval(&self) -> Result<EvalReport, PipelineError> {
        let truths = self.load_truths()?;
        let m = read_json::<PredictionManifest>(&self.path(&[PREDICTIONS_DIR, "manifest.json"]), "prediction_manifest")?;
        self.note_upstream("prediction", &m.config_hash);
        let preds: Vec<ScenePredictions> = m
            .data
            .files
            .par_iter()
            .map(|e| Ok(read_json::<ScenePredictions>(&self.out.join(&e.path), "predictions")?.data))
            .collect::<Result<_, PipelineError>>()?;
        let mut inputs = Vec::with_capacity(truths.len());
        for t in &truths {
            let p = preds.iter().find(|p| p.index == t.index).ok_or_else(|| PipelineError::Invariant(format!("no predictions for scene {}", t.index)))?;
            inputs.push(SceneEvalInput {
                index: t.index,
                predictions: p.predictions.clone(),
                targets: t.targets.iter().map(|l| l.target).collect(),
                scale: t.scale,
            });
        }
        let (report, scenes) = evaluate(&inputs, &self.lib, &self.config.eval)?;
        check_report(&report)?;
        self.write_entry(&self.path(&[EVAL_DIR, "report.json"]), "eval_report", &report)?;
        write_atomic(&self.path(&[EVAL_DIR, "report.txt"]), (text_header(&self.hash) + &report.to_table()).as_bytes())?;
        write_atomic(&self.path(&[EVAL_DIR, "errors.csv"]), (text_header(&self.hash) + &errors_csv(&scenes)?).as_bytes())?;
        Ok(report)
    }

    /// Dense captures of the first scenes in the real sensor convention,
    /// with enough hits for the largest requested count.
    pub fn captures(&self, counts: &[usize]) -> Result<Vec<Capture>, PipelineError> {
        let need = counts.iter().copied().max().unwrap_or(0);
        let scenes: Vec<SceneInstance> = self.load_scenes()?.into_iter().take(self.config.bench.scenes).collect();
        let l = &self.config.lidar;
        let flip = Pose::new(nalgebra::Vector3::zeros(), crate::geometry::UnitQuaternion::Z_FLIP);
        scenes
            .par_iter()
            .map(|scene| {
                let mut rays = need.max(1) * 2;
                loop {
                    let table = RayTable::rosette(rays, l.fov_deg, l.rate_hz)?;
                    let local = self.simulate(scene, &table)?;
                    if local.len() >= need {
                        let to_sensor = scene.sensor.inverse();
                        let mut cloud = local.transformed(&flip, Frame::SensorRos);
                        cloud.provenance = crate::lidar::Provenance::Ingested;
                        let targets = scene.targets.iter().map(|t| t.target.transformed(&to_sensor).transformed(&flip)).collect();
                        return Ok(Capture { index: scene.index, cloud, targets });
                    }
                    if local.is_empty() || rays > need * 64 {
                        return Err(PipelineError::Invariant(format!("scene {} yields too few hits for {need} points", scene.index)));
                    }
                    rays = (rays as f64 * need as f64 / local.len() as f64 * 1.1).ceil() as usize;
                }
            })
            .collect()
    }

    /// Accumulation study with per-stage timings. Timing files are not part
    /// of the hashed run artifacts.
    pub fn bench(&self, counts: Option<Vec<usize>>) -> Result<AccumulationReport, PipelineError> {
        let counts = counts.unwrap_or_else(|| self.config.bench.counts.clone());
        let captures = self.captures(&counts)?;
        let study =
            StudyConfig { counts, budget: self.config.lidar.budget, max_range: self.config.lidar.max_range, seed: stream_seed(self.config.seed, STREAM_BENCH) };
        let report = accumulation_study(&captures, &self.lib, &self.stub_config(), &self.config.eval, &study)?;
        self.write_entry(&self.path(&[BENCH_DIR, "accumulation.json"]), "accumulation_report", &report)?;
        write_atomic(&self.path(&[BENCH_DIR, "accumulation.txt"]), (text_header(&self.hash) + &report.to_table()).as_bytes())?;
        write_atomic(&self.path(&[BENCH_DIR, "timings.csv"]), (text_header(&self.hash) + &report.timings_csv()?).as_bytes())?;
        Ok(report)
    }

    /// All stages in order, then a manifest hashing every artifact.
    pub fn run_all(&self, count: usize) -> Result<(EvalReport, RunManifest), PipelineError> {
        self.gen_scenes(count)?;
        self.scan()?;
        self.predict_stub()?;
        let report = self.eval()?;
        let mut files = Vec::new();
        for dir in [SCENES_DIR, SCANS_DIR, PREDICTIONS_DIR, EVAL_DIR] {
            collect_files(&self.out, &self.out.join(dir), &mut files)?;
        }
        files.sort();
        let manifest = RunManifest { files };
        self.write_entry(&self.out.join(RUN_MANIFEST), "run_manifest", &manifest)?;
        Ok((report, manifest))
    }
}

fn collect_files(out: &Path, dir: &Path, acc: &mut Vec<FileEntry>) -> Result<(), PipelineError> {
    let rd = std::fs::read_dir(dir).map_err(|e| PipelineError::Io(format!("{}: {e}", dir.display())))?;
    for entry in rd {
        let p = entry.map_err(|e| PipelineError::Io(e.to_string()))?.path();
        if p.is_dir() {
            collect_files(out, &p, acc)?;
        } else {
            acc.push(FileEntry { path: rel(out, &p), sha256: sha256_hex(&read_bytes(&p)?) });
        }
    }
    Ok(())
}

/// Report-level assertions run on every evaluation.
pub fn check_report(r: &EvalReport) -> Result<(), PipelineError> {
    let aps: Vec<f64> = r.classes.iter().filter_map(|c| c.ap).collect();
    if aps.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(PipelineError::Invariant("AP outside [0, 1]".into()));
    }
    if let Some(m) = r.map {
        if (m - aps.iter().sum::<f64>() / aps.len() as f64).abs() > 1e-12 {
            return Err(PipelineError::Invariant("mAP differs from the mean of class APs".into()));
        }
    }
    for c in &r.classes {
        if c.true_positives + c.false_negatives != c.num_ground_truth {
            return Err(PipelineError::Invariant(format!("{}: TP + FN != ground truth count", c.class)));
        }
    }
    Ok(())
}
