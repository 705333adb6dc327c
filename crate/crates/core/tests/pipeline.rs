use std::path::Path;

use paramdet_core::pipeline::{read_json, Pipeline, PipelineConfig, PipelineError, ScanTruth, EVAL_DIR, PREDICTIONS_DIR, SCANS_DIR};
use paramdet_core::stub::{ConfidenceModel, StubConfig};

fn small() -> PipelineConfig {
    let mut c = PipelineConfig::default();
    c.lidar.rays = 30_000;
    c
}

fn read(dir: &Path, rel: &str) -> Vec<u8> {
    std::fs::read(dir.join(rel)).unwrap()
}

#[test]
fn zero_scenes_runs_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let (report, manifest) = Pipeline::new(small(), dir.path()).unwrap().run_all(0).unwrap();
    assert!(report.scenes == 0 && report.map.is_none());
    assert!(manifest.files.iter().any(|f| f.path.starts_with(EVAL_DIR)));
}

#[test]
fn stages_restart_from_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    Pipeline::new(small(), a.path()).unwrap().run_all(4).unwrap();

    Pipeline::new(small(), b.path()).unwrap().gen_scenes(4).unwrap();
    Pipeline::new(small(), b.path()).unwrap().scan().unwrap();
    // A fresh process picks up where the last stage stopped.
    let p = Pipeline::new(small(), b.path()).unwrap();
    p.predict_stub().unwrap();
    p.eval().unwrap();
    for f in ["eval/report.json", "eval/errors.csv", "scans/manifest.json", "predictions/manifest.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn noisy_stub_loses_precision() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small();
    c.stub = StubConfig { position_sigma: 0.05, rotation_sigma_deg: 10.0, confidence_model: ConfidenceModel::NoiseCoupled, ..StubConfig::noiseless() };
    let (report, _) = Pipeline::new(c, dir.path()).unwrap().run_all(6).unwrap();
    let map = report.map.expect("targets present");
    assert!(map < 1.0, "mAP {map}");
    assert!(report.classes.iter().all(|c| c.true_positives + c.false_negatives == c.num_ground_truth));
}

#[test]
fn invalid_config_is_a_config_error() {
    let mut c = small();
    c.eval.cd_threshold = -1.0;
    let e = Pipeline::new(c, "unused").unwrap_err();
    assert!(matches!(e, PipelineError::Config(_)));
    assert_eq!(e.exit_code(), 2);
    let e = PipelineConfig::from_toml("[lidar]\nbogus = 1\n").unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn missing_and_tampered_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(small(), dir.path()).unwrap();
    assert_eq!(p.eval().unwrap_err().exit_code(), 4);

    p.gen_scenes(3).unwrap();
    let scans = p.scan().unwrap();
    p.predict_stub().unwrap();

    // A scan without predictions breaks the stage contract.
    let manifest = dir.path().join(PREDICTIONS_DIR).join("manifest.json");
    let original = std::fs::read_to_string(&manifest).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&original).unwrap();
    v["data"]["files"].as_array_mut().unwrap().pop();
    std::fs::write(&manifest, v.to_string()).unwrap();
    assert_eq!(p.eval().unwrap_err().exit_code(), 3);
    std::fs::write(&manifest, original).unwrap();
    p.eval().unwrap();

    // Corrupted cloud bytes no longer match the recorded hash.
    let truth = read_json::<ScanTruth>(&dir.path().join(&scans.scans[0].path), "scan_truth").unwrap().data;
    let cloud = dir.path().join(&truth.cloud.path);
    let mut bytes = std::fs::read(&cloud).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&cloud, bytes).unwrap();
    assert!(cloud.starts_with(dir.path().join(SCANS_DIR)));
    assert_eq!(p.predict_stub().unwrap_err().exit_code(), 4);
}
