use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::report::{aggregate, evaluate_scene, fmt_summary, render, EvalReport, SceneEvalInput};
use super::stats::Summary;
use super::{EvalConfig, EvalError};
use crate::lidar::{fps_reduce, range_filter, to_blender_convention, ScanCloud, DEFAULT_BUDGET, DEFAULT_MAX_RANGE};
use crate::matching::ClassWeights;
use crate::mesh::{MeshLibrary, ParamTarget, OBJECT_CLASSES};
use crate::sampling::stream_seed;
use crate::stub::{stub_predict, StubConfig};

/// Point counts compared by default.
pub const DEFAULT_COUNTS: [usize; 3] = [50_000, 200_000, 400_000];

/// A long accumulated sensor-frame capture with metric ground truth in the
/// same frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Capture {
    pub index: u64,
    pub cloud: ScanCloud,
    pub targets: Vec<ParamTarget>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    /// Accumulated point counts to compare.
    pub counts: Vec<usize>,
    pub budget: usize,
    pub max_range: f64,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { counts: DEFAULT_COUNTS.to_vec(), budget: DEFAULT_BUDGET, max_range: DEFAULT_MAX_RANGE, seed: 0 }
    }
}

pub const STAGES: [&str; 5] = ["preprocess", "fps", "stub", "match", "eval"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub points: usize,
    pub ms: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub points: usize,
    pub report: EvalReport,
    pub timings: Vec<StageTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccumulationReport {
    pub results: Vec<CountResult>,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs preprocessing, the stub and evaluation on the first `n` points of
/// every capture for each configured count. Scenes run sequentially so the
/// stage timings are not distorted by contention.
pub fn accumulation_study(
    captures: &[Capture],
    lib: &MeshLibrary,
    stub: &StubConfig,
    eval: &EvalConfig,
    cfg: &StudyConfig,
) -> Result<AccumulationReport, EvalError> {
    eval.validate()?;
    let max_opening = lib.get(crate::mesh::ObjectClass::Gripper)?.max_opening_deg();
    let mut results = Vec::new();
    for &n in &cfg.counts {
        let mut times: Vec<Vec<f64>> = vec![Vec::new(); STAGES.len()];
        let mut scenes = Vec::with_capacity(captures.len());
        for cap in captures {
            if cap.cloud.len() < n {
                return Err(EvalError::InsufficientPoints { scene: cap.index, have: cap.cloud.len(), need: n });
            }
            let t0 = Instant::now();
            let filtered = range_filter(&cap.cloud.truncated(n), cfg.max_range)?;
            times[0].push(ms_since(t0));

            let t1 = Instant::now();
            let reduced = fps_reduce(&filtered, cfg.budget, stream_seed(cfg.seed, cap.index))?;
            let (cloud, flip) = to_blender_convention(&reduced)?;
            times[1].push(ms_since(t1));

            let t2 = Instant::now();
            let bounds = cloud.bounds();
            let scale = crate::mesh::ScaleRecord::from_bounds(&bounds, max_opening)?;
            // The half turn is its own inverse.
            let targets: Vec<ParamTarget> = cap.targets.iter().map(|t| scale.normalize_target(&flip.to_original(t))).collect();
            let nb = crate::geometry::Aabb::from_points(&cloud.points.iter().map(|p| scale.normalize_point(p)).collect::<Vec<_>>());
            let predictions = stub_predict(&targets, &nb, stub, cap.index, max_opening)?;
            times[2].push(ms_since(t2));

            let input = SceneEvalInput { index: cap.index, predictions, targets, scale: Some(scale) };
            let t3 = Instant::now();
            let scene = evaluate_scene(&input, lib, &ClassWeights::default(), eval)?;
            times[3].push(ms_since(t3));
            scenes.push(scene);
        }
        let t4 = Instant::now();
        let report = aggregate(&scenes, eval);
        let agg = ms_since(t4);
        times[4] = vec![agg; 1];
        let timings = STAGES.iter().zip(&times).filter_map(|(s, v)| Summary::of(v).map(|ms| StageTiming { stage: s.to_string(), points: n, ms })).collect();
        results.push(CountResult { points: n, report, timings });
    }
    Ok(AccumulationReport { results })
}

fn count_label(n: usize) -> String {
    if n.is_multiple_of(1000) {
        format!("{}k", n / 1000)
    } else {
        n.to_string()
    }
}

impl AccumulationReport {
    /// Metric rows by (class, count) columns.
    pub fn to_table(&self) -> String {
        let mut header = vec!["Metric".to_string()];
        for c in OBJECT_CLASSES {
            for r in &self.results {
                header.push(format!("{} {}", c.display_name(), count_label(r.points)));
            }
        }
        let cell = |f: &dyn Fn(&super::report::ClassReport) -> Option<String>| -> Vec<String> {
            OBJECT_CLASSES
                .iter()
                .flat_map(|&c| self.results.iter().map(move |r| (c, r)))
                .map(|(c, r)| r.report.class(c).and_then(f).unwrap_or_else(|| "--".into()))
                .collect()
        };
        let mean = |s: Option<Summary>| s.map(|s| format!("{:.3}", s.mean));
        let rows = vec![
            ("l2 [m]".to_string(), cell(&|r| mean(r.geometry.l2_m))),
            ("Geodesic [deg]".to_string(), cell(&|r| mean(r.geometry.geodesic_deg))),
            ("Yaw [deg]".to_string(), cell(&|r| mean(r.geometry.yaw_deg))),
            ("Opening [deg]".to_string(), cell(&|r| mean(r.geometry.opening_deg))),
            ("Det. (AP)".to_string(), cell(&|r| r.ap.map(|a| format!("{a:.3}")))),
        ];
        let mut out = render(&header, &rows);
        out.push('\n');
        let mut th = vec!["Stage".to_string()];
        th.extend(self.results.iter().map(|r| format!("{} [ms]", count_label(r.points))));
        let trows: Vec<(String, Vec<String>)> = STAGES
            .iter()
            .map(|s| {
                let cells = self.results.iter().map(|r| r.timings.iter().find(|t| t.stage == *s).map_or("--".into(), |t| fmt_summary(t.ms))).collect();
                (s.to_string(), cells)
            })
            .collect();
        out.push_str(&render(&th, &trows));
        out
    }

    /// `stage,points,mean_ms,std_ms,count` rows.
    pub fn timings_csv(&self) -> Result<String, EvalError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["stage", "points", "mean_ms", "std_ms", "count"]).map_err(|e| EvalError::Format(e.to_string()))?;
        for r in &self.results {
            for t in &r.timings {
                w.write_record([t.stage.clone(), t.points.to_string(), format!("{:.6}", t.ms.mean), format!("{:.6}", t.ms.std), t.ms.count.to_string()])
                    .map_err(|e| EvalError::Format(e.to_string()))?;
            }
        }
        String::from_utf8(w.into_inner().map_err(|e| EvalError::Format(e.to_string()))?).map_err(|e| EvalError::Format(e.to_string()))
    }
}
