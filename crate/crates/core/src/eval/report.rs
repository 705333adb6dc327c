use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ap::average_precision;
use super::matcher::{check_matching, match_for_eval, SceneMatch};
use super::stats::{geometric_stats, pair_errors, GeometricStats, PairErrors, Summary};
use super::{EvalConfig, EvalError};
use crate::matching::{class_weights, scene_loss, ClassWeights, LossBreakdown, Prediction};
use crate::mesh::{MeshLibrary, ObjectClass, ParamTarget, ScaleRecord, OBJECT_CLASSES};

/// Everything needed to evaluate one scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneEvalInput {
    pub index: u64,
    pub predictions: Vec<Prediction>,
    /// Normalized ground truth.
    pub targets: Vec<ParamTarget>,
    /// Absent only for empty scans, which cannot carry targets.
    pub scale: Option<ScaleRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneEval {
    pub index: u64,
    pub matching: SceneMatch,
    pub pairs: Vec<PairErrors>,
    pub num_targets: [usize; 4],
    pub loss: Option<LossBreakdown>,
}

/// Matches, checks and measures one scene. `lib` is the metric library; it
/// is rescaled into the scene's normalized frame here.
pub fn evaluate_scene(input: &SceneEvalInput, lib: &MeshLibrary, weights: &ClassWeights, cfg: &EvalConfig) -> Result<SceneEval, EvalError> {
    let mut num_targets = [0usize; 4];
    for t in &input.targets {
        num_targets[t.class.index()] += 1;
    }
    let Some(scale) = input.scale else {
        if !input.targets.is_empty() {
            return Err(EvalError::Invariant(format!("scene {} has targets but no scale record", input.index)));
        }
        let matching = SceneMatch { detections: super::matcher::extract_detections(&input.predictions, cfg), false_negatives: vec![] };
        return Ok(SceneEval { index: input.index, matching, pairs: vec![], num_targets, loss: None });
    };
    let local = lib.normalized(&scale);
    let matching = match_for_eval(&input.predictions, &input.targets, &local, cfg)?;
    check_matching(&matching, &input.targets, cfg)?;
    let pairs = matching
        .true_positives()
        .map(|d| {
            let t = &input.targets[d.target.expect("true positive")];
            let p = input.predictions[d.query].target_for(d.class)?;
            Ok(pair_errors(input.index, &p, t, local.get(t.class)?, &scale))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let loss =
        if input.predictions.len() >= input.targets.len() { Some(scene_loss(&input.predictions, &input.targets, weights, &local)?.normalized) } else { None };
    Ok(SceneEval { index: input.index, matching, pairs, num_targets, loss })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: ObjectClass,
    pub num_ground_truth: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// Absent when the class has no ground truth.
    pub ap: Option<f64>,
    pub geometry: GeometricStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scenes: usize,
    pub cd_threshold: f64,
    pub classes: Vec<ClassReport>,
    /// Mean over classes with ground truth.
    pub map: Option<f64>,
    /// Scene-averaged set-prediction loss of the same predictions.
    pub mean_loss: Option<LossBreakdown>,
}

impl EvalReport {
    pub fn class(&self, c: ObjectClass) -> Option<&ClassReport> {
        self.classes.iter().find(|r| r.class == c)
    }

    pub fn totals(&self) -> (usize, usize, usize) {
        self.classes.iter().fold((0, 0, 0), |a, r| (a.0 + r.true_positives, a.1 + r.false_positives, a.2 + r.false_negatives))
    }

    /// Aligned text table: metric rows by class columns.
    pub fn to_table(&self) -> String {
        let cols: Vec<String> = OBJECT_CLASSES.iter().map(|c| c.display_name().to_string()).collect();
        let mut rows: Vec<(String, Vec<String>)> = Vec::new();
        type Metric = (&'static str, fn(&GeometricStats) -> Option<Summary>, bool);
        let metrics: [Metric; 4] = [
            ("l2 [m]", |g| g.l2_m, false),
            ("Geodesic [deg]", |g| g.geodesic_deg, false),
            ("Yaw [deg]", |g| g.yaw_deg, false),
            ("Opening [deg]", |g| g.opening_deg, true),
        ];
        for (name, f, opening_only) in metrics {
            let cells = OBJECT_CLASSES
                .iter()
                .map(|&c| {
                    if opening_only && !c.has_opening() {
                        return "--".to_string();
                    }
                    self.class(c).and_then(|r| f(&r.geometry)).map_or("n/a".into(), fmt_summary)
                })
                .collect();
            rows.push((name.into(), cells));
        }
        rows.push(("Det. (AP)".into(), OBJECT_CLASSES.iter().map(|&c| self.class(c).and_then(|r| r.ap).map_or("n/a".into(), |a| format!("{a:.3}"))).collect()));
        rows.push((
            "TP / FP / FN".into(),
            OBJECT_CLASSES
                .iter()
                .map(|&c| self.class(c).map_or("n/a".into(), |r| format!("{} / {} / {}", r.true_positives, r.false_positives, r.false_negatives)))
                .collect(),
        ));
        let mut out = render(&["Metric".to_string()].into_iter().chain(cols).collect::<Vec<_>>(), &rows);
        let _ = writeln!(out, "mAP = {}", self.map.map_or("n/a".into(), |m| format!("{m:.3}")));
        out
    }
}

pub(crate) fn fmt_summary(s: Summary) -> String {
    format!("{:.3} (± {:.3})", s.mean, s.std)
}

pub(crate) fn render(header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let ncol = header.len();
    let mut width = vec![0usize; ncol];
    for (i, h) in header.iter().enumerate() {
        width[i] = h.chars().count();
    }
    for (name, cells) in rows {
        width[0] = width[0].max(name.chars().count());
        for (i, c) in cells.iter().enumerate() {
            width[i + 1] = width[i + 1].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let pad = width[i] - c.chars().count();
            s.push_str(c);
            if i + 1 < ncol {
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(String::as_str).collect());
    out.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * (ncol - 1)));
    out.push('\n');
    for (name, cells) in rows {
        out.push_str(&line(std::iter::once(name.as_str()).chain(cells.iter().map(String::as_str)).collect()));
    }
    out
}

/// Sequential reduction of scene results into a report.
pub fn aggregate(scenes: &[SceneEval], cfg: &EvalConfig) -> EvalReport {
    let mut classes = Vec::new();
    for c in OBJECT_CLASSES {
        let mut dets = Vec::new();
        let (mut gt, mut tp, mut fp, mut fneg) = (0, 0, 0, 0);
        for s in scenes {
            gt += s.num_targets[c.index()];
            for d in s.matching.detections.iter().filter(|d| d.class == c) {
                dets.push((d.confidence, d.is_true_positive()));
                if d.is_true_positive() {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        fneg += gt - tp;
        let ap = match average_precision(&dets, gt) {
            Ok(a) => Some(a),
            Err(_) => {
                log::warn!("class {c} has no ground truth; excluded from mAP");
                None
            }
        };
        let geometry = geometric_stats(scenes.iter().flat_map(|s| s.pairs.iter()).filter(|p| p.class == c));
        classes.push(ClassReport { class: c, num_ground_truth: gt, true_positives: tp, false_positives: fp, false_negatives: fneg, ap, geometry });
    }
    let aps: Vec<f64> = classes.iter().filter_map(|r| r.ap).collect();
    let map = (!aps.is_empty()).then(|| aps.iter().sum::<f64>() / aps.len() as f64);
    let losses: Vec<&LossBreakdown> = scenes.iter().filter_map(|s| s.loss.as_ref()).collect();
    let mean_loss = (!losses.is_empty()).then(|| {
        let n = losses.len() as f64;
        let mean = |f: fn(&LossBreakdown) -> f64| losses.iter().map(|l| f(l)).sum::<f64>() / n;
        LossBreakdown {
            cross_entropy: mean(|l| l.cross_entropy),
            param_loss: mean(|l| l.param_loss),
            chamfer_loss: mean(|l| l.chamfer_loss),
            total: mean(|l| l.total),
        }
    });
    EvalReport { scenes: scenes.len(), cd_threshold: cfg.cd_threshold, classes, map, mean_loss }
}

/// Inverse-frequency weights for a dataset, uniform when some class is absent.
pub fn dataset_weights(inputs: &[SceneEvalInput]) -> ClassWeights {
    let mut counts = [0u64; 4];
    for s in inputs {
        for t in &s.targets {
            counts[t.class.index()] += 1;
        }
        counts[0] += s.predictions.len().saturating_sub(s.targets.len()) as u64;
    }
    class_weights(counts).unwrap_or_else(|e| {
        log::warn!("using uniform class weights: {e}");
        ClassWeights::default()
    })
}

/// Evaluates scenes in parallel, then reduces in scene order.
pub fn evaluate(inputs: &[SceneEvalInput], lib: &MeshLibrary, cfg: &EvalConfig) -> Result<(EvalReport, Vec<SceneEval>), EvalError> {
    cfg.validate()?;
    let weights = dataset_weights(inputs);
    let scenes: Vec<SceneEval> = inputs.par_iter().map(|s| evaluate_scene(s, lib, &weights, cfg)).collect::<Result<_, _>>()?;
    Ok((aggregate(&scenes, cfg), scenes))
}

#[derive(Serialize)]
struct ErrorRow {
    scene: u64,
    class: &'static str,
    l2_m: f64,
    geodesic_deg: f64,
    yaw_deg: Option<f64>,
    opening_deg: Option<f64>,
}

/// Per-pair error distributions as CSV, one row per true positive.
pub fn errors_csv(scenes: &[SceneEval]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in scenes.iter().flat_map(|s| &s.pairs) {
        w.serialize(ErrorRow {
            scene: p.scene,
            class: p.class.name(),
            l2_m: p.l2_m,
            geodesic_deg: p.geodesic_deg,
            yaw_deg: p.yaw_deg,
            opening_deg: p.opening_deg,
        })
        .map_err(|e| EvalError::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EvalError::Format(e.to_string()))
}
