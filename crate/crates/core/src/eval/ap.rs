use super::EvalError;

/// All-point interpolated average precision.
///
/// `detections` holds `(confidence, is_true_positive)`; they are ranked by
/// descending confidence with a stable sort, so equal confidences keep their
/// input order. Precision is replaced by its running maximum from the right
/// before integrating over recall.
pub fn average_precision(detections: &[(f64, bool)], num_ground_truth: usize) -> Result<f64, EvalError> {
    if num_ground_truth == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    let mut ranked: Vec<(f64, bool)> = detections.to_vec();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let n = num_ground_truth as f64;
    let mut tp = 0usize;
    let mut recall = Vec::with_capacity(ranked.len());
    let mut precision = Vec::with_capacity(ranked.len());
    for (k, &(_, hit)) in ranked.iter().enumerate() {
        tp += hit as usize;
        recall.push(tp as f64 / n);
        precision.push(tp as f64 / (k + 1) as f64);
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in recall.iter().zip(&precision) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    Ok(ap.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Definition-level oracle: every true positive contributes one recall
    // step of 1/G times the best precision reachable at or after its rank.
    fn oracle(ranked: &[bool], g: usize) -> f64 {
        let prec: Vec<f64> = (0..ranked.len()).map(|k| ranked[..=k].iter().filter(|&&b| b).count() as f64 / (k + 1) as f64).collect();
        (0..ranked.len()).filter(|&k| ranked[k]).map(|k| prec[k..].iter().cloned().fold(0.0, f64::max) / g as f64).sum()
    }

    #[test]
    fn hand_cases() {
        assert_eq!(average_precision(&[(0.9, true), (0.2, true)], 2).unwrap(), 1.0);
        assert_eq!(average_precision(&[(0.5, false)], 1).unwrap(), 0.0);
        let ap = average_precision(&[(0.9, true), (0.8, false), (0.7, true)], 2).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(average_precision(&[], 3).unwrap(), 0.0);
        assert!(matches!(average_precision(&[(0.1, false)], 0), Err(EvalError::NoGroundTruth)));
    }

    #[test]
    fn exhaustive_small_cases() {
        for len in 0..=8usize {
            for mask in 0u32..(1 << len) {
                let ranked: Vec<bool> = (0..len).map(|i| mask >> i & 1 == 1).collect();
                let tps = ranked.iter().filter(|&&b| b).count();
                for g in tps.max(1)..=tps + 2 {
                    let dets: Vec<(f64, bool)> = ranked.iter().enumerate().map(|(i, &b)| (1.0 - i as f64 * 0.1, b)).collect();
                    let ap = average_precision(&dets, g).unwrap();
                    assert!((ap - oracle(&ranked, g)).abs() < 1e-12, "{ranked:?} g={g}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rank_only_dependence(hits in proptest::collection::vec(any::<bool>(), 1..30), extra in 0usize..4, scale in 0.1f64..10.0) {
            let g = hits.iter().filter(|&&b| b).count() + extra;
            prop_assume!(g > 0);
            let dets: Vec<(f64, bool)> = hits.iter().enumerate().map(|(i, &b)| (1.0 / (1.0 + i as f64), b)).collect();
            let mapped: Vec<(f64, bool)> = dets.iter().map(|&(c, b)| ((scale * c).exp(), b)).collect();
            let a = average_precision(&dets, g).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert_eq!(a, average_precision(&mapped, g).unwrap());
        }
    }
}
