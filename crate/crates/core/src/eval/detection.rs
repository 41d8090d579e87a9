use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::matching::{match_instances, MatchCounts, ScoredMatch};
use crate::error::{Error, Result};
use crate::frame_io::{FrameAnnotations, InstanceClass};

/// IoU thresholds 0.50, 0.55, …, 0.95.
pub const AP_RANGE_THRESHOLDS: [f64; 10] = [0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

/// `tp / (tp + fp)`, or 0 with no predictions.
pub fn precision(c: &MatchCounts) -> f64 {
    let d = c.tp + c.fp;
    if d == 0 { 0.0 } else { c.tp as f64 / d as f64 }
}

/// `tp / (tp + fn)`, or 0 with no truths.
pub fn recall(c: &MatchCounts) -> f64 {
    let d = c.tp + c.fn_;
    if d == 0 { 0.0 } else { c.tp as f64 / d as f64 }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    let s = precision + recall;
    if s == 0.0 { 0.0 } else { 2.0 * precision * recall / s }
}

/// Area under the all-point interpolated precision-recall curve.
///
/// Predictions are ranked by descending score (stable, so equal scores keep
/// the caller's order). Precision at each recall level is replaced by the
/// maximum precision at any higher recall before integrating over [0, 1].
pub fn average_precision(matched: &[ScoredMatch], n_truth: usize) -> Result<f64> {
    if n_truth == 0 {
        return Err(Error::NoTruth);
    }
    let mut ranked = matched.to_vec();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut recalls = Vec::with_capacity(ranked.len());
    let mut precisions = Vec::with_capacity(ranked.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for m in &ranked {
        if m.is_tp { tp += 1 } else { fp += 1 }
        recalls.push(tp as f64 / n_truth as f64);
        precisions.push(tp as f64 / (tp + fp) as f64);
    }
    for i in (0..precisions.len().saturating_sub(1)).rev() {
        precisions[i] = precisions[i].max(precisions[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in recalls.iter().zip(&precisions) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    Ok(ap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub n_truth: usize,
    pub n_pred: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// AP at the report's IoU threshold; absent for a class without truths.
    pub ap: Option<f64>,
    /// Mean AP over IoU thresholds 0.50:0.05:0.95.
    pub ap_50_95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrRow {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationReport {
    pub iou_threshold: f64,
    pub frames: usize,
    pub per_class_detection: BTreeMap<InstanceClass, DetectionSummary>,
    /// Precision and recall pooled over classes at each IoU threshold.
    #[serde(skip)]
    pub pr_table: Vec<PrRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

struct ClassPass {
    counts: MatchCounts,
    ranked: Vec<ScoredMatch>,
    n_truth: usize,
}

fn class_pass(
    frames: &[(&FrameAnnotations, &FrameAnnotations)],
    threshold: f64,
    class: InstanceClass,
) -> Result<ClassPass> {
    let mut counts = MatchCounts::default();
    let mut keyed: Vec<(f64, &str, String, bool)> = Vec::new();
    let mut n_truth = 0;
    for (pred, truth) in frames {
        let (c, matches) = match_instances(&pred.instances, &truth.instances, threshold, class)?;
        counts += c;
        n_truth += truth.of_class(class).count();
        keyed.extend(
            matches
                .into_iter()
                .map(|m| (m.score, pred.frame_id.as_str(), m.pred_id.clone(), m.is_tp())),
        );
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)).then_with(|| a.2.cmp(&b.2)));
    Ok(ClassPass {
        counts,
        ranked: keyed
            .into_iter()
            .map(|(score, _, _, is_tp)| ScoredMatch { score, is_tp })
            .collect(),
        n_truth,
    })
}

/// Pairs prediction and truth frames by `frame_id` and scores every class.
/// The two sides must cover exactly the same frames.
pub fn evaluate_segmentation(
    preds: &[FrameAnnotations],
    truths: &[FrameAnnotations],
    iou_threshold: f64,
) -> Result<SegmentationReport> {
    let pred_by_id: BTreeMap<&str, &FrameAnnotations> =
        preds.iter().map(|f| (f.frame_id.as_str(), f)).collect();
    let truth_by_id: BTreeMap<&str, &FrameAnnotations> =
        truths.iter().map(|f| (f.frame_id.as_str(), f)).collect();
    if pred_by_id.len() != preds.len() || truth_by_id.len() != truths.len() {
        return Err(Error::validation("frame_id", "duplicate frame ids"));
    }
    let pk: BTreeSet<&str> = pred_by_id.keys().copied().collect();
    let tk: BTreeSet<&str> = truth_by_id.keys().copied().collect();
    if pk != tk {
        let missing: Vec<&str> = tk.symmetric_difference(&pk).copied().collect();
        return Err(Error::validation(
            "frame_id",
            format!("prediction and truth frame sets differ: {missing:?}"),
        ));
    }
    let frames: Vec<(&FrameAnnotations, &FrameAnnotations)> =
        tk.iter().map(|id| (pred_by_id[id], truth_by_id[id])).collect();

    let mut per_class = BTreeMap::new();
    for class in InstanceClass::ALL {
        let main = class_pass(&frames, iou_threshold, class)?;
        let p = precision(&main.counts);
        let r = recall(&main.counts);
        let (ap, ap_50_95) = if main.n_truth == 0 {
            (None, None)
        } else {
            let mut sum = 0.0;
            for t in AP_RANGE_THRESHOLDS {
                let pass = class_pass(&frames, t, class)?;
                sum += average_precision(&pass.ranked, pass.n_truth)?;
            }
            (
                Some(average_precision(&main.ranked, main.n_truth)?),
                Some(sum / AP_RANGE_THRESHOLDS.len() as f64),
            )
        };
        per_class.insert(
            class,
            DetectionSummary {
                n_truth: main.n_truth,
                n_pred: main.counts.tp + main.counts.fp,
                tp: main.counts.tp,
                fp: main.counts.fp,
                fn_: main.counts.fn_,
                precision: p,
                recall: r,
                f1: f1(p, r),
                ap,
                ap_50_95,
            },
        );
    }

    let mut pr_table = Vec::new();
    for t in AP_RANGE_THRESHOLDS {
        let mut pooled = MatchCounts::default();
        for class in InstanceClass::ALL {
            pooled += class_pass(&frames, t, class)?.counts;
        }
        pr_table.push(PrRow {
            threshold: t,
            precision: precision(&pooled),
            recall: recall(&pooled),
        });
    }

    Ok(SegmentationReport {
        iou_threshold,
        frames: frames.len(),
        per_class_detection: per_class,
        pr_table,
        generated_at: None,
    })
}
