use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::frame_io::{BitMask, InstanceAnnotation, InstanceClass};

/// Intersection over union of two equally sized masks; 0 when both are empty.
pub fn mask_iou(a: &BitMask, b: &BitMask) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl std::ops::AddAssign for MatchCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

/// Outcome for one prediction, in matching order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatch {
    pub pred_id: String,
    pub score: f64,
    pub truth_id: Option<String>,
    /// IoU with the matched truth; 0 for false positives.
    pub iou: f64,
}

impl PredictionMatch {
    pub fn is_tp(&self) -> bool {
        self.truth_id.is_some()
    }
}

/// Minimal record for ranking-based metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredMatch {
    pub score: f64,
    pub is_tp: bool,
}

fn by_score_then_id(a: &InstanceAnnotation, b: &InstanceAnnotation) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.instance_id.cmp(&b.instance_id))
}

/// One-to-one greedy matching of predictions to truths of `class`.
///
/// Predictions are visited by descending score (ties by id); each takes the
/// unmatched truth with the highest IoU at or above `iou_threshold` (ties by
/// truth id).
pub fn match_instances(
    preds: &[InstanceAnnotation],
    truths: &[InstanceAnnotation],
    iou_threshold: f64,
    class: InstanceClass,
) -> Result<(MatchCounts, Vec<PredictionMatch>)> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(Error::validation("iou_threshold", "must lie in (0, 1]"));
    }
    let mut preds: Vec<&InstanceAnnotation> = preds.iter().filter(|p| p.class == class).collect();
    preds.sort_by(|a, b| by_score_then_id(a, b));
    let mut truths: Vec<&InstanceAnnotation> = truths.iter().filter(|t| t.class == class).collect();
    truths.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    let mut taken = vec![false; truths.len()];
    let mut counts = MatchCounts::default();
    let mut out = Vec::with_capacity(preds.len());
    for p in preds {
        let mut best: Option<(usize, f64)> = None;
        for (ti, t) in truths.iter().enumerate() {
            if taken[ti] {
                continue;
            }
            let iou = mask_iou(&p.mask, &t.mask)?;
            // Truths are in id order, so strict > keeps the smallest id on ties.
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((ti, iou));
            }
        }
        match best {
            Some((ti, iou)) => {
                taken[ti] = true;
                counts.tp += 1;
                out.push(PredictionMatch {
                    pred_id: p.instance_id.clone(),
                    score: p.score,
                    truth_id: Some(truths[ti].instance_id.clone()),
                    iou,
                });
            }
            None => {
                counts.fp += 1;
                out.push(PredictionMatch {
                    pred_id: p.instance_id.clone(),
                    score: p.score,
                    truth_id: None,
                    iou: 0.0,
                });
            }
        }
    }
    counts.fn_ = taken.iter().filter(|&&t| !t).count();
    Ok((counts, out))
}
