//! Segmentation and geometry evaluation: mask IoU, greedy instance matching,
//! precision/recall/F1/AP, and RMSE/MAE/MAPE/Pearson r over keyed pairs.

mod detection;
mod matching;
mod regression;
mod report;

pub use detection::{
    average_precision, evaluate_segmentation, f1, precision, recall, DetectionSummary,
    PrRow, SegmentationReport, AP_RANGE_THRESHOLDS,
};
pub use matching::{mask_iou, match_instances, MatchCounts, PredictionMatch, ScoredMatch};
pub use regression::{mae, mape, pearson_r, rmse, PairedEntry, PairedSeries};
pub use report::{geometry_report, EvalReport, Quantity};
