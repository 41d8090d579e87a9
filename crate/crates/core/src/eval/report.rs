use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::detection::DetectionSummary;
use super::regression::{mae, mape, pearson_r, rmse, PairedEntry, PairedSeries};
use crate::error::{Error, Result};
use crate::frame_io::{InstanceClass, MeasurementRow, TruthRecord};
use crate::limb_metrics::{crop_load, lcsa_from_diameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Diameter,
    CropLoad,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Diameter => "diameter",
            Quantity::CropLoad => "crop_load",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diameter" => Ok(Quantity::Diameter),
            "crop_load" | "crop-load" => Ok(Quantity::CropLoad),
            other => Err(Error::validation(
                "quantity",
                format!("unknown quantity {other:?}, want diameter or crop_load"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub quantity: Quantity,
    pub n: usize,
    pub rmse: f64,
    pub mae: f64,
    /// Absent when some actual value is zero.
    pub mape: Option<f64>,
    /// Absent when either side is constant.
    pub pearson_r: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_class_detection: BTreeMap<InstanceClass, DetectionSummary>,
    /// Successful predictions with no truth row.
    pub unmatched_predictions: usize,
    /// Truth rows with no successful prediction.
    pub unmatched_truth: usize,
    /// Prediction rows that carry an error.
    pub failed_predictions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

/// Inner-joins predictions and truth on `(frame_id, instance_id)` and scores
/// the chosen quantity. Truth rows without a crop load get `density × LCSA`.
pub fn geometry_report(
    predictions: &[MeasurementRow],
    truth: &[TruthRecord],
    quantity: Quantity,
    fruit_density_per_cm2: f64,
) -> Result<EvalReport> {
    let mut truth_by_key: BTreeMap<(&str, &str), &TruthRecord> = BTreeMap::new();
    for t in truth {
        if truth_by_key
            .insert((t.frame_id.as_str(), t.instance_id.as_str()), t)
            .is_some()
        {
            return Err(Error::validation(
                "truth",
                format!("duplicate key {}/{}", t.frame_id, t.instance_id),
            ));
        }
    }

    let mut pred_by_key: BTreeMap<(&str, &str), &MeasurementRow> = BTreeMap::new();
    let mut failed = 0;
    for p in predictions {
        if !p.is_ok() {
            failed += 1;
            continue;
        }
        if pred_by_key.insert(p.key(), p).is_some() {
            return Err(Error::validation(
                "predictions",
                format!("duplicate key {}/{}", p.frame_id, p.instance_id),
            ));
        }
    }

    let mut entries = Vec::new();
    for (key, p) in &pred_by_key {
        let Some(t) = truth_by_key.get(key) else { continue };
        let (predicted, actual) = match quantity {
            Quantity::Diameter => (p.diameter_mm.unwrap_or(f64::NAN), t.diameter_mm),
            Quantity::CropLoad => {
                let predicted = match p.crop_load {
                    Some(c) => c,
                    None => crop_load(
                        lcsa_from_diameter(p.diameter_mm.unwrap_or(f64::NAN))?,
                        fruit_density_per_cm2,
                    ),
                };
                let actual = match t.crop_load {
                    Some(c) => c,
                    None => crop_load(lcsa_from_diameter(t.diameter_mm)?, fruit_density_per_cm2),
                };
                (predicted, actual)
            }
        };
        entries.push(PairedEntry {
            key: (key.0.to_string(), key.1.to_string()),
            predicted,
            actual,
        });
    }
    if entries.is_empty() {
        return Err(Error::NoOverlap);
    }
    let n = entries.len();
    let series = PairedSeries::new(entries)?;
    Ok(EvalReport {
        quantity,
        n,
        rmse: rmse(&series)?,
        mae: mae(&series)?,
        mape: mape(&series).ok(),
        pearson_r: pearson_r(&series).ok(),
        per_class_detection: BTreeMap::new(),
        unmatched_predictions: pred_by_key.len() - n,
        unmatched_truth: truth_by_key.len() - n,
        failed_predictions: failed,
        generated_at: None,
    })
}
