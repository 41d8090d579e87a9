use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One predicted/actual pair keyed by `(frame_id, instance_id)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedEntry {
    pub key: (String, String),
    pub predicted: f64,
    pub actual: f64,
}

/// Paired values with unique keys.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairedSeries {
    entries: Vec<PairedEntry>,
}

impl PairedSeries {
    pub fn new(entries: Vec<PairedEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !e.predicted.is_finite() || !e.actual.is_finite() {
                return Err(Error::validation(
                    "value",
                    format!("non-finite value for {}/{}", e.key.0, e.key.1),
                ));
            }
            if !seen.insert(&e.key) {
                return Err(Error::validation(
                    "key",
                    format!("duplicate key {}/{}", e.key.0, e.key.1),
                ));
            }
        }
        Ok(Self { entries })
    }

    /// Builds a series with synthetic keys from `(predicted, actual)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(predicted, actual))| PairedEntry {
                    key: (String::new(), i.to_string()),
                    predicted,
                    actual,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[PairedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn non_empty(&self) -> Result<&[PairedEntry]> {
        if self.entries.is_empty() {
            Err(Error::EmptySeries)
        } else {
            Ok(&self.entries)
        }
    }
}

pub fn rmse(s: &PairedSeries) -> Result<f64> {
    let e = s.non_empty()?;
    let sse: f64 = e.iter().map(|p| (p.predicted - p.actual).powi(2)).sum();
    Ok((sse / e.len() as f64).sqrt())
}

pub fn mae(s: &PairedSeries) -> Result<f64> {
    let e = s.non_empty()?;
    Ok(e.iter().map(|p| (p.predicted - p.actual).abs()).sum::<f64>() / e.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(s: &PairedSeries) -> Result<f64> {
    let e = s.non_empty()?;
    let mut sum = 0.0;
    for (index, p) in e.iter().enumerate() {
        if p.actual == 0.0 {
            return Err(Error::ZeroActual { index });
        }
        sum += ((p.predicted - p.actual) / p.actual).abs();
    }
    Ok(100.0 * sum / e.len() as f64)
}

/// Pearson correlation from a single-pass co-moment accumulation.
pub fn pearson_r(s: &PairedSeries) -> Result<f64> {
    let e = s.non_empty()?;
    let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, p) in e.iter().enumerate() {
        let n = (i + 1) as f64;
        let dx = p.predicted - mx;
        let dy = p.actual - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (p.predicted - mx);
        syy += dy * (p.actual - my);
        sxy += dx * (p.actual - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
