use std::path::Path;

use super::{read_file, write_atomic};
use crate::error::{Error, Result};

/// Caliper measurement of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRecord {
    pub frame_id: String,
    pub instance_id: String,
    pub diameter_mm: f64,
    /// Left absent when the table does not carry it; consumers derive it from
    /// the diameter.
    pub crop_load: Option<f64>,
}

const HEADER_FULL: [&str; 4] = ["frame_id", "instance_id", "diameter_mm", "crop_load"];

pub fn load_truth(path: &Path) -> Result<Vec<TruthRecord>> {
    let bytes = read_file(path)?;
    parse_truth(&bytes, &path.display().to_string())
}

pub(crate) fn parse_truth(bytes: &[u8], context: &str) -> Result<Vec<TruthRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::parse(context, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != HEADER_FULL[..3] && names != HEADER_FULL {
        return Err(Error::parse(
            context,
            format!("unexpected header {:?}, want {}", names, HEADER_FULL.join(",")),
        ));
    }

    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::parse(context, e))?;
        let line = format!("{context}: row {}", i + 2);
        if row.len() < 3 || row.len() > 4 {
            return Err(Error::parse(line, format!("expected 3 or 4 fields, got {}", row.len())));
        }
        let diameter_mm: f64 = row[2]
            .parse()
            .map_err(|e| Error::parse(&line, format!("diameter_mm {:?}: {e}", &row[2])))?;
        if !(diameter_mm.is_finite() && diameter_mm > 0.0) {
            return Err(Error::validation(
                "diameter_mm",
                format!("{line}: must be positive, got {diameter_mm}"),
            ));
        }
        let crop_load = match row.get(3) {
            None | Some("") => None,
            Some(s) => {
                let c: f64 = s
                    .parse()
                    .map_err(|e| Error::parse(&line, format!("crop_load {s:?}: {e}")))?;
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::validation(
                        "crop_load",
                        format!("{line}: must be non-negative, got {c}"),
                    ));
                }
                Some(c)
            }
        };
        out.push(TruthRecord {
            frame_id: row[0].to_string(),
            instance_id: row[1].to_string(),
            diameter_mm,
            crop_load,
        });
    }
    Ok(out)
}

pub fn write_truth(path: &Path, records: &[TruthRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::parse(path.display().to_string(), e);
    wtr.write_record(HEADER_FULL).map_err(err)?;
    for r in records {
        let crop = r.crop_load.map(|c| c.to_string()).unwrap_or_default();
        wtr.write_record([
            r.frame_id.as_str(),
            r.instance_id.as_str(),
            &r.diameter_mm.to_string(),
            &crop,
        ])
        .map_err(err)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::parse(path.display().to_string(), e))?;
    write_atomic(path, &bytes)
}
