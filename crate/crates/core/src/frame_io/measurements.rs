use std::path::Path;

use super::{read_file, write_atomic};
use crate::error::{Error, Result};

/// One row of the estimate table. A failed branch keeps its key, leaves the
/// numeric fields empty and carries the error message.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRow {
    pub frame_id: String,
    pub instance_id: String,
    pub diameter_mm: Option<f64>,
    pub lcsa_cm2: Option<f64>,
    pub crop_load: Option<f64>,
    pub slab_point_count: Option<usize>,
    pub flags: String,
    pub error: String,
}

impl MeasurementRow {
    pub fn failed(frame_id: &str, instance_id: &str, error: impl ToString) -> Self {
        Self {
            frame_id: frame_id.to_string(),
            instance_id: instance_id.to_string(),
            diameter_mm: None,
            lcsa_cm2: None,
            crop_load: None,
            slab_point_count: None,
            flags: String::new(),
            error: error.to_string(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_empty() && self.diameter_mm.is_some()
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.frame_id, &self.instance_id)
    }
}

pub const MEASUREMENT_HEADER: [&str; 8] = [
    "frame_id",
    "instance_id",
    "diameter_mm",
    "lcsa_cm2",
    "crop_load",
    "slab_point_count",
    "flags",
    "error",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn encode_measurements(rows: &[MeasurementRow]) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::parse("measurement table", e);
    wtr.write_record(MEASUREMENT_HEADER).map_err(err)?;
    for r in rows {
        wtr.write_record([
            r.frame_id.as_str(),
            r.instance_id.as_str(),
            &opt(r.diameter_mm),
            &opt(r.lcsa_cm2),
            &opt(r.crop_load),
            &opt(r.slab_point_count),
            &r.flags,
            &r.error,
        ])
        .map_err(err)?;
    }
    wtr.into_inner().map_err(|e| Error::parse("measurement table", e))
}

pub fn write_measurements(path: &Path, rows: &[MeasurementRow]) -> Result<()> {
    write_atomic(path, &encode_measurements(rows)?)
}

pub fn load_measurements(path: &Path) -> Result<Vec<MeasurementRow>> {
    let bytes = read_file(path)?;
    parse_measurements(&bytes, &path.display().to_string())
}

fn parse_opt<T: std::str::FromStr>(s: &str, field: &str, line: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|e| Error::parse(line, format!("{field} {s:?}: {e}")))
}

pub(crate) fn parse_measurements(bytes: &[u8], context: &str) -> Result<Vec<MeasurementRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::parse(context, e))?.clone();
    if header.iter().ne(MEASUREMENT_HEADER) {
        return Err(Error::parse(
            context,
            format!("unexpected header, want {}", MEASUREMENT_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::parse(context, e))?;
        let line = format!("{context}: row {}", i + 2);
        out.push(MeasurementRow {
            frame_id: row[0].to_string(),
            instance_id: row[1].to_string(),
            diameter_mm: parse_opt(&row[2], "diameter_mm", &line)?,
            lcsa_cm2: parse_opt(&row[3], "lcsa_cm2", &line)?,
            crop_load: parse_opt(&row[4], "crop_load", &line)?,
            slab_point_count: parse_opt(&row[5], "slab_point_count", &line)?,
            flags: row[6].to_string(),
            error: row[7].to_string(),
        });
    }
    Ok(out)
}
