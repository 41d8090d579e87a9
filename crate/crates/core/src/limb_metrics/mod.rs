//! Junction localisation, diameter measurement at a fixed offset along the
//! branch, and conversion to limb cross-sectional area and crop-load.

mod crop;
mod diameter;
mod junction;
mod morphology;
mod slab;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use crop::{crop_load, lcsa_from_diameter, DEFAULT_FRUIT_DENSITY_PER_CM2};
pub use diameter::{
    estimate_diameter, percentile_sorted, robust_span, SpanMethod, MIN_DIAMETER_POINTS,
    PERCENTILE_MIN_POINTS,
};
pub use junction::locate_junction;
pub use morphology::perturb_mask;
pub use slab::{measurement_locus, slab_points, SLAB_WIDEN_STEP_MM};

use crate::cloud_geom::{branch_axis, metric_direction, AxisMode, PointCloud, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    /// Distance from the trunk-branch junction to the measurement plane.
    pub junction_offset_mm: f64,
    pub slab_half_width_mm: f64,
    pub slab_max_half_width_mm: f64,
    pub min_slab_points: usize,
    pub span_low_pct: f64,
    pub span_high_pct: f64,
    pub span_method: SpanMethod,
    pub fruit_density_per_cm2: f64,
    pub axis_mode: AxisMode,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            junction_offset_mm: 30.0,
            slab_half_width_mm: 5.0,
            slab_max_half_width_mm: 15.0,
            min_slab_points: 15,
            span_low_pct: 2.5,
            span_high_pct: 97.5,
            span_method: SpanMethod::default(),
            fruit_density_per_cm2: DEFAULT_FRUIT_DENSITY_PER_CM2,
            axis_mode: AxisMode::Metric,
        }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.junction_offset_mm.is_finite() && self.junction_offset_mm >= 0.0) {
            return Err(Error::validation("junction_offset_mm", "must be finite and non-negative"));
        }
        if !(self.slab_half_width_mm > 0.0 && self.slab_half_width_mm <= self.slab_max_half_width_mm)
            || !self.slab_max_half_width_mm.is_finite()
        {
            return Err(Error::validation(
                "slab_half_width_mm",
                "need 0 < slab_half_width_mm <= slab_max_half_width_mm",
            ));
        }
        if !(0.0 <= self.span_low_pct
            && self.span_low_pct < self.span_high_pct
            && self.span_high_pct <= 100.0)
        {
            return Err(Error::validation(
                "span_low_pct",
                "need 0 <= span_low_pct < span_high_pct <= 100",
            ));
        }
        if self.span_method == SpanMethod::Extrapolated
            && (self.span_low_pct > 12.5 || self.span_high_pct < 87.5)
        {
            return Err(Error::validation(
                "span_method",
                "tail extrapolation needs span_low_pct <= 12.5 and span_high_pct >= 87.5",
            ));
        }
        if self.min_slab_points < MIN_DIAMETER_POINTS {
            return Err(Error::validation("min_slab_points", "must be at least 4"));
        }
        if !(self.fruit_density_per_cm2.is_finite() && self.fruit_density_per_cm2 > 0.0) {
            return Err(Error::validation("fruit_density_per_cm2", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LimbFlag {
    /// The slab had to be widened past its initial half-width.
    WidenedSlab,
    /// Fewer than 20 slab points; diameter is max − min.
    SparseFallbackMinMax,
    /// No trunk points; junction taken at the branch's axial extreme.
    NoTrunkInFrame,
}

impl fmt::Display for LimbFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimbFlag::WidenedSlab => "WidenedSlab",
            LimbFlag::SparseFallbackMinMax => "SparseFallbackMinMax",
            LimbFlag::NoTrunkInFrame => "NoTrunkInFrame",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimbMeasurement {
    pub instance_id: String,
    pub junction: Vec3,
    /// Unit branch direction pointing away from the trunk.
    pub axis: Vec3,
    pub locus: Vec3,
    pub diameter_mm: f64,
    pub lcsa_cm2: f64,
    /// Target fruit count; fractional.
    pub crop_load: f64,
    pub slab_point_count: usize,
    pub slab_half_width_mm: f64,
    pub flags: BTreeSet<LimbFlag>,
}

impl LimbMeasurement {
    pub fn flags_string(&self) -> String {
        self.flags
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Full per-branch measurement: axis, junction, locus, slab, diameter, LCSA
/// and crop-load.
pub fn measure_limb(
    instance_id: &str,
    branch: &PointCloud,
    trunk: &PointCloud,
    config: &MeasureConfig,
) -> Result<LimbMeasurement> {
    config.validate()?;
    if branch.len() < config.min_slab_points {
        return Err(Error::InsufficientPoints {
            needed: config.min_slab_points,
            found: branch.len(),
        });
    }
    let mut flags = BTreeSet::new();

    let (axes, params) = branch_axis(branch, config.axis_mode)?;
    let direction = metric_direction(&axes, &params, config.axis_mode);

    let (junction, away) = if trunk.is_empty() {
        flags.insert(LimbFlag::NoTrunkInFrame);
        let mut best = (f64::INFINITY, 0usize);
        for (i, p) in branch.points().iter().enumerate() {
            let t = p.dot(&direction);
            if t < best.0 {
                best = (t, i);
            }
        }
        let j = branch.points()[best.1];
        (j, junction::orient_away(branch, &j, &direction))
    } else {
        locate_junction(branch, trunk, &direction)?
    };

    let locus = measurement_locus(&junction, &away, config);
    let (slab, half_width) = slab_points(branch, &locus, &away, config)?;
    if half_width > config.slab_half_width_mm {
        flags.insert(LimbFlag::WidenedSlab);
    }
    let (diameter_mm, diameter_flags) = estimate_diameter(&slab, &away, config)?;
    flags.extend(diameter_flags);

    let lcsa_cm2 = lcsa_from_diameter(diameter_mm)?;
    Ok(LimbMeasurement {
        instance_id: instance_id.to_string(),
        junction,
        axis: away,
        locus,
        diameter_mm,
        lcsa_cm2,
        crop_load: crop_load(lcsa_cm2, config.fruit_density_per_cm2),
        slab_point_count: slab.len(),
        slab_half_width_mm: half_width,
        flags,
    })
}
