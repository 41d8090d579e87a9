use serde::{Deserialize, Serialize};

use super::{covariance3, principal_axes, NormalizationParams, PointCloud, PrincipalAxes, Vec3};
use crate::error::{Error, Result};

/// How the cloud is conditioned before its covariance is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisMode {
    /// Centre only; axes are physical directions in millimetre space.
    #[default]
    Metric,
    /// Full per-axis z-score first; axes live in standardized space.
    Standardized,
}

impl std::str::FromStr for AxisMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "metric" => Ok(AxisMode::Metric),
            "standardized" => Ok(AxisMode::Standardized),
            other => Err(format!("unknown axis mode {other:?}")),
        }
    }
}

/// Principal axes of a branch cloud. The first axis is the branch direction
/// estimate. In standardized mode use
/// [`NormalizationParams::destandardize_direction`] to get a metric direction.
pub fn branch_axis(cloud: &PointCloud, mode: AxisMode) -> Result<(PrincipalAxes, NormalizationParams)> {
    if cloud.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: cloud.len(),
        });
    }
    let params = NormalizationParams::fit(cloud.points())?;
    if params.degenerate_axes.len() == 3 {
        return Err(Error::DegenerateCloud);
    }
    let conditioned: Vec<Vec3> = match mode {
        AxisMode::Metric => cloud.points().iter().map(|p| p - params.mean).collect(),
        AxisMode::Standardized => cloud.points().iter().map(|p| params.apply(p)).collect(),
    };
    let axes = principal_axes(&covariance3(&conditioned)?)?;
    Ok((axes, params))
}

/// Metric branch direction under either mode.
pub(crate) fn metric_direction(axes: &PrincipalAxes, params: &NormalizationParams, mode: AxisMode) -> Vec3 {
    match mode {
        AxisMode::Metric => axes.primary(),
        AxisMode::Standardized => params.destandardize_direction(&axes.primary()),
    }
}
