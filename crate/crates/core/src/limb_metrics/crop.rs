use crate::error::{Error, Result};

/// Fruit per cm² of limb cross-section used by commercial thinning practice.
pub const DEFAULT_FRUIT_DENSITY_PER_CM2: f64 = 6.0;

/// Limb cross-sectional area in cm² of a circular section with the given
/// diameter in millimetres.
pub fn lcsa_from_diameter(diameter_mm: f64) -> Result<f64> {
    if !(diameter_mm.is_finite() && diameter_mm > 0.0) {
        return Err(Error::NonPositiveDiameter(diameter_mm));
    }
    let d_cm = diameter_mm / 10.0;
    Ok(std::f64::consts::PI * d_cm * d_cm / 4.0)
}

/// Target fruit count for a limb. Fractional counts are kept.
pub fn crop_load(lcsa_cm2: f64, density_per_cm2: f64) -> f64 {
    density_per_cm2 * lcsa_cm2
}
