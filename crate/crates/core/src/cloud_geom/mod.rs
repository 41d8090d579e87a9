//! Masked depth pixels to metric point clouds, and principal axes of those
//! clouds.

mod axis;
mod cloud;
mod normalize;
mod pca;

pub use axis::{branch_axis, AxisMode};
pub(crate) use axis::metric_direction;
pub use cloud::{backproject, PointCloud};
pub use normalize::{zscore, NormalizationParams};
pub use pca::{covariance3, principal_axes, CovMatrix, PrincipalAxes, JACOBI_MAX_SWEEPS};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
