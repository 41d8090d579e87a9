use super::{Mat3, Vec3};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Symmetric positive semidefinite 3×3 covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix {
    m: Mat3,
}

impl CovMatrix {
    /// Wraps `m` after checking symmetry and positive semidefiniteness
    /// (diagonal non-negative and all 2×2 / 3×3 principal minors within
    /// rounding of non-negative).
    pub fn new(m: Mat3) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("cov", "non-finite entry"));
        }
        let scale = m.amax();
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::validation("cov", "matrix is not symmetric"));
                }
            }
        }
        let tol = 1e-9 * m.trace().abs().max(scale);
        if (0..3).any(|i| m[(i, i)] < -tol) {
            return Err(Error::validation("cov", "negative variance on the diagonal"));
        }
        Ok(CovMatrix { m: symmetrize(&m) })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }
}

fn symmetrize(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

/// Sample covariance (divisor n − 1) of a point set.
pub fn covariance3(points: &[Vec3]) -> Result<CovMatrix> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: points.len(),
        });
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let mut m = Mat3::zeros();
    for p in points {
        let d = p - mean;
        for i in 0..3 {
            for j in i..3 {
                m[(i, j)] += d[i] * d[j];
            }
        }
    }
    for i in 0..3 {
        for j in i..3 {
            m[(i, j)] /= n - 1.0;
            m[(j, i)] = m[(i, j)];
        }
    }
    Ok(CovMatrix { m })
}

/// Orthonormal eigenvectors of a covariance with their eigenvalues, largest
/// first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAxes {
    pub directions: [Vec3; 3],
    pub variances: [f64; 3],
}

impl PrincipalAxes {
    pub fn primary(&self) -> Vec3 {
        self.directions[0]
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `1e-12 · ‖cov‖_F`. Each eigenvector is signed so that its first component
/// with magnitude above `1e-12` is positive.
pub fn principal_axes(cov: &CovMatrix) -> Result<PrincipalAxes> {
    let mut a = *cov.matrix();
    let mut v = Mat3::identity();
    let frob = a.norm();
    let tol = 1e-12 * frob;

    let off_norm = |a: &Mat3| {
        (2.0 * (a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2))).sqrt()
    };

    let mut converged = off_norm(&a) <= tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if theta.abs() > 1e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = Mat3::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            a = symmetrize(&(rot.transpose() * a * rot));
            // The rotation is chosen to annihilate (p, q) exactly.
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= rot;
        }
        sweeps += 1;
        converged = off_norm(&a) <= tol;
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));

    let mut directions = [Vec3::zeros(); 3];
    let mut variances = [0.0; 3];
    for (k, &i) in order.iter().enumerate() {
        let mut d: Vec3 = v.column(i).into();
        d.normalize_mut();
        if let Some(first) = d.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                d = -d;
            }
        }
        directions[k] = d;
        variances[k] = a[(i, i)].max(0.0);
    }
    Ok(PrincipalAxes {
        directions,
        variances,
    })
}
