//! Static (extrinsic) x-y-z Euler angles of a bone vector.
//!
//! A direction starting along +x is rolled by `alpha` about x, raised by
//! `beta` toward +z, then turned by `gamma` about z. The composite matrix is
//! `rm_z(gamma) * rm_y(beta) * rm_x(alpha)`. `beta` is an elevation, so
//! `rm_y` turns +x toward +z.
//!
//! Angles are recovered with two-argument arctangents so signs survive; the
//! arccos forms only give magnitudes.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use super::{quaternion_from_axis_angle, RotationError};
use crate::quaternion::Quaternion;
use crate::Vec3;

/// Relative size below which a projection is treated as degenerate.
pub const DEGENERATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    /// Roll about x, radians.
    pub alpha: f64,
    /// Elevation about y, radians.
    pub beta: f64,
    /// Azimuth about z, radians.
    pub gamma: f64,
}

fn wrap(angle: f64) -> f64 {
    if angle <= -PI {
        angle + 2.0 * PI
    } else {
        angle
    }
}

pub fn rm_x(alpha: f64) -> Matrix3<f64> {
    let (s, c) = alpha.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rm_y(beta: f64) -> Matrix3<f64> {
    let (s, c) = beta.sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

pub fn rm_z(gamma: f64) -> Matrix3<f64> {
    let (s, c) = gamma.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        rm_z(self.gamma) * rm_y(self.beta) * rm_x(self.alpha)
    }

    /// Product of the three elemental axis-angle quaternions.
    pub fn to_quaternion(&self) -> Quaternion {
        let qx = quaternion_from_axis_angle(Vec3::x(), self.alpha).expect("unit axis");
        let qy = quaternion_from_axis_angle(-Vec3::y(), self.beta).expect("unit axis");
        let qz = quaternion_from_axis_angle(Vec3::z(), self.gamma).expect("unit axis");
        (qz * qy * qx).canonical()
    }
}

/// Azimuth `gamma` of the xOy projection from +x, and elevation `beta` of `v`
/// above the xOy plane.
pub fn euler_gamma_beta(v: Vec3) -> Result<(f64, f64), RotationError> {
    let norm = v.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(RotationError::ZeroVector);
    }
    let horizontal = v.x.hypot(v.y);
    if horizontal < DEGENERATE_TOLERANCE * norm {
        return Err(RotationError::VerticalDegenerate);
    }
    Ok((wrap(v.y.atan2(v.x)), v.z.atan2(horizontal)))
}

/// Roll of the bone about itself: `r` is brought back by `rm_z(gamma)^-1` and
/// then `rm_y(beta)^-1`, and `alpha` is the signed angle from +y to its yOz
/// projection.
pub fn euler_alpha(v: Vec3, r: Vec3, gamma: f64, beta: f64) -> Result<f64, RotationError> {
    let (nv, nr) = (v.norm(), r.norm());
    if !(nv > 0.0 && nr > 0.0) {
        return Err(RotationError::ZeroVector);
    }
    if v.cross(&r).norm() < DEGENERATE_TOLERANCE * nv * nr {
        return Err(RotationError::RollUndefined);
    }
    let r_x = rm_y(beta).transpose() * (rm_z(gamma).transpose() * r);
    if r_x.y.hypot(r_x.z) < DEGENERATE_TOLERANCE * nr {
        return Err(RotationError::RollUndefined);
    }
    Ok(wrap(r_x.z.atan2(r_x.y)))
}

/// Full extraction: `(gamma, beta)` from the bone, `alpha` from the reference.
pub fn euler_from_vectors(v: Vec3, r: Vec3) -> Result<EulerAngles, RotationError> {
    let (gamma, beta) = euler_gamma_beta(v)?;
    let alpha = euler_alpha(v, r, gamma, beta)?;
    Ok(EulerAngles { alpha, beta, gamma })
}
