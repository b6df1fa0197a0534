//! Hamilton quaternions for joint orientations.
//!
//! Components are stored as `(x, y, z, w)` with `w` the scalar part. Rotation
//! quaternions are kept unit-norm; `canonical` picks the `w >= 0` hemisphere.

use std::ops::{Mul, Neg};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion { x: 0.0, y: 0.0, z: 0.0, w: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn vector(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn dot(self, other: Quaternion) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z + self.w * other.w
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Scales to unit length. Returns `None` for a zero quaternion.
    pub fn normalized(self) -> Option<Quaternion> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(1.0 / n))
    }

    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.x * s, self.y * s, self.z * s, self.w * s)
    }

    pub fn conjugate(self) -> Quaternion {
        Quaternion::new(-self.x, -self.y, -self.z, self.w)
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    pub fn inverse(self) -> Quaternion {
        self.conjugate().scale(1.0 / self.norm_squared())
    }

    /// Same rotation, on the `w >= 0` hemisphere.
    pub fn canonical(self) -> Quaternion {
        if self.w < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Flips sign if needed so that `dot(self, reference) >= 0`.
    pub fn aligned_with(self, reference: Quaternion) -> Quaternion {
        if self.dot(reference) < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_unit(self, tolerance: f64) -> bool {
        (self.norm() - 1.0).abs() <= tolerance
    }

    /// Rotates `v` by the sandwich product `q v q*`. Assumes a unit quaternion.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        let p = Quaternion::new(v.x, v.y, v.z, 0.0);
        let r = self * p * self.conjugate();
        Vec3::new(r.x, r.y, r.z)
    }

    /// Rotation angle in `[0, pi]`, hemisphere independent.
    pub fn angle(self) -> f64 {
        2.0 * self.vector().norm().atan2(self.w.abs())
    }

    pub fn to_rotation_matrix(self) -> Matrix3<f64> {
        let Quaternion { x, y, z, w } = self;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// Shepperd's method; the input must be a proper rotation matrix.
    pub fn from_rotation_matrix(m: &Matrix3<f64>) -> Quaternion {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Quaternion::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
                0.25 * s,
            )
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            Quaternion::new(
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(2, 1)] - m[(1, 2)]) / s,
            )
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            Quaternion::new(
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
            )
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            Quaternion::new(
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        };
        q.normalized().unwrap_or(Quaternion::IDENTITY).canonical()
    }

    /// Splits `self = swing * twist`, where `twist` rotates about `axis` and
    /// `swing` has no component about it. `axis` must be unit length.
    pub fn swing_twist(self, axis: Vec3) -> (Quaternion, Quaternion) {
        let along = axis * self.vector().dot(&axis);
        let twist = Quaternion::new(along.x, along.y, along.z, self.w)
            .normalized()
            .unwrap_or(Quaternion::IDENTITY);
        let swing = self * twist.conjugate();
        (swing, twist)
    }

    pub fn approx_eq_up_to_sign(self, other: Quaternion, tolerance: f64) -> bool {
        let diff = |a: Quaternion, b: Quaternion| {
            (a.x - b.x)
                .abs()
                .max((a.y - b.y).abs())
                .max((a.z - b.z).abs())
                .max((a.w - b.w).abs())
        };
        diff(self, other) <= tolerance || diff(self, -other) <= tolerance
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        let (a1, b1, c1, w1) = (self.x, self.y, self.z, self.w);
        let (a2, b2, c2, w2) = (rhs.x, rhs.y, rhs.z, rhs.w);
        Quaternion::new(
            w1 * a2 + a1 * w2 + b1 * c2 - c1 * b2,
            w1 * b2 - a1 * c2 + b1 * w2 + c1 * a2,
            w1 * c2 + a1 * b2 - b1 * a2 + c1 * w2,
            w1 * w2 - a1 * a2 - b1 * b2 - c1 * c2,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.x, -self.y, -self.z, -self.w)
    }
}
