use nalgebra::{Matrix3, Matrix4, Vector4};

use super::RotationError;
use crate::quaternion::Quaternion;
use crate::Vec3;

const RIGID_TOLERANCE: f64 = 1e-9;

/// Homogeneous rigid transform `[RM p; 0 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformationMatrix {
    m: Matrix4<f64>,
}

impl TransformationMatrix {
    pub fn identity() -> Self {
        Self { m: Matrix4::identity() }
    }

    /// Validates orthonormality, `det = +1` and the bottom row.
    pub fn new(m: Matrix4<f64>) -> Result<Self, RotationError> {
        let rot: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
        let bottom_ok = m[(3, 0)] == 0.0 && m[(3, 1)] == 0.0 && m[(3, 2)] == 0.0 && m[(3, 3)] == 1.0;
        let ortho = (rot.transpose() * rot - Matrix3::identity()).abs().max();
        if !bottom_ok
            || !m.iter().all(|x| x.is_finite())
            || ortho > RIGID_TOLERANCE
            || (rot.determinant() - 1.0).abs() > RIGID_TOLERANCE
        {
            return Err(RotationError::NonRigid);
        }
        Ok(Self { m })
    }

    pub fn from_parts(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self, RotationError> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&translation);
        Self::new(m)
    }

    /// Frame with orientation `q` (unit) and origin `position`.
    pub fn from_quaternion(q: Quaternion, position: Vec3) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&q.to_rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&position);
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vec3 {
        self.m.fixed_view::<3, 1>(0, 3).into_owned()
    }

    /// Rigid inverse `[RM^T  -RM^T p; 0 1]`.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation().transpose();
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&rt);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(-(rt * self.translation())));
        Self { m }
    }

    pub fn apply_point(&self, p: Vec3) -> Vec3 {
        let h = self.m * Vector4::new(p.x, p.y, p.z, 1.0);
        Vec3::new(h.x, h.y, h.z)
    }
}

/// `p|LCS = TM^-1 * p|WCS`.
pub fn point_world_to_local(p_world: Vec3, parent_transform: &TransformationMatrix) -> Vec3 {
    parent_transform.inverse().apply_point(p_world)
}
