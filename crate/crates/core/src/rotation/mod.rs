//! Coordinate-to-rotation conversion.
//!
//! Bone vectors are turned into world rotations (Euler extraction with a
//! reference vector for roll, then quaternions), re-expressed in the parent's
//! frame and projected onto each joint's rotational degrees of freedom.

mod convert;
mod euler;
mod sample;
mod transform;

use thiserror::Error;

pub use convert::{
    align_track, pose_to_rotation, project_dof, sequence_to_rotation, PoseConversion, RotationPose,
    RotationSequence,
};
pub use euler::{euler_alpha, euler_from_vectors, euler_gamma_beta, rm_x, rm_y, rm_z, EulerAngles};
pub use sample::{sample_dof_rotations, HINGE_RANGE, MAX_SWING};
pub use transform::{point_world_to_local, TransformationMatrix};

use crate::quaternion::Quaternion;
use crate::skeleton::SkeletonError;
use crate::Vec3;

/// Below this, two unit vectors count as parallel in `axis_angle_between`.
pub const PARALLEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RotationError {
    #[error("zero-length vector")]
    ZeroVector,
    #[error("vector is parallel to the z axis; azimuth is undefined")]
    VerticalDegenerate,
    #[error("reference vector gives no roll information")]
    RollUndefined,
    #[error("rotation axis norm {0} is not 1")]
    NonUnitAxis(f64),
    #[error("transformation matrix is not rigid")]
    NonRigid,
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("frame {frame}: {source}")]
    AtFrame {
        frame: usize,
        #[source]
        source: Box<RotationError>,
    },
    #[error("rotation sequence is malformed: {0}")]
    Malformed(String),
}

/// Axis and angle carrying the direction of `v0` onto the direction of `v1`.
///
/// Parallel inputs return angle 0 about +z. Antiparallel inputs use the cross
/// product of `v0` with its least-aligned basis vector as the axis.
pub fn axis_angle_between(v0: Vec3, v1: Vec3) -> Result<(Vec3, f64), RotationError> {
    let (n0, n1) = (v0.norm(), v1.norm());
    if !(n0 > 0.0 && n1 > 0.0) {
        return Err(RotationError::ZeroVector);
    }
    let (a, b) = (v0 / n0, v1 / n1);
    let cross = a.cross(&b);
    let sin = cross.norm();
    let cos = a.dot(&b);
    if sin < PARALLEL_TOLERANCE {
        if cos > 0.0 {
            return Ok((Vec3::z(), 0.0));
        }
        let basis = [Vec3::x(), Vec3::y(), Vec3::z()];
        let least = (0..3)
            .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
            .expect("three axes");
        let axis = a.cross(&basis[least]).normalize();
        return Ok((axis, std::f64::consts::PI));
    }
    Ok((cross / sin, sin.atan2(cos)))
}

/// Unit quaternion `(sin(theta/2) * axis, cos(theta/2))` on the `w >= 0` hemisphere.
pub fn quaternion_from_axis_angle(axis: Vec3, theta: f64) -> Result<Quaternion, RotationError> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(RotationError::NonUnitAxis(norm));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(Quaternion::new(s * axis.x, s * axis.y, s * axis.z, c).canonical())
}

/// `Inv(parent) x child`: the child's orientation in its parent's frame.
pub fn quaternion_world_to_local(q_child_world: Quaternion, q_parent_world: Quaternion) -> Quaternion {
    q_parent_world.inverse() * q_child_world
}

/// Minimal rotation carrying the direction of `from` onto the direction of `to`.
pub fn rotation_between(from: Vec3, to: Vec3) -> Result<Quaternion, RotationError> {
    let (axis, theta) = axis_angle_between(from, to)?;
    quaternion_from_axis_angle(axis, theta)
}
