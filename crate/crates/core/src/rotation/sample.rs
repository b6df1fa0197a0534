use rand::Rng;

use super::quaternion_from_axis_angle;
use crate::quaternion::Quaternion;
use crate::skeleton::{DofClass, SkeletonTopology};
use crate::Vec3;

/// Hinge flexion range used for sampled OneD joints, radians. Strictly
/// inside (0, pi) so a flexed limb always carries roll information.
pub const HINGE_RANGE: (f64, f64) = (0.05, 2.5);
/// Largest sampled TwoD swing, radians.
pub const MAX_SWING: f64 = 1.5;

fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random local rotations that respect every joint's DOF class: yaw for the
/// root, identity for Static, swings for TwoD, hinge flexion for OneD and an
/// unrestricted rotation for ThreeD.
pub fn sample_dof_rotations<R: Rng>(topology: &SkeletonTopology, rng: &mut R) -> Vec<Quaternion> {
    topology
        .joints()
        .iter()
        .map(|j| {
            let q = match j.dof_class {
                DofClass::Static => Ok(Quaternion::IDENTITY),
                DofClass::Root => quaternion_from_axis_angle(Vec3::z(), rng.gen_range(-3.1..3.1)),
                DofClass::OneD => quaternion_from_axis_angle(
                    j.hinge_axis.expect("OneD joints carry a hinge"),
                    rng.gen_range(HINGE_RANGE.0..HINGE_RANGE.1),
                ),
                DofClass::TwoD => {
                    let axis = unit_vector(rng).cross(&j.rest_direction);
                    if axis.norm() < 1e-6 {
                        Ok(Quaternion::IDENTITY)
                    } else {
                        quaternion_from_axis_angle(axis.normalize(), rng.gen_range(0.0..MAX_SWING))
                    }
                }
                DofClass::ThreeD => quaternion_from_axis_angle(unit_vector(rng), rng.gen_range(0.0..3.0)),
            };
            q.expect("unit axes")
        })
        .collect()
}
