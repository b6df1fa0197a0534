//! Inputs shared by the benchmarks.

use skelforge_core::rotation::{quaternion_from_axis_angle, sample_dof_rotations};
use skelforge_core::seed::rng_from_seed;
use skelforge_core::skeleton::forward_kinematics;
use skelforge_core::{CoordinatePose, Quaternion, RotationSequence, SkeletonTopology, Vec3};

/// A random DOF-respecting pose of the default skeleton.
pub fn random_pose(topology: &SkeletonTopology, seed: u64) -> (Vec<Quaternion>, CoordinatePose) {
    let rotations = sample_dof_rotations(topology, &mut rng_from_seed(seed));
    let pose = forward_kinematics(topology, &rotations, Vec3::new(0.0, 0.0, 1.0)).expect("valid rotations");
    (rotations, pose)
}

/// Every joint turning steadily about its own axis.
pub fn steady_motion(topology: &SkeletonTopology, frames: usize) -> RotationSequence {
    let tracks = (0..topology.len())
        .map(|j| {
            let axis = Vec3::new(1.0, j as f64 * 0.1, 0.5).normalize();
            (0..frames)
                .map(|f| quaternion_from_axis_angle(axis, 0.02 * f as f64).expect("unit axis"))
                .collect()
        })
        .collect();
    RotationSequence { fps: 30.0, root_positions: vec![Vec3::new(0.0, 0.0, 1.0); frames], tracks }
}
