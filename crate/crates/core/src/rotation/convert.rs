use nalgebra::Matrix3;
use rayon::prelude::*;

use super::euler::euler_from_vectors;
use super::transform::{point_world_to_local, TransformationMatrix};
use super::{quaternion_world_to_local, rotation_between, RotationError};
use crate::quaternion::Quaternion;
use crate::skeleton::{
    bone_vector, measure_bone_lengths, CoordinatePose, CoordinateSequence, DofClass, JointSpec,
    SkeletonTopology,
};
use crate::Vec3;

/// Root position plus one local quaternion per joint.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPose {
    pub root_position: Vec3,
    pub local_quaternions: Vec<Quaternion>,
}

/// Result of converting one pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseConversion {
    pub pose: RotationPose,
    /// ThreeD joints whose reference child was collinear with the bone; their
    /// roll was dropped and a swing-only rotation was used.
    pub roll_fallbacks: Vec<usize>,
    /// ThreeD joints whose bone was vertical, where the two-vector frame
    /// alignment replaced Euler extraction.
    pub euler_fallbacks: Vec<usize>,
}

/// Per-joint quaternion tracks plus root positions.
///
/// `tracks[joint][frame]`; every track has one entry per root position.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSequence {
    pub fps: f64,
    pub root_positions: Vec<Vec3>,
    pub tracks: Vec<Vec<Quaternion>>,
}

impl RotationSequence {
    pub fn from_poses(fps: f64, poses: &[RotationPose]) -> Self {
        let joints = poses.first().map_or(0, |p| p.local_quaternions.len());
        let tracks = (0..joints)
            .map(|j| poses.iter().map(|p| p.local_quaternions[j]).collect())
            .collect();
        Self {
            fps,
            root_positions: poses.iter().map(|p| p.root_position).collect(),
            tracks,
        }
    }

    pub fn joint_count(&self) -> usize {
        self.tracks.len()
    }

    pub fn frame_count(&self) -> usize {
        self.root_positions.len()
    }

    pub fn frame(&self, f: usize) -> Vec<Quaternion> {
        self.tracks.iter().map(|t| t[f]).collect()
    }

    pub fn pose(&self, f: usize) -> RotationPose {
        RotationPose { root_position: self.root_positions[f], local_quaternions: self.frame(f) }
    }

    pub fn validate(&self) -> Result<(), RotationError> {
        let frames = self.frame_count();
        if frames == 0 {
            return Err(RotationError::Malformed("no frames".into()));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(RotationError::Malformed(format!("fps {}", self.fps)));
        }
        for (j, track) in self.tracks.iter().enumerate() {
            if track.len() != frames {
                return Err(RotationError::Malformed(format!(
                    "joint {j} has {} frames, expected {frames}",
                    track.len()
                )));
            }
            if let Some(f) = track.iter().position(|q| !q.is_unit(1e-9)) {
                return Err(RotationError::Malformed(format!(
                    "joint {j}, frame {f}: quaternion is not unit"
                )));
            }
        }
        Ok(())
    }

    /// Consecutive same-joint quaternions have non-negative dot products.
    pub fn is_hemisphere_continuous(&self) -> bool {
        self.tracks
            .iter()
            .all(|t| t.windows(2).all(|w| w[0].dot(w[1]) >= 0.0))
    }

    /// Flips quaternions whose dot with their predecessor is negative.
    pub fn align_hemispheres(&mut self) {
        for track in &mut self.tracks {
            align_track(track);
        }
    }
}

pub fn align_track(track: &mut [Quaternion]) {
    for f in 1..track.len() {
        track[f] = track[f].aligned_with(track[f - 1]);
    }
}

/// Restricts an unconstrained local rotation to the joint's degrees of freedom.
pub fn project_dof(q: Quaternion, joint: &JointSpec) -> Quaternion {
    let projected = match joint.dof_class {
        DofClass::Static => Quaternion::IDENTITY,
        DofClass::ThreeD => q,
        DofClass::Root => q.swing_twist(Vec3::z()).1,
        DofClass::TwoD => q.swing_twist(joint.rest_direction).0,
        DofClass::OneD => q.swing_twist(joint.hinge_axis.unwrap_or_else(Vec3::y)).1,
    };
    projected
        .normalized()
        .unwrap_or(Quaternion::IDENTITY)
        .canonical()
}

/// World rotation of a ThreeD bone from its own vector and its reference
/// child's vector. The second value is false when the bone was vertical and
/// the Euler path could not be used.
fn three_d_world_rotation(
    rest_direction: Vec3,
    rest_normal: Vec3,
    v: Vec3,
    r: Vec3,
) -> Result<(Quaternion, bool), RotationError> {
    // Rest frame of the bone: x along the bone, z along the reference normal.
    let rest_frame = Matrix3::from_columns(&[
        rest_direction,
        rest_normal.cross(&rest_direction),
        rest_normal,
    ]);
    match euler_from_vectors(v, r) {
        Ok(euler) => {
            let frame = Quaternion::from_rotation_matrix(&rest_frame);
            Ok(((euler.to_quaternion() * frame.conjugate()).canonical(), true))
        }
        Err(RotationError::VerticalDegenerate) => {
            let normal = v.cross(&r);
            if normal.norm() < 1e-9 * v.norm() * r.norm() {
                return Err(RotationError::RollUndefined);
            }
            let (b, n) = (v.normalize(), normal.normalize());
            let observed = Matrix3::from_columns(&[b, n.cross(&b), n]);
            let q = Quaternion::from_rotation_matrix(&(observed * rest_frame.transpose()));
            Ok((q, false))
        }
        Err(e) => Err(e),
    }
}

pub fn pose_to_rotation(
    topology: &SkeletonTopology,
    pose: &CoordinatePose,
) -> Result<PoseConversion, RotationError> {
    measure_bone_lengths(pose, topology)?;
    let n = topology.len();
    let mut local = vec![Quaternion::IDENTITY; n];
    let mut world = vec![Quaternion::IDENTITY; n];
    let mut roll_fallbacks = Vec::new();
    let mut euler_fallbacks = Vec::new();

    for &j in topology.order() {
        let spec = topology.joint(j);
        let unconstrained = match (spec.dof_class, spec.parent) {
            (DofClass::Static, _) => Quaternion::IDENTITY,
            (DofClass::Root, _) => match spec.reference_child {
                Some(c) => rotation_between(
                    topology.joint(c).rest_direction,
                    bone_vector(pose, c, topology)?,
                )?,
                None => Quaternion::IDENTITY,
            },
            (DofClass::ThreeD, Some(p)) => {
                let c = spec.reference_child.expect("validated topology");
                let normal = topology.reference_normal(j).expect("validated topology");
                let v = bone_vector(pose, j, topology)?;
                let r = bone_vector(pose, c, topology)?;
                match three_d_world_rotation(spec.rest_direction, normal, v, r) {
                    Ok((w, euler_path)) => {
                        if !euler_path {
                            euler_fallbacks.push(j);
                        }
                        quaternion_world_to_local(w, world[p])
                    }
                    Err(RotationError::RollUndefined) => {
                        roll_fallbacks.push(j);
                        local_swing(pose, &world, spec, p)?
                    }
                    Err(e) => return Err(e),
                }
            }
            (_, Some(p)) => local_swing(pose, &world, spec, p)?,
            (_, None) => unreachable!("only the root lacks a parent"),
        };
        local[j] = project_dof(unconstrained, spec);
        world[j] = match spec.parent {
            None => local[j],
            Some(p) => world[p] * local[j],
        };
    }

    Ok(PoseConversion {
        pose: RotationPose {
            root_position: pose.positions[topology.root()],
            local_quaternions: local,
        },
        roll_fallbacks,
        euler_fallbacks,
    })
}

/// Minimal rotation of the rest bone onto the observed bone, in the parent frame.
fn local_swing(
    pose: &CoordinatePose,
    world: &[Quaternion],
    spec: &JointSpec,
    parent: usize,
) -> Result<Quaternion, RotationError> {
    let frame = TransformationMatrix::from_quaternion(world[parent], pose.positions[parent]);
    let local_bone = point_world_to_local(pose.positions[spec.id], &frame);
    rotation_between(spec.rest_direction, local_bone)
}

/// Converts every frame, then makes each joint track hemisphere-continuous.
pub fn sequence_to_rotation(
    topology: &SkeletonTopology,
    seq: &CoordinateSequence,
) -> Result<RotationSequence, RotationError> {
    seq.validate(topology)?;
    let poses = seq
        .frames
        .par_iter()
        .enumerate()
        .map(|(frame, pose)| {
            pose_to_rotation(topology, pose)
                .map(|c| c.pose)
                .map_err(|e| RotationError::AtFrame { frame, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = RotationSequence::from_poses(seq.fps, &poses);
    out.align_hemispheres();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::quaternion_from_axis_angle;
    use crate::skeleton::{forward_kinematics, SkeletonTopology};

    #[test]
    fn rest_pose_is_identity_everywhere() {
        let t = SkeletonTopology::default_53();
        let conv = pose_to_rotation(&t, &t.rest_pose(Vec3::new(0.0, 0.0, 1.0))).unwrap();
        for q in &conv.pose.local_quaternions {
            assert!(q.approx_eq_up_to_sign(Quaternion::IDENTITY, 1e-12), "{q:?}");
        }
        // straight elbows and knees leave no roll reference for the limbs
        let mut limbs: Vec<usize> = ["thigh_l", "thigh_r", "upper_arm_l", "upper_arm_r"]
            .iter()
            .map(|n| t.find(n).unwrap())
            .collect();
        limbs.sort();
        let mut got = conv.roll_fallbacks.clone();
        got.sort();
        assert_eq!(got, limbs);
    }

    #[test]
    fn single_elbow_flex() {
        let t = SkeletonTopology::default_53();
        let elbow = t.find("forearm_l").unwrap();
        let hinge = t.joint(elbow).hinge_axis.unwrap();
        let mut rotations = vec![Quaternion::IDENTITY; t.len()];
        rotations[elbow] =
            quaternion_from_axis_angle(hinge, std::f64::consts::FRAC_PI_2).unwrap();
        let pose = forward_kinematics(&t, &rotations, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let conv = pose_to_rotation(&t, &pose).unwrap();
        for (j, q) in conv.pose.local_quaternions.iter().enumerate() {
            assert!(q.approx_eq_up_to_sign(rotations[j], 1e-12), "joint {j}: {q:?}");
        }
        // the flexed elbow restores the shoulder's roll reference
        assert!(!conv.roll_fallbacks.contains(&t.find("upper_arm_l").unwrap()));
    }

    #[test]
    fn sign_flipped_frames_are_realigned() {
        let mut seq = RotationSequence {
            fps: 30.0,
            root_positions: vec![Vec3::zeros(); 2],
            tracks: vec![vec![
                Quaternion::new(0.0, 0.0, 0.1, 0.995).normalized().unwrap(),
                -Quaternion::new(0.0, 0.0, 0.12, 0.99).normalized().unwrap(),
            ]],
        };
        assert!(!seq.is_hemisphere_continuous());
        seq.align_hemispheres();
        assert!(seq.is_hemisphere_continuous());
    }
}
