//! Random camera moving.
//!
//! The camera starts at the character and takes a random walk: each step
//! draws a horizontal length, an absolute azimuth and a signed vertical
//! offset from uniform ranges. Every pose keeps looking at the character.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::{rng_from_seed, uniform, StageRng};
use crate::Vec3;

/// Pose 0 sits this far from the character along -x so it can look at it.
pub const ORIGIN_OFFSET: f64 = 0.01;

const PARALLEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RcmParams {
    pub mag_low: f64,
    pub mag_high: f64,
    pub theta_low: f64,
    pub theta_high: f64,
    pub z_low: f64,
    pub z_high: f64,
    pub moves: usize,
    pub hold_frames: usize,
    pub seed: u64,
}

impl Default for RcmParams {
    fn default() -> Self {
        Self {
            mag_low: 0.5,
            mag_high: 2.0,
            theta_low: -PI,
            theta_high: PI,
            z_low: -0.25,
            z_high: 0.25,
            moves: 3,
            hold_frames: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("invalid camera parameters: {0}")]
    InvalidParams(String),
    #[error("camera position coincides with its target")]
    Coincident,
    #[error("view direction is parallel to the up hint")]
    DegenerateUp,
}

impl RcmParams {
    pub fn validate(&self) -> Result<(), CameraError> {
        let pairs = [
            ("mag", self.mag_low, self.mag_high),
            ("theta", self.theta_low, self.theta_high),
            ("z", self.z_low, self.z_high),
        ];
        for (name, lo, hi) in pairs {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(CameraError::InvalidParams(format!(
                    "{name} bounds ({lo}, {hi}) must be finite with low <= high"
                )));
            }
        }
        if self.mag_low < 0.0 {
            return Err(CameraError::InvalidParams("mag_low must be >= 0".into()));
        }
        if self.hold_frames == 0 {
            return Err(CameraError::InvalidParams("hold_frames must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub position: Vec3,
    pub look_at: Vec3,
    pub up_hint: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraTrajectory {
    pub poses: Vec<CameraPose>,
    /// Frames each pose is held for, one entry per pose.
    pub hold_frames: Vec<usize>,
}

impl CameraTrajectory {
    /// Pose in effect at `frame`, cycling through the poses by their hold durations.
    pub fn pose_at(&self, frame: usize) -> &CameraPose {
        let cycle: usize = self.hold_frames.iter().sum();
        let mut t = if cycle == 0 { 0 } else { frame % cycle };
        for (pose, &hold) in self.poses.iter().zip(&self.hold_frames) {
            if t < hold {
                return pose;
            }
            t -= hold;
        }
        self.poses.last().expect("trajectory has at least one pose")
    }
}

/// Orthonormal camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraBasis {
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
}

/// One step of the walk. Draws magnitude, azimuth and vertical offset in that order.
pub fn rcm_step(pos: Vec3, params: &RcmParams, rng: &mut StageRng) -> Vec3 {
    let mag = uniform(rng, params.mag_low, params.mag_high);
    let theta = uniform(rng, params.theta_low, params.theta_high);
    let dz = uniform(rng, params.z_low, params.z_high);
    pos + Vec3::new(mag * theta.cos(), mag * theta.sin(), dz)
}

pub fn rcm_trajectory(origin: Vec3, params: &RcmParams) -> Result<CameraTrajectory, CameraError> {
    params.validate()?;
    let mut rng = rng_from_seed(params.seed);
    let mut position = origin - Vec3::x() * ORIGIN_OFFSET;
    let mut poses = Vec::with_capacity(params.moves + 1);
    for step in 0..=params.moves {
        if step > 0 {
            position = rcm_step(position, params, &mut rng);
        }
        poses.push(CameraPose { position, look_at: origin, up_hint: Vec3::z() });
    }
    Ok(CameraTrajectory { hold_frames: vec![params.hold_frames; poses.len()], poses })
}

pub fn look_at_orientation(pose: &CameraPose) -> Result<CameraBasis, CameraError> {
    let view = pose.look_at - pose.position;
    let dist = view.norm();
    if !(dist > 0.0) {
        return Err(CameraError::Coincident);
    }
    let forward = view / dist;
    let side = forward.cross(&pose.up_hint);
    if side.norm() < PARALLEL_TOLERANCE * pose.up_hint.norm() {
        return Err(CameraError::DegenerateUp);
    }
    let right = side.normalize();
    Ok(CameraBasis { right, up: right.cross(&forward), forward })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn fixed(mag: f64, theta: f64, z: f64) -> RcmParams {
        RcmParams {
            mag_low: mag,
            mag_high: mag,
            theta_low: theta,
            theta_high: theta,
            z_low: z,
            z_high: z,
            ..Default::default()
        }
    }

    #[test]
    fn degenerate_steps() {
        let mut rng = rng_from_seed(0);
        let p = rcm_step(Vec3::zeros(), &fixed(2.0, FRAC_PI_2, 0.5), &mut rng);
        assert!((p - Vec3::new(0.0, 2.0, 0.5)).norm() < 1e-12);
        let p = rcm_step(Vec3::new(1.0, 1.0, 1.0), &fixed(SQRT_2, FRAC_PI_4, -0.25), &mut rng);
        assert!((p - Vec3::new(2.0, 2.0, 0.75)).norm() < 1e-12);
    }

    #[test]
    fn zero_moves_is_origin_only() {
        let t = rcm_trajectory(Vec3::new(1.0, 2.0, 0.0), &RcmParams { moves: 0, ..Default::default() })
            .unwrap();
        assert_eq!(t.poses.len(), 1);
        assert_eq!(t.poses[0].position, Vec3::new(1.0 - ORIGIN_OFFSET, 2.0, 0.0));
        assert_eq!(t.poses[0].look_at, Vec3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn seeded_and_restartable() {
        let p = RcmParams { moves: 5, seed: 17, ..Default::default() };
        let a = rcm_trajectory(Vec3::zeros(), &p).unwrap();
        assert_eq!(a, rcm_trajectory(Vec3::zeros(), &p).unwrap());
        assert_eq!(a.poses.len(), 6);
        // a new scene origin shifts the whole walk and nothing else
        let shift = Vec3::new(3.0, -1.0, 0.5);
        let b = rcm_trajectory(shift, &p).unwrap();
        for (pa, pb) in a.poses.iter().zip(&b.poses) {
            assert!((pb.position - pa.position - shift).norm() < 1e-12);
            assert_eq!(pb.look_at, shift);
        }
        let c = rcm_trajectory(Vec3::zeros(), &RcmParams { seed: 18, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn basis_examples() {
        let pose = CameraPose { position: Vec3::zeros(), look_at: Vec3::x(), up_hint: Vec3::z() };
        let b = look_at_orientation(&pose).unwrap();
        assert_eq!(b.forward, Vec3::x());
        assert!((b.right - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((b.up - Vec3::z()).norm() < 1e-15);
        let above = CameraPose { position: Vec3::new(0.0, 0.0, 3.0), look_at: Vec3::zeros(), up_hint: Vec3::z() };
        assert_eq!(look_at_orientation(&above), Err(CameraError::DegenerateUp));
        let same = CameraPose { position: Vec3::zeros(), look_at: Vec3::zeros(), up_hint: Vec3::z() };
        assert_eq!(look_at_orientation(&same), Err(CameraError::Coincident));
    }

    #[test]
    fn mean_displacement_matches_uniform_means() {
        let p = RcmParams { mag_low: 1.0, mag_high: 1.0, theta_low: -0.5, theta_high: 0.5, z_low: -0.3, z_high: 0.3, ..Default::default() };
        let mut rng = rng_from_seed(4);
        let n = 100_000;
        let steps: Vec<Vec3> = (0..n).map(|_| rcm_step(Vec3::zeros(), &p, &mut rng)).collect();
        // E[cos U(-a, a)] = sin(a)/a, E[sin] = 0, E[z] = 0
        let analytic = Vec3::new(0.5f64.sin() / 0.5, 0.0, 0.0);
        for c in 0..3 {
            let xs: Vec<f64> = steps.iter().map(|s| s[c]).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - analytic[c]).abs() < 3.0 * se, "component {c}: {mean} vs {}", analytic[c]);
        }
    }

    #[test]
    fn pose_schedule_cycles() {
        let t = rcm_trajectory(Vec3::zeros(), &RcmParams { moves: 2, hold_frames: 3, ..Default::default() })
            .unwrap();
        assert_eq!(t.pose_at(0), &t.poses[0]);
        assert_eq!(t.pose_at(3), &t.poses[1]);
        assert_eq!(t.pose_at(8), &t.poses[2]);
        assert_eq!(t.pose_at(9), &t.poses[0]);
    }

    #[test]
    fn invalid_params() {
        assert!(RcmParams { mag_low: 2.0, mag_high: 1.0, ..Default::default() }.validate().is_err());
        assert!(RcmParams { mag_low: -1.0, ..Default::default() }.validate().is_err());
        assert!(RcmParams { hold_frames: 0, ..Default::default() }.validate().is_err());
    }
}
