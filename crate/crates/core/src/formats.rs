//! JSON documents exchanged between pipeline stages.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! gives bit-identical values.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{CameraPose, CameraTrajectory};
use crate::quaternion::Quaternion;
use crate::rotation::{RotationError, RotationSequence};
use crate::skeleton::{CoordinatePose, CoordinateSequence, SkeletonError, SkeletonTopology};
use crate::Vec3;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("joint names do not match the topology (first difference at index {index})")]
    JointMismatch { index: usize },
    #[error("frame {frame} has {found} entries, expected {expected}")]
    FrameWidth { frame: usize, expected: usize, found: usize },
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| FormatError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Pretty JSON plus a trailing newline; parent directories are created.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let io = |e: std::io::Error| FormatError::Io { path: path.display().to_string(), message: e.to_string() };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(io)
}

fn check_names(names: &[String], topology: &SkeletonTopology) -> Result<(), FormatError> {
    let expected = topology.joint_names();
    if names.len() != expected.len() {
        return Err(FormatError::JointMismatch { index: names.len().min(expected.len()) });
    }
    match names.iter().zip(&expected).position(|(a, b)| a != b) {
        Some(index) => Err(FormatError::JointMismatch { index }),
        None => Ok(()),
    }
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn arr3(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// `{fps, joint_names, frames: [[[x, y, z], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinateFile {
    pub fps: f64,
    pub joint_names: Vec<String>,
    pub frames: Vec<Vec<[f64; 3]>>,
}

impl CoordinateFile {
    pub fn from_sequence(seq: &CoordinateSequence, topology: &SkeletonTopology) -> Self {
        Self {
            fps: seq.fps,
            joint_names: topology.joint_names(),
            frames: seq.frames.iter().map(|f| f.positions.iter().map(arr3).collect()).collect(),
        }
    }

    pub fn to_sequence(&self, topology: &SkeletonTopology) -> Result<CoordinateSequence, FormatError> {
        check_names(&self.joint_names, topology)?;
        let seq = CoordinateSequence {
            fps: self.fps,
            frames: self
                .frames
                .iter()
                .map(|f| CoordinatePose { positions: f.iter().copied().map(v3).collect() })
                .collect(),
        };
        seq.validate(topology)?;
        Ok(seq)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationFrame {
    pub root_position: [f64; 3],
    /// `[x, y, z, w]` per joint.
    pub quaternions: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationFile {
    pub fps: f64,
    pub joint_names: Vec<String>,
    pub frames: Vec<RotationFrame>,
}

impl RotationFile {
    pub fn from_sequence(seq: &RotationSequence, topology: &SkeletonTopology) -> Self {
        let frames = (0..seq.frame_count())
            .map(|f| RotationFrame {
                root_position: arr3(&seq.root_positions[f]),
                quaternions: seq.tracks.iter().map(|t| t[f].to_array()).collect(),
            })
            .collect();
        Self { fps: seq.fps, joint_names: topology.joint_names(), frames }
    }

    pub fn to_sequence(&self, topology: &SkeletonTopology) -> Result<RotationSequence, FormatError> {
        check_names(&self.joint_names, topology)?;
        let joints = topology.len();
        let mut tracks = vec![Vec::with_capacity(self.frames.len()); joints];
        for (f, frame) in self.frames.iter().enumerate() {
            if frame.quaternions.len() != joints {
                return Err(FormatError::FrameWidth { frame: f, expected: joints, found: frame.quaternions.len() });
            }
            for (track, q) in tracks.iter_mut().zip(&frame.quaternions) {
                track.push(Quaternion::from_array(*q));
            }
        }
        let seq = RotationSequence {
            fps: self.fps,
            root_positions: self.frames.iter().map(|f| v3(f.root_position)).collect(),
            tracks,
        };
        seq.validate()?;
        Ok(seq)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryPoseRecord {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    pub up_hint: [f64; 3],
    pub hold_frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub seed: u64,
    pub poses: Vec<TrajectoryPoseRecord>,
}

impl TrajectoryFile {
    pub fn from_trajectory(traj: &CameraTrajectory, seed: u64) -> Self {
        let poses = traj
            .poses
            .iter()
            .zip(&traj.hold_frames)
            .map(|(p, &hold_frames)| TrajectoryPoseRecord {
                position: arr3(&p.position),
                look_at: arr3(&p.look_at),
                up_hint: arr3(&p.up_hint),
                hold_frames,
            })
            .collect();
        Self { seed, poses }
    }

    pub fn to_trajectory(&self) -> CameraTrajectory {
        CameraTrajectory {
            poses: self
                .poses
                .iter()
                .map(|p| CameraPose { position: v3(p.position), look_at: v3(p.look_at), up_hint: v3(p.up_hint) })
                .collect(),
            hold_frames: self.poses.iter().map(|p| p.hold_frames).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantEntry {
    pub file: String,
    pub seed: u64,
}

/// Lists the rotation files of an animation set and the seeds they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantIndex {
    pub fps: f64,
    pub frames: usize,
    pub source_times: Vec<f64>,
    pub variants: Vec<VariantEntry>,
}

pub fn variant_file_name(v: usize) -> String {
    format!("variant_{v:03}.json")
}
