//! Rotation-oriented motion processing for synthetic action datasets.
//!
//! The crate turns coordinate skeleton sequences into per-joint quaternion
//! animations, densifies and smooths them with dynamic skeletal interpolation,
//! generates random camera walks around the character, renders stick figures
//! and writes hierarchical clip manifests.

pub mod camera;
pub mod dataset;
pub mod dsi;
pub mod formats;
pub mod quaternion;
pub mod render;
pub mod rotation;
pub mod seed;
pub mod skeleton;

/// 3-vector in meters (or unitless for directions).
pub type Vec3 = nalgebra::Vector3<f64>;

pub use camera::{CameraPose, CameraTrajectory, RcmParams};
pub use dataset::{ClipManifest, ClipRecord, RecordingPlan};
pub use dsi::{AnimationSet, DsiParams};
pub use quaternion::Quaternion;
pub use render::{CameraIntrinsics, RasterFrame};
pub use rotation::{RotationPose, RotationSequence};
pub use skeleton::{CoordinatePose, CoordinateSequence, DofClass, SkeletonTopology};
