//! Software stick-figure renderer.
//!
//! Joints are projected through a pinhole camera built from a look-at pose.
//! Bones are clipped against a near plane and the image rectangle and drawn
//! with integer midpoint lines; joints are filled discs. Frames are binary
//! PPM (P6).

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{look_at_orientation, CameraBasis, CameraError, CameraPose, CameraTrajectory};
use crate::rotation::RotationSequence;
use crate::skeleton::{
    forward_kinematics, CoordinatePose, CoordinateSequence, DofClass, SkeletonError,
    SkeletonTopology,
};
use crate::Vec3;

/// Points at or below this forward depth (m) are behind the camera.
pub const BEHIND_DEPTH: f64 = 1e-6;
/// Bones are clipped to this depth before projection.
pub const NEAR_PLANE: f64 = 1e-3;
pub const JOINT_RADIUS: i64 = 3;
pub const BACKGROUND: [u8; 3] = [24, 24, 28];

pub fn class_color(class: DofClass) -> [u8; 3] {
    match class {
        DofClass::Root => [255, 255, 255],
        DofClass::ThreeD => [235, 87, 87],
        DofClass::TwoD => [86, 204, 120],
        DofClass::OneD => [80, 145, 240],
        DofClass::Static => [214, 200, 90],
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("camera trajectory has no poses")]
    EmptyTrajectory,
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("malformed PPM: {0}")]
    MalformedPpm(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub focal_px: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self { focal_px: 500.0, cx: 320.0, cy: 240.0, width: 640, height: 480 }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.focal_px > 0.0 && self.focal_px.is_finite()) {
            return Err(RenderError::InvalidIntrinsics(format!("focal {}", self.focal_px)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::InvalidIntrinsics("empty frame".into()));
        }
        let inside = (0.0..=self.width as f64).contains(&self.cx)
            && (0.0..=self.height as f64).contains(&self.cy);
        if !inside {
            return Err(RenderError::InvalidIntrinsics(format!(
                "principal point ({}, {}) outside the frame",
                self.cx, self.cy
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Pixel { u: f64, v: f64, depth: f64 },
    Behind,
}

/// A camera pose with its basis resolved, ready to project many points.
#[derive(Debug, Clone, Copy)]
pub struct CameraView {
    pub position: Vec3,
    pub basis: CameraBasis,
    pub intrinsics: CameraIntrinsics,
}

impl CameraView {
    pub fn new(pose: &CameraPose, intrinsics: CameraIntrinsics) -> Result<Self, RenderError> {
        intrinsics.validate()?;
        Ok(Self { position: pose.position, basis: look_at_orientation(pose)?, intrinsics })
    }

    /// `(right, up, forward)` coordinates of a world point.
    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let d = p - self.position;
        Vec3::new(d.dot(&self.basis.right), d.dot(&self.basis.up), d.dot(&self.basis.forward))
    }

    fn pixel(&self, c: Vec3) -> (f64, f64) {
        let k = &self.intrinsics;
        (k.cx + k.focal_px * c.x / c.z, k.cy - k.focal_px * c.y / c.z)
    }

    pub fn project(&self, p: Vec3) -> Projection {
        let c = self.to_camera(p);
        if c.z <= BEHIND_DEPTH {
            return Projection::Behind;
        }
        let (u, v) = self.pixel(c);
        Projection::Pixel { u, v, depth: c.z }
    }
}

pub fn project(
    point_world: Vec3,
    pose: &CameraPose,
    intr: &CameraIntrinsics,
) -> Result<Projection, RenderError> {
    Ok(CameraView::new(pose, *intr)?.project(point_world))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterFrame {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB.
    pub pixels: Vec<u8>,
    /// Every joint was behind the camera.
    pub blank: bool,
}

impl RasterFrame {
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        let pixels = color.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        Self { width, height, pixels, blank: false }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, color: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&color);
    }

    /// Integer midpoint line, endpoints included.
    fn line(&mut self, (mut x0, mut y0): (i64, i64), (x1, y1): (i64, i64), color: [u8; 3]) {
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.put(x0, y0, color);
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }

    fn disc(&mut self, cx: i64, cy: i64, r: i64, color: [u8; 3]) {
        for y in -r..=r {
            for x in -r..=r {
                if x * x + y * y <= r * r {
                    self.put(cx + x, cy + y, color);
                }
            }
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self, RenderError> {
        let bad = |m: &str| RenderError::MalformedPpm(m.to_string());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("expected P6 with maxval 255"));
        }
        let width: u32 = fields[1].parse().map_err(|_| bad("width"))?;
        let height: u32 = fields[2].parse().map_err(|_| bad("height"))?;
        let pixels = bytes.get(pos + 1..).ok_or_else(|| bad("missing data"))?.to_vec();
        if pixels.len() != width as usize * height as usize * 3 {
            return Err(bad("pixel data length"));
        }
        Ok(Self { width, height, pixels, blank: false })
    }
}

/// Liang-Barsky clip of a segment to `[xmin, xmax] x [ymin, ymax]`.
fn clip_to_rect(
    (x0, y0): (f64, f64),
    (x1, y1): (f64, f64),
    (xmin, xmax, ymin, ymax): (f64, f64, f64, f64),
) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, x0 - xmin), (dx, xmax - x0), (-dy, y0 - ymin), (dy, ymax - y0)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return None;
            }
        }
    }
    Some(((x0 + t0 * dx, y0 + t0 * dy), (x0 + t1 * dx, y0 + t1 * dy)))
}

/// Cuts the part of a camera-space segment in front of the near plane.
fn clip_near(a: Vec3, b: Vec3) -> Option<(Vec3, Vec3)> {
    match (a.z >= NEAR_PLANE, b.z >= NEAR_PLANE) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (front_a, _) => {
            let t = (NEAR_PLANE - a.z) / (b.z - a.z);
            let cut = a + (b - a) * t;
            if front_a {
                Some((a, cut))
            } else {
                Some((cut, b))
            }
        }
    }
}

pub fn render_frame(
    pose: &CoordinatePose,
    topology: &SkeletonTopology,
    cam: &CameraPose,
    intr: &CameraIntrinsics,
) -> Result<RasterFrame, RenderError> {
    pose.validate(topology)?;
    let view = CameraView::new(cam, *intr)?;
    let mut frame = RasterFrame::filled(intr.width, intr.height, BACKGROUND);
    let cam_points: Vec<Vec3> = pose.positions.iter().map(|p| view.to_camera(*p)).collect();
    if cam_points.iter().all(|c| c.z <= BEHIND_DEPTH) {
        frame.blank = true;
        return Ok(frame);
    }
    let rect = (0.0, intr.width as f64 - 1.0, 0.0, intr.height as f64 - 1.0);
    for &j in topology.order() {
        let spec = topology.joint(j);
        let Some(p) = spec.parent else { continue };
        let Some((a, b)) = clip_near(cam_points[p], cam_points[j]) else { continue };
        let Some((pa, pb)) = clip_to_rect(view.pixel(a), view.pixel(b), rect) else { continue };
        let round = |(x, y): (f64, f64)| (x.round() as i64, y.round() as i64);
        frame.line(round(pa), round(pb), class_color(spec.dof_class));
    }
    for &j in topology.order() {
        if let Projection::Pixel { u, v, .. } = view.project(pose.positions[j]) {
            if u.abs() < 1e9 && v.abs() < 1e9 {
                let color = class_color(topology.joint(j).dof_class);
                frame.disc(u.round() as i64, v.round() as i64, JOINT_RADIUS, color);
            }
        }
    }
    Ok(frame)
}

pub enum ClipSource<'a> {
    Rotations(&'a RotationSequence),
    Coordinates(&'a CoordinateSequence),
}

impl ClipSource<'_> {
    fn frame_count(&self) -> usize {
        match self {
            ClipSource::Rotations(s) => s.frame_count(),
            ClipSource::Coordinates(s) => s.frames.len(),
        }
    }

    fn pose(&self, topology: &SkeletonTopology, f: usize) -> Result<CoordinatePose, RenderError> {
        match self {
            ClipSource::Rotations(s) => {
                Ok(forward_kinematics(topology, &s.frame(f), s.root_positions[f])?)
            }
            ClipSource::Coordinates(s) => Ok(s.frames[f].clone()),
        }
    }
}

/// One frame per animation frame, camera pose chosen by the hold schedule.
pub fn render_clip(
    source: ClipSource<'_>,
    topology: &SkeletonTopology,
    traj: &CameraTrajectory,
    intr: &CameraIntrinsics,
) -> Result<Vec<RasterFrame>, RenderError> {
    if traj.poses.is_empty() || traj.hold_frames.iter().sum::<usize>() == 0 {
        return Err(RenderError::EmptyTrajectory);
    }
    (0..source.frame_count())
        .into_par_iter()
        .map(|f| render_frame(&source.pose(topology, f)?, topology, traj.pose_at(f), intr))
        .collect()
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.ppm")
}

/// Writes `frame_000000.ppm`, ... into `dir` (created if missing). Frame files
/// left over from an earlier, longer clip are removed first.
pub fn write_clip(frames: &[RasterFrame], dir: &Path) -> Result<usize, RenderError> {
    let io = |e: std::io::Error| RenderError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if name.starts_with("frame_") && name.ends_with(".ppm") {
            fs::remove_file(&path).map_err(io)?;
        }
    }
    for (i, frame) in frames.iter().enumerate() {
        let mut file = fs::File::create(dir.join(frame_file_name(i))).map_err(io)?;
        file.write_all(&frame.to_ppm()).map_err(io)?;
    }
    Ok(frames.len())
}
