//! Hierarchical clip recording and annotation.
//!
//! A plan lists categories, their actions (each with one label id) and the
//! animations recorded for each action, with how many variants and viewpoints
//! to capture. Every (animation, variant, viewpoint) becomes its own clip
//! directory `category/action/animation/variant_VVV/viewpoint_PPP/`. Clips
//! hold a single action, so each is labeled over its whole length.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::camera::CameraTrajectory;
use crate::dsi::AnimationSet;
use crate::render::{render_clip, write_clip, CameraIntrinsics, ClipSource, RenderError};
use crate::seed::to_hex;
use crate::skeleton::SkeletonTopology;

pub const MANIFEST_HEADER: [&str; 9] = [
    "category",
    "action",
    "animation_id",
    "variant_id",
    "viewpoint_id",
    "clip_path",
    "start_frame",
    "end_frame",
    "label_id",
];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("plan document: {0}")]
    Parse(String),
    #[error("label id {0} is used by more than one action")]
    DuplicateLabel(u32),
    #[error("action {0} has no animations")]
    EmptyAction(String),
    #[error("category {0} has no actions")]
    EmptyCategory(String),
    #[error("animation {animation}: {field} must be at least 1")]
    ZeroCount { animation: String, field: &'static str },
    #[error("name {0:?} cannot be used as a directory")]
    BadName(String),
    #[error("clip {0} is planned twice")]
    DuplicateClip(String),
    #[error("clip {clip}: no animation variant {variant} for {animation}")]
    MissingAnimation { clip: String, animation: String, variant: usize },
    #[error("clip {0}: no camera trajectory")]
    MissingTrajectory(String),
    #[error("clip {clip}: {source}")]
    Render {
        clip: String,
        #[source]
        source: RenderError,
    },
    #[error("clip {clip}: {reason}")]
    Audit { clip: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::Io { path: path.display().to_string(), message: e.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnimationSpec {
    pub animation_id: String,
    pub variants: usize,
    pub viewpoints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub name: String,
    pub label_id: u32,
    #[serde(rename = "animation", default)]
    pub animations: Vec<AnimationSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub name: String,
    #[serde(rename = "action", default)]
    pub actions: Vec<ActionSpec>,
}

/// The plan document as written: `[[category]]`, `[[category.action]]`,
/// `[[category.action.animation]]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    #[serde(rename = "category", default)]
    pub categories: Vec<CategorySpec>,
}

impl PlanDocument {
    pub fn parse(source: &str) -> Result<Self, DatasetError> {
        toml::from_str(source).map_err(|e| DatasetError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedClip {
    pub category: String,
    pub action: String,
    pub animation_id: String,
    pub variant_id: usize,
    pub viewpoint_id: usize,
    pub label_id: u32,
}

impl PlannedClip {
    pub fn clip_path(&self) -> String {
        format!(
            "{}/{}/{}/variant_{:03}/viewpoint_{:03}",
            self.category, self.action, self.animation_id, self.variant_id, self.viewpoint_id
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordingPlan {
    pub document: PlanDocument,
    /// Expanded clips, sorted by clip path.
    pub clips: Vec<PlannedClip>,
    /// Hex SHA-256 of the canonical JSON form of the document.
    pub digest: String,
}

impl RecordingPlan {
    /// `(animation_id, variants, viewpoints)` for every planned animation.
    pub fn animations(&self) -> impl Iterator<Item = &AnimationSpec> {
        self.document.categories.iter().flat_map(|c| c.actions.iter().flat_map(|a| &a.animations))
    }
}

fn check_name(name: &str) -> Result<(), DatasetError> {
    let bad = name.is_empty()
        || name == "."
        || name == ".."
        || name.contains(['/', '\\', ','])
        || name.chars().any(char::is_control);
    if bad {
        return Err(DatasetError::BadName(name.to_string()));
    }
    Ok(())
}

pub fn build_plan(document: PlanDocument) -> Result<RecordingPlan, DatasetError> {
    let mut labels = BTreeSet::new();
    let mut clips = Vec::new();
    for cat in &document.categories {
        check_name(&cat.name)?;
        if cat.actions.is_empty() {
            return Err(DatasetError::EmptyCategory(cat.name.clone()));
        }
        for action in &cat.actions {
            check_name(&action.name)?;
            if !labels.insert(action.label_id) {
                return Err(DatasetError::DuplicateLabel(action.label_id));
            }
            if action.animations.is_empty() {
                return Err(DatasetError::EmptyAction(action.name.clone()));
            }
            for anim in &action.animations {
                check_name(&anim.animation_id)?;
                for (field, n) in [("variants", anim.variants), ("viewpoints", anim.viewpoints)] {
                    if n == 0 {
                        return Err(DatasetError::ZeroCount {
                            animation: anim.animation_id.clone(),
                            field,
                        });
                    }
                }
                for variant_id in 0..anim.variants {
                    for viewpoint_id in 0..anim.viewpoints {
                        clips.push(PlannedClip {
                            category: cat.name.clone(),
                            action: action.name.clone(),
                            animation_id: anim.animation_id.clone(),
                            variant_id,
                            viewpoint_id,
                            label_id: action.label_id,
                        });
                    }
                }
            }
        }
    }
    clips.sort_by_key(PlannedClip::clip_path);
    if let Some(w) = clips.windows(2).find(|w| w[0].clip_path() == w[1].clip_path()) {
        return Err(DatasetError::DuplicateClip(w[0].clip_path()));
    }
    let canonical = serde_json::to_vec(&document).expect("plan serializes");
    let digest = to_hex(&Sha256::digest(&canonical));
    Ok(RecordingPlan { document, clips, digest })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub category: String,
    pub action: String,
    pub animation_id: String,
    pub variant_id: usize,
    pub viewpoint_id: usize,
    pub clip_path: String,
    pub start_frame: usize,
    pub end_frame: usize,
    pub label_id: u32,
}

impl ClipRecord {
    pub fn frame_count(&self) -> usize {
        self.end_frame - self.start_frame + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClipManifest {
    /// Sorted by clip path.
    pub records: Vec<ClipRecord>,
    pub plan_digest: String,
}

/// Inputs for `execute_plan`: one animation set per animation id and one
/// trajectory per (animation, variant, viewpoint).
pub struct ClipInputs<'a> {
    pub animations: &'a HashMap<String, AnimationSet>,
    pub trajectories: &'a HashMap<(String, usize, usize), CameraTrajectory>,
    pub topology: &'a SkeletonTopology,
    pub intrinsics: CameraIntrinsics,
}

/// Renders every planned clip under `root` and returns the manifest.
pub fn execute_plan(
    plan: &RecordingPlan,
    inputs: &ClipInputs<'_>,
    root: &Path,
) -> Result<ClipManifest, DatasetError> {
    let records = plan
        .clips
        .par_iter()
        .map(|clip| {
            let path = clip.clip_path();
            let seq = inputs
                .animations
                .get(&clip.animation_id)
                .and_then(|set| set.variants.get(clip.variant_id))
                .ok_or_else(|| DatasetError::MissingAnimation {
                    clip: path.clone(),
                    animation: clip.animation_id.clone(),
                    variant: clip.variant_id,
                })?;
            let traj = inputs
                .trajectories
                .get(&(clip.animation_id.clone(), clip.variant_id, clip.viewpoint_id))
                .ok_or_else(|| DatasetError::MissingTrajectory(path.clone()))?;
            let render = |source| DatasetError::Render { clip: path.clone(), source };
            let frames = render_clip(ClipSource::Rotations(seq), inputs.topology, traj, &inputs.intrinsics)
                .map_err(render)?;
            if frames.is_empty() {
                return Err(DatasetError::Audit { clip: path.clone(), reason: "no frames".into() });
            }
            let written = write_clip(&frames, &root.join(&path)).map_err(render)?;
            Ok(ClipRecord {
                category: clip.category.clone(),
                action: clip.action.clone(),
                animation_id: clip.animation_id.clone(),
                variant_id: clip.variant_id,
                viewpoint_id: clip.viewpoint_id,
                clip_path: path,
                start_frame: 0,
                end_frame: written - 1,
                label_id: clip.label_id,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = ClipManifest { records, plan_digest: plan.digest.clone() };
    audit_manifest(&manifest, root)?;
    Ok(manifest)
}

/// Number of `frame_*.ppm` files directly inside `dir`.
pub fn count_frames(dir: &Path) -> Result<usize, DatasetError> {
    let entries = fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut n = 0;
    for entry in entries {
        let name = entry.map_err(|e| io_err(dir, e))?.file_name();
        let name = name.to_string_lossy();
        if name.starts_with("frame_") && name.ends_with(".ppm") {
            n += 1;
        }
    }
    Ok(n)
}

/// Checks paths exist, are five levels deep, hold exactly the annotated
/// number of frames, and that no clip tuple repeats.
pub fn audit_manifest(manifest: &ClipManifest, root: &Path) -> Result<(), DatasetError> {
    let mut seen = BTreeSet::new();
    for r in &manifest.records {
        let fail = |reason: String| DatasetError::Audit { clip: r.clip_path.clone(), reason };
        let key = (&r.category, &r.action, &r.animation_id, r.variant_id, r.viewpoint_id);
        if !seen.insert(key) {
            return Err(fail("duplicate clip tuple".into()));
        }
        if r.clip_path.split('/').count() != 5 {
            return Err(fail("hierarchy is not five levels deep".into()));
        }
        if r.start_frame > r.end_frame {
            return Err(fail("start after end".into()));
        }
        let dir = root.join(&r.clip_path);
        if !dir.is_dir() {
            return Err(fail("directory missing".into()));
        }
        let on_disk = count_frames(&dir)?;
        if on_disk != r.frame_count() {
            return Err(fail(format!("{on_disk} frames on disk, {} annotated", r.frame_count())));
        }
    }
    Ok(())
}

/// CSV with the fixed header, rows sorted by clip path, LF line endings.
pub fn write_manifest(manifest: &ClipManifest, path: &Path) -> Result<(), DatasetError> {
    let mut records = manifest.records.clone();
    records.sort_by(|a, b| a.clip_path.cmp(&b.clip_path));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(MANIFEST_HEADER).map_err(|e| io_err(path, e))?;
    for r in &records {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ClipRecord>, DatasetError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = r.headers().map_err(|e| io_err(path, e))?.clone();
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(io_err(path, "unexpected manifest header"));
    }
    r.deserialize().collect::<Result<Vec<ClipRecord>, _>>().map_err(|e| io_err(path, e))
}
