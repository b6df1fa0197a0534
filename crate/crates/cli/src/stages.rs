//! One function per subcommand. Each reads its inputs from files and writes
//! its outputs to files, so `run` and a chain of subcommands agree exactly.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use skelforge_core::camera::rcm_trajectory;
use skelforge_core::dataset::{build_plan, execute_plan, write_manifest, ClipInputs, PlanDocument};
use skelforge_core::dsi::{dsi_interpolate, dsi_variants, DsiWarning};
use skelforge_core::formats::{
    read_json, variant_file_name, write_json, CoordinateFile, RotationFile, TrajectoryFile, VariantEntry,
    VariantIndex,
};
use skelforge_core::render::{render_clip, write_clip, ClipSource};
use skelforge_core::rotation::sequence_to_rotation;
use skelforge_core::seed::derive_seed;
use skelforge_core::{
    AnimationSet, CameraIntrinsics, CameraTrajectory, ClipManifest, DsiParams, RcmParams, RotationSequence,
    SkeletonTopology, Vec3,
};

use crate::error::{invalid, CliResult, Tagged};
use crate::layout::{manifest_path, WorkLayout, DIGEST_FILE, INDEX_FILE};

/// Seed of the noise stage for one animation.
pub fn dsi_seed(global: u64, animation: &str) -> u64 {
    derive_seed(global, &format!("dsi/{animation}"), &[])
}

/// Seed of the camera walk for one (animation, variant, viewpoint).
pub fn camera_seed(global: u64, animation: &str, variant: usize, viewpoint: usize) -> u64 {
    derive_seed(global, &format!("camera/{animation}"), &[variant as u64, viewpoint as u64])
}

/// Built-in 53-joint topology when `path` is `None`.
pub fn load_topology(path: Option<&Path>) -> CliResult<SkeletonTopology> {
    match path {
        None => Ok(SkeletonTopology::default_53()),
        Some(p) => SkeletonTopology::from_file(p).validation("topology"),
    }
}

/// Parses a TOML parameter file, or returns the defaults when `path` is `None`.
pub fn load_toml<T: DeserializeOwned + Default>(path: Option<&Path>, stage: &str) -> CliResult<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(|e| invalid(stage, format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(stage, format!("{}: {e}", path.display())))
}

/// Interpolated sequence together with each frame's position on the source axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolatedFile {
    pub sample_times: Vec<f64>,
    pub sequence: RotationFile,
}

pub fn convert(topology: &SkeletonTopology, input: &Path, output: &Path) -> CliResult<RotationSequence> {
    const STAGE: &str = "convert";
    let coords = read_json::<CoordinateFile>(input)
        .validation(STAGE)?
        .to_sequence(topology)
        .validation(STAGE)?;
    let rotations = sequence_to_rotation(topology, &coords).runtime(STAGE)?;
    write_json(output, &RotationFile::from_sequence(&rotations, topology)).runtime(STAGE)?;
    Ok(rotations)
}

pub struct InterpolateSummary {
    pub source_frames: usize,
    pub frames: usize,
    pub fps: f64,
    pub warnings: Vec<DsiWarning>,
}

pub fn interpolate(
    topology: &SkeletonTopology,
    input: &Path,
    params: &DsiParams,
    output: &Path,
) -> CliResult<InterpolateSummary> {
    const STAGE: &str = "interpolate";
    params.validate().validation(STAGE)?;
    let seq = read_json::<RotationFile>(input).validation(STAGE)?.to_sequence(topology).validation(STAGE)?;
    let out = dsi_interpolate(&seq, &topology.weights(), params).runtime(STAGE)?;
    let file = InterpolatedFile {
        sample_times: out.sample_times,
        sequence: RotationFile::from_sequence(&out.sequence, topology),
    };
    write_json(output, &file).runtime(STAGE)?;
    Ok(InterpolateSummary {
        source_frames: seq.frame_count(),
        frames: out.sequence.frame_count(),
        fps: out.sequence.fps,
        warnings: out.warnings,
    })
}

/// Draws `params.variants` noisy variants of an interpolated sequence, smooths
/// them and writes `index.json` plus one rotation file per variant.
pub fn variants(
    topology: &SkeletonTopology,
    input: &Path,
    params: &DsiParams,
    out_dir: &Path,
) -> CliResult<(AnimationSet, Vec<DsiWarning>)> {
    const STAGE: &str = "variants";
    params.validate().validation(STAGE)?;
    let file = read_json::<InterpolatedFile>(input).validation(STAGE)?;
    let seq = file.sequence.to_sequence(topology).validation(STAGE)?;
    if file.sample_times.len() != seq.frame_count() {
        return Err(invalid(STAGE, "sample_times length differs from the frame count"));
    }
    let (set, warnings) = dsi_variants(&seq, file.sample_times, params).runtime(STAGE)?;
    let mut entries = Vec::with_capacity(set.variants.len());
    for (v, (variant, &seed)) in set.variants.iter().zip(&set.seeds).enumerate() {
        let name = variant_file_name(v);
        write_json(&out_dir.join(&name), &RotationFile::from_sequence(variant, topology)).runtime(STAGE)?;
        entries.push(VariantEntry { file: name, seed });
    }
    let index = VariantIndex {
        fps: seq.fps,
        frames: seq.frame_count(),
        source_times: set.source_times.clone(),
        variants: entries,
    };
    write_json(&out_dir.join(INDEX_FILE), &index).runtime(STAGE)?;
    Ok((set, warnings))
}

/// Reads an animation set written by [`variants`].
pub fn load_animation_set(topology: &SkeletonTopology, dir: &Path) -> CliResult<AnimationSet> {
    const STAGE: &str = "load variants";
    let index = read_json::<VariantIndex>(&dir.join(INDEX_FILE)).validation(STAGE)?;
    let mut variants = Vec::with_capacity(index.variants.len());
    for entry in &index.variants {
        let seq = read_json::<RotationFile>(&dir.join(&entry.file))
            .validation(STAGE)?
            .to_sequence(topology)
            .validation(STAGE)?;
        if seq.frame_count() != index.frames {
            return Err(invalid(STAGE, format!("{}: frame count differs from index.json", entry.file)));
        }
        variants.push(seq);
    }
    let set = AnimationSet {
        variants,
        seeds: index.variants.iter().map(|e| e.seed).collect(),
        source_times: index.source_times,
    };
    set.validate().validation(STAGE)?;
    Ok(set)
}

pub fn camera(origin: Vec3, params: &RcmParams, output: &Path) -> CliResult<CameraTrajectory> {
    const STAGE: &str = "camera";
    let traj = rcm_trajectory(origin, params).validation(STAGE)?;
    write_json(output, &TrajectoryFile::from_trajectory(&traj, params.seed)).runtime(STAGE)?;
    Ok(traj)
}

pub fn load_trajectory(path: &Path) -> CliResult<CameraTrajectory> {
    let traj = read_json::<TrajectoryFile>(path).validation("load camera")?.to_trajectory();
    if traj.poses.is_empty() || traj.hold_frames.iter().all(|&h| h == 0) {
        return Err(invalid("load camera", format!("{}: empty trajectory", path.display())));
    }
    Ok(traj)
}

/// Renders one rotation file through one trajectory into `out_dir`.
pub fn render(
    topology: &SkeletonTopology,
    input: &Path,
    trajectory: &Path,
    intrinsics: &CameraIntrinsics,
    out_dir: &Path,
) -> CliResult<usize> {
    const STAGE: &str = "render";
    intrinsics.validate().validation(STAGE)?;
    let seq = read_json::<RotationFile>(input).validation(STAGE)?.to_sequence(topology).validation(STAGE)?;
    let traj = load_trajectory(trajectory)?;
    let frames = render_clip(ClipSource::Rotations(&seq), topology, &traj, intrinsics).runtime(STAGE)?;
    write_clip(&frames, out_dir).runtime(STAGE)
}

/// Renders every clip of a plan from the artifacts under `work` and writes
/// the manifest and the plan digest into `out`.
pub fn build(
    plan_path: &Path,
    work: &WorkLayout,
    topology: &SkeletonTopology,
    intrinsics: &CameraIntrinsics,
    out: &Path,
) -> CliResult<ClipManifest> {
    const STAGE: &str = "build";
    intrinsics.validate().validation(STAGE)?;
    let text = fs::read_to_string(plan_path).map_err(|e| invalid(STAGE, format!("{}: {e}", plan_path.display())))?;
    let plan = build_plan(PlanDocument::parse(&text).validation(STAGE)?).validation(STAGE)?;
    let mut animations = std::collections::HashMap::new();
    let mut trajectories = std::collections::HashMap::new();
    for anim in plan.animations() {
        let id = &anim.animation_id;
        let set = load_animation_set(topology, &work.variants(id))?;
        if set.variants.len() < anim.variants {
            return Err(invalid(
                STAGE,
                format!("{id}: plan needs {} variants, work has {}", anim.variants, set.variants.len()),
            ));
        }
        animations.insert(id.clone(), set);
        for v in 0..anim.variants {
            for p in 0..anim.viewpoints {
                trajectories.insert((id.clone(), v, p), load_trajectory(&work.camera(id, v, p))?);
            }
        }
    }
    let inputs = ClipInputs { animations: &animations, trajectories: &trajectories, topology, intrinsics: *intrinsics };
    let manifest = execute_plan(&plan, &inputs, out).runtime(STAGE)?;
    write_manifest(&manifest, &manifest_path(out)).runtime(STAGE)?;
    fs::write(out.join(DIGEST_FILE), format!("{}\n", plan.digest)).runtime(STAGE)?;
    Ok(manifest)
}
