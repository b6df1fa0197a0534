use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use skelforge_core::{ClipManifest, DsiParams, RcmParams};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult, Tagged};
use crate::layout::WorkLayout;
use crate::stages::{self, camera_seed, dsi_seed};

pub const WORK_DIR: &str = "work";
pub const DATASET_DIR: &str = "dataset";
pub const QUARANTINE_DIR: &str = "quarantine";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Serialize)]
pub struct AnimationReport {
    pub id: String,
    pub source_frames: usize,
    pub frames: usize,
    pub source_fps: f64,
    pub fps: f64,
    pub variants: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub clips: usize,
    pub plan_digest: String,
    pub animations: Vec<AnimationReport>,
    pub timings: Vec<StageTiming>,
}

impl RunReport {
    pub fn summary(&self) -> String {
        let mut s = format!("{} clips (seed {}, plan {})\n", self.clips, self.seed, &self.plan_digest[..12]);
        for a in &self.animations {
            s += &format!(
                "  {}: {} -> {} frames, {} -> {:.3} fps, {} variants\n",
                a.id, a.source_frames, a.frames, a.source_fps, a.fps, a.variants
            );
            for w in &a.warnings {
                s += &format!("    warning: {w}\n");
            }
        }
        for t in &self.timings {
            s += &format!("  {:<12} {:.3} s\n", t.stage, t.seconds);
        }
        s
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub manifest: ClipManifest,
    pub report: RunReport,
}

pub fn work_dir(output: &Path) -> PathBuf {
    output.join(WORK_DIR)
}

pub fn dataset_dir(output: &Path) -> PathBuf {
    output.join(DATASET_DIR)
}

fn remove_if_present(path: &Path) -> std::io::Result<()> {
    if path.exists() {
        fs::remove_dir_all(path)?;
    }
    Ok(())
}

/// Moves partial outputs under `quarantine/` and records the failure there.
fn quarantine(output: &Path, err: &CliError) {
    let q = output.join(QUARANTINE_DIR);
    let _ = fs::create_dir_all(&q);
    for dir in [WORK_DIR, DATASET_DIR] {
        let src = output.join(dir);
        if src.exists() {
            let _ = fs::rename(&src, q.join(dir));
        }
    }
    let _ = fs::write(q.join("error.txt"), format!("{err}\n"));
}

/// parse -> convert -> interpolate -> variants -> camera -> render/build -> manifest.
///
/// Every stage reads the files written by the stage before it. On failure the
/// partial outputs are moved to `<output>/quarantine` and the error is returned.
pub fn run_pipeline(config: &PipelineConfig) -> CliResult<RunOutput> {
    let validated = config.validate()?;
    let out = &config.output;
    for dir in [WORK_DIR, DATASET_DIR, QUARANTINE_DIR] {
        remove_if_present(&out.join(dir)).runtime("prepare")?;
    }
    match execute(config, &validated) {
        Ok(o) => Ok(o),
        Err(e) => {
            quarantine(out, &e);
            Err(e)
        }
    }
}

fn execute(config: &PipelineConfig, v: &crate::config::Validated) -> CliResult<RunOutput> {
    let work = WorkLayout::new(work_dir(&config.output));
    let mut timings: Vec<StageTiming> = Vec::new();
    let mut time = |stage: &str, start: Instant| {
        let seconds = start.elapsed().as_secs_f64();
        match timings.iter_mut().find(|t| t.stage == stage) {
            Some(t) => t.seconds += seconds,
            None => timings.push(StageTiming { stage: stage.to_string(), seconds }),
        }
    };
    let mut animations = Vec::new();
    for anim in v.plan.animations() {
        let id = anim.animation_id.as_str();
        let input = config.input_for(id).expect("validated coverage");

        let t = Instant::now();
        let rotations = stages::convert(&v.topology, input, &work.rotation(id))?;
        time("convert", t);

        let t = Instant::now();
        let interp = stages::interpolate(&v.topology, &work.rotation(id), &config.dsi, &work.interpolated(id))?;
        time("interpolate", t);

        let t = Instant::now();
        let params = DsiParams { variants: anim.variants, seed: dsi_seed(config.seed, id), ..config.dsi.clone() };
        let (_, smooth_warnings) = stages::variants(&v.topology, &work.interpolated(id), &params, &work.variants(id))?;
        time("variants", t);

        let t = Instant::now();
        let origin = rotations.root_positions[0];
        for variant in 0..anim.variants {
            for viewpoint in 0..anim.viewpoints {
                let params = RcmParams { seed: camera_seed(config.seed, id, variant, viewpoint), ..config.camera.clone() };
                stages::camera(origin, &params, &work.camera(id, variant, viewpoint))?;
            }
        }
        time("camera", t);

        let mut warnings: Vec<String> = interp.warnings.iter().map(ToString::to_string).collect();
        for w in smooth_warnings.iter().map(ToString::to_string) {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        animations.push(AnimationReport {
            id: id.to_string(),
            source_frames: interp.source_frames,
            frames: interp.frames,
            source_fps: rotations.fps,
            fps: interp.fps,
            variants: anim.variants,
            warnings,
        });
    }

    let t = Instant::now();
    let manifest = stages::build(&config.plan, &work, &v.topology, &config.intrinsics, &dataset_dir(&config.output))?;
    time("build", t);

    let report = RunReport {
        seed: config.seed,
        clips: manifest.records.len(),
        plan_digest: manifest.plan_digest.clone(),
        animations,
        timings,
    };
    skelforge_core::formats::write_json(&config.output.join(REPORT_FILE), &report).runtime("report")?;
    Ok(RunOutput { manifest, report })
}
