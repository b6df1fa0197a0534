//! Pipeline configuration document.
//!
//! ```toml
//! seed = 7
//! topology = "topology.toml"   # omit for the built-in 53-joint skeleton
//! plan = "plan.toml"
//! output = "out"
//!
//! [[animation]]
//! id = "swing_a"
//! input = "swing.json"
//!
//! [dsi]          # DsiParams
//! [camera]       # RcmParams
//! [intrinsics]   # CameraIntrinsics
//! ```
//!
//! Relative paths are resolved against the directory holding the document.
//! Command-line flags override document fields, which override defaults.
//! The `seed` and `variants` fields inside `[dsi]` and the `seed` inside
//! `[camera]` are replaced by values derived from the global seed and the plan.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use skelforge_core::dataset::{build_plan, PlanDocument};
use skelforge_core::{CameraIntrinsics, DsiParams, RcmParams, RecordingPlan, SkeletonTopology};

use crate::error::{invalid, CliResult, Tagged};
use crate::stages::load_topology;

const STAGE: &str = "config";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnimationInput {
    pub id: String,
    pub input: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    seed: Option<u64>,
    topology: Option<PathBuf>,
    plan: PathBuf,
    output: Option<PathBuf>,
    #[serde(rename = "animation", default)]
    animations: Vec<AnimationInput>,
    #[serde(default)]
    dsi: DsiParams,
    #[serde(default)]
    camera: RcmParams,
    #[serde(default)]
    intrinsics: CameraIntrinsics,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub topology: Option<PathBuf>,
    pub animations: Vec<AnimationInput>,
    pub dsi: DsiParams,
    pub camera: RcmParams,
    pub intrinsics: CameraIntrinsics,
    pub plan: PathBuf,
    pub output: PathBuf,
    pub seed: u64,
}

/// Everything `run` needs that can be checked before any work starts.
pub struct Validated {
    pub topology: SkeletonTopology,
    pub plan: RecordingPlan,
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| invalid(STAGE, format!("{}: {e}", path.display())))?;
        let doc: ConfigDocument =
            toml::from_str(&text).map_err(|e| invalid(STAGE, format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let output = match (&overrides.output, doc.output) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => resolve(&base, o),
            (None, None) => base.join("output"),
        };
        Ok(Self {
            topology: doc.topology.map(|p| resolve(&base, p)),
            animations: doc
                .animations
                .into_iter()
                .map(|a| AnimationInput { id: a.id, input: resolve(&base, a.input) })
                .collect(),
            dsi: doc.dsi,
            camera: doc.camera,
            intrinsics: doc.intrinsics,
            plan: resolve(&base, doc.plan),
            output,
            seed: overrides.seed.or(doc.seed).unwrap_or(0),
        })
    }

    pub fn input_for(&self, animation: &str) -> Option<&Path> {
        self.animations.iter().find(|a| a.id == animation).map(|a| a.input.as_path())
    }

    /// Checks paths, parameters and plan coverage without touching the output.
    pub fn validate(&self) -> CliResult<Validated> {
        if let Some(t) = &self.topology {
            if !t.is_file() {
                return Err(invalid(STAGE, format!("topology file {} does not exist", t.display())));
            }
        }
        let topology = load_topology(self.topology.as_deref())?;
        self.dsi.validate().validation(STAGE)?;
        self.camera.validate().validation(STAGE)?;
        self.intrinsics.validate().validation(STAGE)?;
        let text = fs::read_to_string(&self.plan)
            .map_err(|e| invalid(STAGE, format!("plan {}: {e}", self.plan.display())))?;
        let plan = build_plan(PlanDocument::parse(&text).validation(STAGE)?).validation(STAGE)?;

        let mut ids = BTreeSet::new();
        for a in &self.animations {
            if !ids.insert(a.id.as_str()) {
                return Err(invalid(STAGE, format!("animation {} listed twice", a.id)));
            }
            if !a.input.is_file() {
                return Err(invalid(STAGE, format!("input {} does not exist", a.input.display())));
            }
        }
        let mut planned = BTreeSet::new();
        for anim in plan.animations() {
            if !planned.insert(anim.animation_id.as_str()) {
                return Err(invalid(STAGE, format!("animation {} appears twice in the plan", anim.animation_id)));
            }
            if !ids.contains(anim.animation_id.as_str()) {
                return Err(invalid(STAGE, format!("no input for planned animation {}", anim.animation_id)));
            }
        }
        if let Some(extra) = ids.difference(&planned).next() {
            return Err(invalid(STAGE, format!("animation {extra} is not in the plan")));
        }
        Ok(Validated { topology, plan })
    }
}
