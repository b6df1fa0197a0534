#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use skelforge_core::formats::{write_json, CoordinateFile};
use skelforge_core::rotation::quaternion_from_axis_angle;
use skelforge_core::seed::to_hex;
use skelforge_core::skeleton::{forward_kinematics, load_topology};
use skelforge_core::{CoordinateSequence, Quaternion, SkeletonTopology, Vec3};

pub const TOY_TOPOLOGY: &str = r#"
name = "toy-5"

[[joint]]
id = 0
name = "root"
dof_class = "Root"
reference_child = 1
weight = 1.0
rest_direction = [0.0, 0.0, 1.0]
bone_length = 0.0

[[joint]]
id = 1
name = "hip"
parent = 0
dof_class = "Static"
weight = 0.0
rest_direction = [0.0, 1.0, 0.0]
bone_length = 0.1

[[joint]]
id = 2
name = "spine"
parent = 0
dof_class = "TwoD"
weight = 1.0
rest_direction = [0.0, 0.0, 1.0]
bone_length = 0.5

[[joint]]
id = 3
name = "upper_arm"
parent = 2
dof_class = "ThreeD"
reference_child = 4
weight = 1.0
rest_direction = [0.0, 1.0, 0.0]
bone_length = 0.3

[[joint]]
id = 4
name = "forearm"
parent = 3
dof_class = "OneD"
weight = 1.0
rest_direction = [0.0, 1.0, 0.0]
bone_length = 0.25
hinge_axis = [0.0, 0.0, 1.0]
"#;

pub const TOY_PLAN: &str = r#"
[[category]]
name = "gesture"

[[category.action]]
name = "wave"
label_id = 1

[[category.action.animation]]
animation_id = "wave_a"
variants = 2
viewpoints = 2
"#;

pub const TOY_CONFIG: &str = r#"
seed = 11
topology = "topology.toml"
plan = "plan.toml"
output = "out"

[[animation]]
id = "wave_a"
input = "wave.json"

[camera]
moves = 3
hold_frames = 8

[intrinsics]
focal_px = 120.0
cx = 80.0
cy = 60.0
width = 160
height = 120
"#;

pub fn toy_topology() -> SkeletonTopology {
    load_topology(TOY_TOPOLOGY).unwrap()
}

fn axis(x: f64, y: f64, z: f64, angle: f64) -> Quaternion {
    quaternion_from_axis_angle(Vec3::new(x, y, z).normalize(), angle).unwrap()
}

/// 20 frames of a waving arm with a swaying spine and a slow turn.
pub fn toy_motion(topology: &SkeletonTopology) -> CoordinateSequence {
    let frames = (0..20)
        .map(|f| {
            let t = f as f64;
            let rotations = vec![
                axis(0.0, 0.0, 1.0, 0.05 * t),
                Quaternion::IDENTITY,
                axis(1.0, 0.0, 0.0, 0.2 * (t / 3.0).sin()),
                axis(0.0, 0.3, 1.0, 0.5 * (t / 4.0).sin()),
                axis(0.0, 0.0, 1.0, 0.6 + 0.3 * (t / 5.0).sin()),
            ];
            forward_kinematics(topology, &rotations, Vec3::new(0.02 * t, 0.0, 1.0)).unwrap()
        })
        .collect();
    CoordinateSequence { fps: 30.0, frames }
}

/// Writes topology, plan, motion and config into `dir`; returns the config path.
pub fn write_toy(dir: &Path) -> PathBuf {
    let topology = toy_topology();
    fs::write(dir.join("topology.toml"), TOY_TOPOLOGY).unwrap();
    fs::write(dir.join("plan.toml"), TOY_PLAN).unwrap();
    let motion = toy_motion(&topology);
    write_json(&dir.join("wave.json"), &CoordinateFile::from_sequence(&motion, &topology)).unwrap();
    let config = dir.join("config.toml");
    fs::write(&config, TOY_CONFIG).unwrap();
    config
}

pub fn skelforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelforge")).args(args).output().unwrap()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Relative path and SHA-256 of every file under `root`, sorted.
pub fn hash_tree(root: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let digest = Sha256::digest(fs::read(&path).unwrap());
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, to_hex(&digest)));
            }
        }
    }
    out.sort();
    out
}
