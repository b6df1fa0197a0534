use std::collections::HashMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use skelforge_core::camera::rcm_trajectory;
use skelforge_core::dataset::{
    audit_manifest, build_plan, count_frames, execute_plan, read_manifest, write_manifest, ClipInputs,
    PlanDocument,
};
use skelforge_core::dsi::dsi_pipeline;
use skelforge_core::rotation::{quaternion_from_axis_angle, RotationSequence};
use skelforge_core::seed::{derive_seed, to_hex};
use skelforge_core::{AnimationSet, CameraIntrinsics, DsiParams, Quaternion, RcmParams, SkeletonTopology, Vec3};

const PLAN: &str = r#"
[[category]]
name = "sport"
[[category.action]]
name = "swing"
label_id = 7
[[category.action.animation]]
animation_id = "swing_a"
variants = 2
viewpoints = 2
[[category.action]]
name = "jump"
label_id = 8
[[category.action.animation]]
animation_id = "jump_a"
variants = 1
viewpoints = 3
"#;

fn animation(topology: &SkeletonTopology, seed: u64) -> AnimationSet {
    let arm = topology.find("upper_arm_l").unwrap();
    let frames = 6;
    let mut tracks = vec![vec![Quaternion::IDENTITY; frames]; topology.len()];
    for f in 0..frames {
        tracks[arm][f] = quaternion_from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 0.1 * f as f64).unwrap();
    }
    let seq = RotationSequence { fps: 30.0, root_positions: vec![Vec3::new(0.0, 0.0, 1.0); frames], tracks };
    let params = DsiParams { variants: 2, seed, ..Default::default() };
    dsi_pipeline(&seq, &topology.weights(), &params).unwrap().set
}

fn hash_tree(root: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let digest = Sha256::digest(fs::read(&path).unwrap());
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, to_hex(&digest)));
            }
        }
    }
    out.sort();
    out
}

fn run(root: &Path) -> skelforge_core::ClipManifest {
    let topology = SkeletonTopology::default_53();
    let plan = build_plan(PlanDocument::parse(PLAN).unwrap()).unwrap();
    let mut animations = HashMap::new();
    let mut trajectories = HashMap::new();
    for (i, anim) in plan.animations().enumerate() {
        animations.insert(anim.animation_id.clone(), animation(&topology, i as u64));
        for v in 0..anim.variants {
            for p in 0..anim.viewpoints {
                let seed = derive_seed(5, "camera", &[i as u64, v as u64, p as u64]);
                let params = RcmParams { moves: 2, hold_frames: 4, seed, ..Default::default() };
                let traj = rcm_trajectory(Vec3::new(-3.0, 0.0, 1.0), &params).unwrap();
                trajectories.insert((anim.animation_id.clone(), v, p), traj);
            }
        }
    }
    let intrinsics = CameraIntrinsics { focal_px: 60.0, cx: 40.0, cy: 30.0, width: 80, height: 60 };
    let inputs = ClipInputs { animations: &animations, trajectories: &trajectories, topology: &topology, intrinsics };
    execute_plan(&plan, &inputs, root).unwrap()
}

#[test]
fn clips_match_the_plan_and_the_disk() {
    let a = tempfile::tempdir().unwrap();
    let manifest = run(a.path());
    assert_eq!(manifest.records.len(), 2 * 2 + 3);
    audit_manifest(&manifest, a.path()).unwrap();
    for r in &manifest.records {
        assert_eq!(r.clip_path.split('/').count(), 5);
        assert_eq!(count_frames(&a.path().join(&r.clip_path)).unwrap(), r.end_frame - r.start_frame + 1);
        let expected = if r.action == "swing" { 7 } else { 8 };
        assert_eq!(r.label_id, expected);
    }
    let csv = a.path().join("manifest.csv");
    write_manifest(&manifest, &csv).unwrap();
    assert_eq!(read_manifest(&csv).unwrap(), manifest.records);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(!text.contains('\r'));
}

#[test]
fn reruns_are_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ma, mb) = (run(a.path()), run(b.path()));
    assert_eq!(ma, mb);
    assert_eq!(hash_tree(a.path()), hash_tree(b.path()));
}

#[test]
fn tampering_fails_the_audit() {
    let a = tempfile::tempdir().unwrap();
    let manifest = run(a.path());
    let victim = a.path().join(&manifest.records[0].clip_path).join("frame_000000.ppm");
    fs::remove_file(victim).unwrap();
    assert!(audit_manifest(&manifest, a.path()).is_err());
}
