//! Joint hierarchy, coordinate poses and forward kinematics.
//!
//! A joint owns the bone that runs from its parent's node to its own node. Its
//! local quaternion rotates that bone (and everything below it) relative to the
//! parent's frame, starting from the rest pose stored in the topology.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quaternion::Quaternion;
use crate::Vec3;

/// Tolerance on `rest_direction` and hinge axis norms.
pub const UNIT_TOLERANCE: f64 = 1e-9;
/// Tolerance on the norm of quaternions handed to forward kinematics.
pub const FK_QUATERNION_TOLERANCE: f64 = 1e-6;

const DEFAULT_TOPOLOGY: &str = include_str!("../data/default_topology.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DofClass {
    /// Yaw about the vertical axis only.
    Root,
    ThreeD,
    /// Swing without roll about the bone axis.
    TwoD,
    /// Pitch about the joint's hinge axis only.
    OneD,
    Static,
}

impl fmt::Display for DofClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DofClass::Root => "Root",
            DofClass::ThreeD => "ThreeD",
            DofClass::TwoD => "TwoD",
            DofClass::OneD => "OneD",
            DofClass::Static => "Static",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SkeletonError {
    #[error("topology document does not parse: {0}")]
    Parse(String),
    #[error("cannot read topology document: {0}")]
    Io(String),
    #[error("topology has no joints")]
    Empty,
    #[error("duplicate joint id {0}")]
    DuplicateId(usize),
    #[error("joint ids must be 0..{count} without gaps (found {id})")]
    NonContiguousId { id: usize, count: usize },
    #[error("expected exactly one Root joint, found {0}")]
    RootCount(usize),
    #[error("root joint {0} must not have a parent")]
    RootWithParent(usize),
    #[error("joint {0} has no parent but is not the Root")]
    MissingParent(usize),
    #[error("joint {joint} names unknown parent {parent}")]
    UnknownParent { joint: usize, parent: usize },
    #[error("cycle detected through joint {0}")]
    Cycle(usize),
    #[error("ThreeD joint {0} has no reference_child")]
    MissingReferenceChild(usize),
    #[error("joint {joint}: reference_child {child} is not one of its children")]
    InvalidReferenceChild { joint: usize, child: usize },
    #[error("joint {joint}: reference child is collinear with the bone at rest")]
    DegenerateReference { joint: usize },
    #[error("joint {joint}: nonpositive bone length {length}")]
    NonPositiveBoneLength { joint: usize, length: f64 },
    #[error("joint {joint}: rest_direction norm {norm} is not 1")]
    NonUnitRestDirection { joint: usize, norm: f64 },
    #[error("joint {joint}: hinge axis must be unit length and perpendicular to the bone")]
    InvalidHinge { joint: usize },
    #[error("joint {joint}: negative weight {weight}")]
    NegativeWeight { joint: usize, weight: f64 },
    #[error("joint {0} is the root and has no bone")]
    RootHasNoBone(usize),
    #[error("joint {0} out of range")]
    UnknownJoint(usize),
    #[error("joint {joint}: degenerate bone (coincident parent and child nodes)")]
    DegenerateBone { joint: usize },
    #[error("expected {expected} joints, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("joint {joint}: quaternion norm {norm} is not unit")]
    NonUnitQuaternion { joint: usize, norm: f64 },
    #[error("frame {frame}, joint {joint}: non-finite coordinate")]
    NonFinite { frame: usize, joint: usize },
    #[error("sequence must contain at least one frame")]
    EmptySequence,
    #[error("fps must be positive and finite, got {0}")]
    InvalidFps(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub id: usize,
    pub name: String,
    pub parent: Option<usize>,
    pub dof_class: DofClass,
    pub reference_child: Option<usize>,
    /// Weight of the joint in the frame-to-frame angular distance.
    pub weight: f64,
    /// Unit bone direction in the rest pose.
    pub rest_direction: Vec3,
    /// Pitch axis of a OneD joint, in the parent's rest frame.
    pub hinge_axis: Option<Vec3>,
}

/// One joint record of the topology document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointRecord {
    pub id: usize,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub dof_class: DofClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_child: Option<usize>,
    #[serde(default = "default_weight")]
    pub weight: f64,
    pub rest_direction: [f64; 3],
    #[serde(default)]
    pub bone_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinge_axis: Option<[f64; 3]>,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDocument {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(rename = "joint", default)]
    pub joints: Vec<JointRecord>,
}

/// Validated joint tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonTopology {
    name: String,
    joints: Vec<JointSpec>,
    bone_lengths: Vec<f64>,
    root: usize,
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
    reference_normals: Vec<Option<Vec3>>,
}

impl SkeletonTopology {
    /// The bundled 53-joint configuration.
    pub fn default_53() -> Self {
        load_topology(DEFAULT_TOPOLOGY).expect("bundled topology is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self, SkeletonError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SkeletonError::Io(format!("{}: {e}", path.display())))?;
        load_topology(&text)
    }

    pub fn from_document(doc: TopologyDocument) -> Result<Self, SkeletonError> {
        build_topology(doc)
    }

    pub fn to_document(&self) -> TopologyDocument {
        TopologyDocument {
            name: Some(self.name.clone()),
            joints: self
                .joints
                .iter()
                .map(|j| JointRecord {
                    id: j.id,
                    name: j.name.clone(),
                    parent: j.parent,
                    dof_class: j.dof_class,
                    reference_child: j.reference_child,
                    weight: j.weight,
                    rest_direction: j.rest_direction.into(),
                    bone_length: self.bone_lengths[j.id],
                    hinge_axis: if j.dof_class == DofClass::OneD {
                        j.hinge_axis.map(Into::into)
                    } else {
                        None
                    },
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn joint(&self, id: usize) -> &JointSpec {
        &self.joints[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Parent-before-child traversal order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    /// Bone lengths in meters; the root's entry is 0.
    pub fn bone_lengths(&self) -> &[f64] {
        &self.bone_lengths
    }

    pub fn weights(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.weight).collect()
    }

    pub fn joint_names(&self) -> Vec<String> {
        self.joints.iter().map(|j| j.name.clone()).collect()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    /// Rest-frame normal of the plane spanned by a ThreeD joint's bone and its
    /// reference child. The observed plane normal fixes the roll about the bone.
    pub fn reference_normal(&self, id: usize) -> Option<Vec3> {
        self.reference_normals[id]
    }

    /// Bone offset of `id` in the rest pose (`rest_direction * bone_length`).
    pub fn rest_offset(&self, id: usize) -> Vec3 {
        self.joints[id].rest_direction * self.bone_lengths[id]
    }

    /// Rest pose with the root at `root_position`.
    pub fn rest_pose(&self, root_position: Vec3) -> CoordinatePose {
        let mut positions = vec![Vec3::zeros(); self.len()];
        for &j in &self.order {
            positions[j] = match self.joints[j].parent {
                None => root_position,
                Some(p) => positions[p] + self.rest_offset(j),
            };
        }
        CoordinatePose { positions }
    }
}

/// Parses and validates a topology document.
pub fn load_topology(source: &str) -> Result<SkeletonTopology, SkeletonError> {
    let doc: TopologyDocument =
        toml::from_str(source).map_err(|e| SkeletonError::Parse(e.to_string()))?;
    build_topology(doc)
}

fn to_vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn build_topology(doc: TopologyDocument) -> Result<SkeletonTopology, SkeletonError> {
    let count = doc.joints.len();
    if count == 0 {
        return Err(SkeletonError::Empty);
    }
    let mut slots: Vec<Option<JointRecord>> = vec![None; count];
    for rec in doc.joints {
        if rec.id >= count {
            return Err(SkeletonError::NonContiguousId { id: rec.id, count });
        }
        if slots[rec.id].is_some() {
            return Err(SkeletonError::DuplicateId(rec.id));
        }
        let id = rec.id;
        slots[id] = Some(rec);
    }
    let records: Vec<JointRecord> = slots.into_iter().map(|r| r.expect("ids checked")).collect();

    let roots: Vec<usize> = records
        .iter()
        .filter(|r| r.dof_class == DofClass::Root)
        .map(|r| r.id)
        .collect();
    if roots.len() != 1 {
        return Err(SkeletonError::RootCount(roots.len()));
    }
    let root = roots[0];

    let mut joints = Vec::with_capacity(count);
    let mut bone_lengths = Vec::with_capacity(count);
    for rec in &records {
        match (rec.dof_class, rec.parent) {
            (DofClass::Root, Some(_)) => return Err(SkeletonError::RootWithParent(rec.id)),
            (DofClass::Root, None) => {}
            (_, None) => return Err(SkeletonError::MissingParent(rec.id)),
            (_, Some(p)) if p >= count => {
                return Err(SkeletonError::UnknownParent { joint: rec.id, parent: p })
            }
            (_, Some(_)) => {}
        }
        let rest = to_vec3(rec.rest_direction);
        let norm = rest.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(SkeletonError::NonUnitRestDirection { joint: rec.id, norm });
        }
        if rec.dof_class != DofClass::Root && !(rec.bone_length > 0.0 && rec.bone_length.is_finite())
        {
            return Err(SkeletonError::NonPositiveBoneLength {
                joint: rec.id,
                length: rec.bone_length,
            });
        }
        if !(rec.weight >= 0.0 && rec.weight.is_finite()) {
            return Err(SkeletonError::NegativeWeight { joint: rec.id, weight: rec.weight });
        }
        let hinge_axis = if rec.dof_class == DofClass::OneD {
            let h = rec.hinge_axis.map(to_vec3).unwrap_or_else(|| default_hinge(rest));
            if (h.norm() - 1.0).abs() > UNIT_TOLERANCE || h.dot(&rest).abs() > 1e-9 {
                return Err(SkeletonError::InvalidHinge { joint: rec.id });
            }
            Some(h)
        } else {
            None
        };
        joints.push(JointSpec {
            id: rec.id,
            name: rec.name.clone(),
            parent: rec.parent,
            dof_class: rec.dof_class,
            reference_child: rec.reference_child,
            weight: rec.weight,
            rest_direction: rest,
            hinge_axis,
        });
        bone_lengths.push(if rec.dof_class == DofClass::Root { 0.0 } else { rec.bone_length });
    }

    // Every parent chain must reach the root without revisiting a joint.
    for start in 0..count {
        let mut seen = HashSet::new();
        let mut cur = start;
        while let Some(p) = joints[cur].parent {
            if !seen.insert(cur) || p == cur {
                return Err(SkeletonError::Cycle(cur));
            }
            cur = p;
        }
    }

    let mut children = vec![Vec::new(); count];
    for j in &joints {
        if let Some(p) = j.parent {
            children[p].push(j.id);
        }
    }
    let mut order = Vec::with_capacity(count);
    let mut queue = VecDeque::from([root]);
    while let Some(j) = queue.pop_front() {
        order.push(j);
        queue.extend(children[j].iter().copied());
    }
    if order.len() != count {
        let missing = (0..count).find(|j| !order.contains(j)).unwrap_or(root);
        return Err(SkeletonError::Cycle(missing));
    }

    let mut reference_normals = vec![None; count];
    for j in &joints {
        match (j.dof_class, j.reference_child) {
            (DofClass::ThreeD, None) => return Err(SkeletonError::MissingReferenceChild(j.id)),
            (DofClass::ThreeD | DofClass::Root, Some(c)) => {
                if c >= count || joints[c].parent != Some(j.id) {
                    return Err(SkeletonError::InvalidReferenceChild { joint: j.id, child: c });
                }
                let child = &joints[c];
                if j.dof_class == DofClass::Root {
                    // Yaw is read from the horizontal part of the child bone.
                    let d = child.rest_direction;
                    if d.x.hypot(d.y) < 1e-6 {
                        return Err(SkeletonError::DegenerateReference { joint: j.id });
                    }
                    continue;
                }
                let normal = match (child.dof_class, child.hinge_axis) {
                    (DofClass::OneD, Some(h)) => {
                        if h.dot(&j.rest_direction).abs() > 1e-9 {
                            return Err(SkeletonError::DegenerateReference { joint: j.id });
                        }
                        h
                    }
                    _ => {
                        let n = j.rest_direction.cross(&child.rest_direction);
                        if n.norm() < 1e-6 {
                            return Err(SkeletonError::DegenerateReference { joint: j.id });
                        }
                        n.normalize()
                    }
                };
                reference_normals[j.id] = Some(normal);
            }
            _ => {}
        }
    }

    Ok(SkeletonTopology {
        name: doc.name.unwrap_or_else(|| "unnamed".to_string()),
        joints,
        bone_lengths,
        root,
        order,
        children,
        reference_normals,
    })
}

/// Pitch axis used when a OneD record omits `hinge_axis`: horizontal and
/// perpendicular to the bone, or +y for vertical bones.
fn default_hinge(rest: Vec3) -> Vec3 {
    let h = rest.cross(&Vec3::z());
    if h.norm() < 1e-9 {
        Vec3::y()
    } else {
        h.normalize()
    }
}

/// Joint node positions of one frame, in meters, world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatePose {
    pub positions: Vec<Vec3>,
}

impl CoordinatePose {
    pub fn validate(&self, topology: &SkeletonTopology) -> Result<(), SkeletonError> {
        if self.positions.len() != topology.len() {
            return Err(SkeletonError::CountMismatch {
                expected: topology.len(),
                found: self.positions.len(),
            });
        }
        if let Some(j) = self.positions.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(SkeletonError::NonFinite { frame: 0, joint: j });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateSequence {
    pub fps: f64,
    pub frames: Vec<CoordinatePose>,
}

impl CoordinateSequence {
    pub fn validate(&self, topology: &SkeletonTopology) -> Result<(), SkeletonError> {
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(SkeletonError::InvalidFps(self.fps));
        }
        if self.frames.is_empty() {
            return Err(SkeletonError::EmptySequence);
        }
        for (f, frame) in self.frames.iter().enumerate() {
            frame.validate(topology).map_err(|e| match e {
                SkeletonError::NonFinite { joint, .. } => SkeletonError::NonFinite { frame: f, joint },
                other => other,
            })?;
        }
        Ok(())
    }
}

/// `position(joint) - position(parent(joint))`.
pub fn bone_vector(
    pose: &CoordinatePose,
    joint: usize,
    topology: &SkeletonTopology,
) -> Result<Vec3, SkeletonError> {
    if joint >= topology.len() {
        return Err(SkeletonError::UnknownJoint(joint));
    }
    let parent = topology.joint(joint).parent.ok_or(SkeletonError::RootHasNoBone(joint))?;
    Ok(pose.positions[joint] - pose.positions[parent])
}

pub fn measure_bone_lengths(
    pose: &CoordinatePose,
    topology: &SkeletonTopology,
) -> Result<Vec<f64>, SkeletonError> {
    pose.validate(topology)?;
    let mut lengths = vec![0.0; topology.len()];
    for j in 0..topology.len() {
        if j == topology.root() {
            continue;
        }
        let len = bone_vector(pose, j, topology)?.norm();
        if len <= 1e-12 {
            return Err(SkeletonError::DegenerateBone { joint: j });
        }
        lengths[j] = len;
    }
    Ok(lengths)
}

fn check_rotations(
    topology: &SkeletonTopology,
    rotations: &[Quaternion],
) -> Result<(), SkeletonError> {
    if rotations.len() != topology.len() {
        return Err(SkeletonError::CountMismatch {
            expected: topology.len(),
            found: rotations.len(),
        });
    }
    for (joint, q) in rotations.iter().enumerate() {
        if !q.is_unit(FK_QUATERNION_TOLERANCE) {
            return Err(SkeletonError::NonUnitQuaternion { joint, norm: q.norm() });
        }
    }
    Ok(())
}

/// Accumulated world orientation of every joint.
pub fn world_orientations(
    topology: &SkeletonTopology,
    rotations: &[Quaternion],
) -> Result<Vec<Quaternion>, SkeletonError> {
    check_rotations(topology, rotations)?;
    let mut world = vec![Quaternion::IDENTITY; topology.len()];
    for &j in topology.order() {
        world[j] = match topology.joint(j).parent {
            None => rotations[j],
            Some(p) => world[p] * rotations[j],
        };
    }
    Ok(world)
}

pub fn forward_kinematics(
    topology: &SkeletonTopology,
    rotations: &[Quaternion],
    root_position: Vec3,
) -> Result<CoordinatePose, SkeletonError> {
    let world = world_orientations(topology, rotations)?;
    let mut positions = vec![Vec3::zeros(); topology.len()];
    for &j in topology.order() {
        positions[j] = match topology.joint(j).parent {
            None => root_position,
            Some(p) => positions[p] + world[j].rotate(topology.rest_offset(j)),
        };
    }
    Ok(CoordinatePose { positions })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_JOINTS: &str = r#"
        name = "pair"
        [[joint]]
        id = 0
        name = "root"
        dof_class = "Root"
        rest_direction = [0.0, 0.0, 1.0]

        [[joint]]
        id = 1
        name = "child"
        parent = 0
        dof_class = "TwoD"
        rest_direction = [1.0, 0.0, 0.0]
        bone_length = 1.0
    "#;

    #[test]
    fn minimal_document() {
        let t = load_topology(TWO_JOINTS).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.joint(1).parent, Some(0));
        assert_eq!(t.root(), 0);
        assert_eq!(t.order(), &[0, 1]);
    }

    #[test]
    fn default_has_53_joints_with_legend_counts() {
        let t = SkeletonTopology::default_53();
        assert_eq!(t.len(), 53);
        let count = |c| t.joints().iter().filter(|j| j.dof_class == c).count();
        assert_eq!(count(DofClass::Root), 1);
        assert_eq!(count(DofClass::Static), 4);
        assert_eq!(
            count(DofClass::ThreeD) + count(DofClass::TwoD) + count(DofClass::OneD),
            48
        );
        for &j in t.order() {
            if let Some(p) = t.joint(j).parent {
                let pos = |x| t.order().iter().position(|&o| o == x).unwrap();
                assert!(pos(p) < pos(j));
            }
        }
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let doc = TWO_JOINTS.replace("parent = 0", "parent = 1");
        assert_eq!(load_topology(&doc), Err(SkeletonError::Cycle(1)));
    }

    #[test]
    fn two_joint_loop_is_a_cycle() {
        let doc = r#"
            [[joint]]
            id = 0
            name = "root"
            dof_class = "Root"
            rest_direction = [0.0, 0.0, 1.0]
            [[joint]]
            id = 1
            name = "a"
            parent = 2
            dof_class = "TwoD"
            rest_direction = [1.0, 0.0, 0.0]
            bone_length = 1.0
            [[joint]]
            id = 2
            name = "b"
            parent = 1
            dof_class = "TwoD"
            rest_direction = [1.0, 0.0, 0.0]
            bone_length = 1.0
        "#;
        assert!(matches!(load_topology(doc), Err(SkeletonError::Cycle(_))));
    }

    #[test]
    fn duplicate_id_rejected() {
        let doc = TWO_JOINTS.replace("id = 1", "id = 0");
        assert_eq!(load_topology(&doc), Err(SkeletonError::DuplicateId(0)));
    }

    #[test]
    fn three_d_without_reference_rejected() {
        let doc = TWO_JOINTS.replace("\"TwoD\"", "\"ThreeD\"");
        assert_eq!(load_topology(&doc), Err(SkeletonError::MissingReferenceChild(1)));
    }

    #[test]
    fn nonpositive_bone_length_rejected() {
        let doc = TWO_JOINTS.replace("bone_length = 1.0", "bone_length = 0.0");
        assert!(matches!(
            load_topology(&doc),
            Err(SkeletonError::NonPositiveBoneLength { joint: 1, .. })
        ));
    }

    #[test]
    fn non_unit_rest_direction_rejected() {
        let doc = TWO_JOINTS.replace("[1.0, 0.0, 0.0]", "[1.0, 0.1, 0.0]");
        assert!(matches!(
            load_topology(&doc),
            Err(SkeletonError::NonUnitRestDirection { joint: 1, .. })
        ));
    }

    #[test]
    fn document_round_trip() {
        let t = SkeletonTopology::default_53();
        let text = toml::to_string(&t.to_document()).unwrap();
        assert_eq!(load_topology(&text).unwrap(), t);
    }

    #[test]
    fn bone_vector_examples() {
        let t = load_topology(TWO_JOINTS).unwrap();
        let pose = CoordinatePose { positions: vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)] };
        assert_eq!(bone_vector(&pose, 1, &t).unwrap(), Vec3::new(1.0, 0.0, 0.0));
        let pose = CoordinatePose {
            positions: vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 6.0, 3.0)],
        };
        assert_eq!(bone_vector(&pose, 1, &t).unwrap(), Vec3::new(3.0, 4.0, 0.0));
        assert_eq!(bone_vector(&pose, 0, &t), Err(SkeletonError::RootHasNoBone(0)));
    }

    #[test]
    fn bone_lengths_examples() {
        let t = load_topology(TWO_JOINTS).unwrap();
        let pose = CoordinatePose { positions: vec![Vec3::zeros(), Vec3::new(0.0, 3.0, 4.0)] };
        assert_eq!(measure_bone_lengths(&pose, &t).unwrap(), vec![0.0, 5.0]);
        let pose = CoordinatePose { positions: vec![Vec3::zeros(), Vec3::zeros()] };
        assert_eq!(
            measure_bone_lengths(&pose, &t),
            Err(SkeletonError::DegenerateBone { joint: 1 })
        );
    }

    #[test]
    fn rest_pose_recovers_lengths() {
        let t = SkeletonTopology::default_53();
        let lengths = measure_bone_lengths(&t.rest_pose(Vec3::new(0.3, -1.0, 0.9)), &t).unwrap();
        for (a, b) in lengths.iter().zip(t.bone_lengths()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_fk_is_rest_pose() {
        let t = SkeletonTopology::default_53();
        let root = Vec3::new(1.0, 2.0, 0.95);
        let pose = forward_kinematics(&t, &vec![Quaternion::IDENTITY; t.len()], root).unwrap();
        assert_eq!(pose, t.rest_pose(root));
    }

    #[test]
    fn quarter_turn_child() {
        let t = load_topology(TWO_JOINTS).unwrap();
        let h = std::f64::consts::FRAC_PI_4;
        let q = Quaternion::new(0.0, 0.0, h.sin(), h.cos());
        let pose = forward_kinematics(&t, &[Quaternion::IDENTITY, q], Vec3::zeros()).unwrap();
        assert!((pose.positions[1] - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fk_rejects_bad_input() {
        let t = load_topology(TWO_JOINTS).unwrap();
        assert_eq!(
            forward_kinematics(&t, &[Quaternion::IDENTITY], Vec3::zeros()),
            Err(SkeletonError::CountMismatch { expected: 2, found: 1 })
        );
        let bad = Quaternion::new(0.0, 0.0, 0.0, 1.01);
        assert!(matches!(
            forward_kinematics(&t, &[Quaternion::IDENTITY, bad], Vec3::zeros()),
            Err(SkeletonError::NonUnitQuaternion { joint: 1, .. })
        ));
    }
}
