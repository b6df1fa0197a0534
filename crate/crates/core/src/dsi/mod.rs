//! Dynamic skeletal interpolation.
//!
//! A rotation sequence is cut into unit motions wherever the weighted
//! frame-to-frame angular distance jumps above a threshold. Quiet stretches
//! and the jumps themselves are resampled with piecewise Lagrange polynomials
//! (jumps get more samples the larger they are), random variants are drawn
//! by perturbing quaternion components, and every variant is passed through
//! a variable-span supersmoother.

mod interpolate;
mod segment;
mod supersmoother;
mod variants;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use interpolate::{
    dsi_interpolate, edge_sample_count, interval_grids, lagrange_interpolate, linespace,
    normal_sample_count, IntervalGrid, Interpolation, LagrangeBasis, MAX_DEGREE,
};
pub use segment::{frame_distances, segment, segment_distances, Interval, IntervalKind, SegmentBoundaries};
pub use supersmoother::{supersmooth, Smoothed};
pub use variants::{random_variants, track_seed, variant_seed, MAX_RESAMPLES};

use crate::quaternion::Quaternion;
use crate::rotation::{RotationError, RotationSequence};

/// Interpolated or perturbed quaternions whose norm falls below this before
/// renormalization are rejected: the inputs were not hemisphere-aligned or
/// the noise is too large.
pub const MIN_PRENORM: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DsiParams {
    /// Segmentation threshold on the weighted angular distance, radians.
    pub threshold: f64,
    /// Interpolation rate in (0, 1].
    pub delta: f64,
    /// Interpolation coefficient for edge intervals.
    pub eta: f64,
    /// Number of random variants.
    pub variants: usize,
    pub noise_low: f64,
    pub noise_high: f64,
    pub seed: u64,
    /// Supersmoother spans as fractions of the series length.
    pub spans: Vec<f64>,
}

impl Default for DsiParams {
    fn default() -> Self {
        Self {
            threshold: 0.15,
            delta: 0.2,
            eta: 10.0,
            variants: 4,
            noise_low: -0.02,
            noise_high: 0.02,
            seed: 0,
            spans: vec![0.05, 0.2, 0.5],
        }
    }
}

impl DsiParams {
    pub fn validate(&self) -> Result<(), DsiError> {
        let bad = |msg: String| Err(DsiError::InvalidParams(msg));
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return bad(format!("threshold {} must be >= 0", self.threshold));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta {} must lie in (0, 1]", self.delta));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta {} must be positive", self.eta));
        }
        if self.variants == 0 {
            return bad("variants must be at least 1".into());
        }
        if !(self.noise_low.is_finite() && self.noise_high.is_finite())
            || self.noise_low > self.noise_high
        {
            return bad(format!(
                "noise bounds ({}, {}) must be finite with low <= high",
                self.noise_low, self.noise_high
            ));
        }
        validate_spans(&self.spans)
    }
}

pub(crate) fn validate_spans(spans: &[f64]) -> Result<(), DsiError> {
    if spans.is_empty() {
        return Err(DsiError::InvalidParams("spans must not be empty".into()));
    }
    if let Some(s) = spans.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
        return Err(DsiError::InvalidParams(format!("span {s} must lie in (0, 1)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsiStage {
    Interpolate,
    Variants,
    Smooth,
}

impl std::fmt::Display for DsiStage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DsiStage::Interpolate => "interpolate",
            DsiStage::Variants => "variants",
            DsiStage::Smooth => "smooth",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DsiError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("expected {expected} joints, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("need at least {needed} frames, got {found}")]
    TooFewFrames { needed: usize, found: usize },
    #[error("sample {sample} lies outside [{low}, {high}]; extrapolation refused")]
    Extrapolation { sample: f64, low: f64, high: f64 },
    #[error("control times must be distinct")]
    DuplicateControlTimes,
    #[error("joint {joint}: quaternion norm {norm} collapsed before renormalization")]
    NormCollapse { joint: usize, norm: f64 },
    #[error("variant {variant}, joint {joint}: gave up after {attempts} resamples")]
    ResampleExhausted { variant: usize, joint: usize, attempts: usize },
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: DsiStage,
        #[source]
        source: Box<DsiError>,
    },
}

impl DsiError {
    fn in_stage(self, stage: DsiStage) -> DsiError {
        DsiError::Stage { stage, source: Box::new(self) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DsiWarning {
    /// An edge interval asked for fewer than two samples.
    EdgeSamplesClamped { start: usize, requested: usize },
    /// A series was too short for the smallest smoother window and was left as is.
    SeriesTooShort { len: usize, window: usize },
}

impl std::fmt::Display for DsiWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DsiWarning::EdgeSamplesClamped { start, requested } => {
                write!(f, "edge interval at frame {start} requested {requested} samples, using 2")
            }
            DsiWarning::SeriesTooShort { len, window } => {
                write!(f, "series of {len} frames is shorter than the smoothing window {window}, left unsmoothed")
            }
        }
    }
}

/// `V` variants sharing joint count, frame count and fps.
#[derive(Debug, Clone, PartialEq)]
pub struct AnimationSet {
    pub variants: Vec<RotationSequence>,
    /// Seed each variant's noise was drawn from.
    pub seeds: Vec<u64>,
    /// Position of each output frame on the source frame axis.
    pub source_times: Vec<f64>,
}

impl AnimationSet {
    /// `(V, J, F', 4)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        let first = self.variants.first();
        (
            self.variants.len(),
            first.map_or(0, |s| s.joint_count()),
            first.map_or(0, |s| s.frame_count()),
            4,
        )
    }

    pub fn validate(&self) -> Result<(), DsiError> {
        let (_, joints, frames, _) = self.shape();
        for v in &self.variants {
            if v.joint_count() != joints || v.frame_count() != frames {
                return Err(DsiError::InvalidParams("variants differ in shape".into()));
            }
            v.validate()?;
        }
        Ok(())
    }
}

/// Weighted mean over joints of the relative rotation angle between two frames.
///
/// Each joint contributes `w * 2 * acos(|Re(a * conj(b))|)`, evaluated in the
/// equivalent `atan2` form, and the sum is divided by the joint count.
pub fn angular_distance(
    frame_a: &[Quaternion],
    frame_b: &[Quaternion],
    weights: &[f64],
) -> Result<f64, DsiError> {
    if frame_a.len() != frame_b.len() {
        return Err(DsiError::CountMismatch { expected: frame_a.len(), found: frame_b.len() });
    }
    if weights.len() != frame_a.len() {
        return Err(DsiError::CountMismatch { expected: frame_a.len(), found: weights.len() });
    }
    if frame_a.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = frame_a
        .iter()
        .zip(frame_b)
        .zip(weights)
        .map(|((a, b), w)| w * (*a * b.conjugate()).angle())
        .sum();
    Ok(total / frame_a.len() as f64)
}

/// Output of the full interpolate, vary and smooth chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DsiOutput {
    pub set: AnimationSet,
    pub segmentation: SegmentBoundaries,
    pub warnings: Vec<DsiWarning>,
}

pub fn dsi_pipeline(
    seq: &RotationSequence,
    weights: &[f64],
    params: &DsiParams,
) -> Result<DsiOutput, DsiError> {
    params.validate()?;
    let interp =
        dsi_interpolate(seq, weights, params).map_err(|e| e.in_stage(DsiStage::Interpolate))?;
    let (set, smooth_warnings) = dsi_variants(&interp.sequence, interp.sample_times, params)?;
    let mut warnings = interp.warnings;
    for w in smooth_warnings {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    Ok(DsiOutput { set, segmentation: interp.segmentation, warnings })
}

/// Noise and smoothing stages on an already interpolated sequence.
pub fn dsi_variants(
    interpolated: &RotationSequence,
    source_times: Vec<f64>,
    params: &DsiParams,
) -> Result<(AnimationSet, Vec<DsiWarning>), DsiError> {
    params.validate()?;
    let raw = random_variants(interpolated, params).map_err(|e| e.in_stage(DsiStage::Variants))?;
    let smoothed = raw
        .variants
        .par_iter()
        .map(|v| smooth_sequence(v, &params.spans))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.in_stage(DsiStage::Smooth))?;
    let mut warnings = Vec::new();
    let mut variants = Vec::with_capacity(smoothed.len());
    for (seq, w) in smoothed {
        for warning in w {
            if !warnings.contains(&warning) {
                warnings.push(warning);
            }
        }
        variants.push(seq);
    }
    Ok((AnimationSet { variants, seeds: raw.seeds, source_times }, warnings))
}

/// Smooths every quaternion component and root coordinate independently, then
/// renormalizes and restores hemisphere continuity.
pub fn smooth_sequence(
    seq: &RotationSequence,
    spans: &[f64],
) -> Result<(RotationSequence, Vec<DsiWarning>), DsiError> {
    let mut warnings = Vec::new();
    let mut note = |w: Option<DsiWarning>| {
        if let Some(w) = w {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    };
    let frames = seq.frame_count();
    let mut tracks = Vec::with_capacity(seq.joint_count());
    for (joint, track) in seq.tracks.iter().enumerate() {
        let mut comps: [Vec<f64>; 4] = Default::default();
        for (c, comp) in comps.iter_mut().enumerate() {
            let series: Vec<f64> = track.iter().map(|q| q.to_array()[c]).collect();
            let s = supersmooth(&series, spans)?;
            note(s.warning);
            *comp = s.values;
        }
        let mut out = Vec::with_capacity(frames);
        for f in 0..frames {
            let q = Quaternion::new(comps[0][f], comps[1][f], comps[2][f], comps[3][f]);
            let n = q.norm();
            let q = q.normalized().ok_or(DsiError::NormCollapse { joint, norm: n })?;
            out.push(q);
        }
        crate::rotation::align_track(&mut out);
        tracks.push(out);
    }
    let mut root_comps: [Vec<f64>; 3] = Default::default();
    for (c, comp) in root_comps.iter_mut().enumerate() {
        let series: Vec<f64> = seq.root_positions.iter().map(|p| p[c]).collect();
        let s = supersmooth(&series, spans)?;
        note(s.warning);
        *comp = s.values;
    }
    let root_positions = (0..frames)
        .map(|f| crate::Vec3::new(root_comps[0][f], root_comps[1][f], root_comps[2][f]))
        .collect();
    Ok((RotationSequence { fps: seq.fps, root_positions, tracks }, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::quaternion_from_axis_angle;
    use crate::Vec3;

    #[test]
    fn identical_frames_have_zero_distance() {
        let f = vec![quaternion_from_axis_angle(Vec3::y(), 0.7).unwrap(); 3];
        assert_eq!(angular_distance(&f, &f, &[1.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn one_joint_moved() {
        let a = vec![Quaternion::IDENTITY; 4];
        let mut b = a.clone();
        b[2] = quaternion_from_axis_angle(Vec3::x(), 0.4).unwrap();
        let d = angular_distance(&a, &b, &[1.0; 4]).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
        // sign of the quaternion does not matter
        b[2] = -b[2];
        assert!((angular_distance(&a, &b, &[1.0; 4]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn distance_count_mismatch() {
        let a = vec![Quaternion::IDENTITY; 2];
        assert!(matches!(
            angular_distance(&a, &a[..1], &[1.0; 2]),
            Err(DsiError::CountMismatch { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(DsiParams::default().validate().is_ok());
        let p = DsiParams { delta: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = DsiParams { spans: vec![], ..Default::default() };
        assert!(p.validate().is_err());
        let p = DsiParams { spans: vec![0.2, 1.0], ..Default::default() };
        assert!(p.validate().is_err());
        let p = DsiParams { noise_low: 0.1, noise_high: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = DsiParams { eta: -1.0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
