use super::segment::{segment, IntervalKind, SegmentBoundaries};
use super::{DsiError, DsiParams, DsiWarning, MIN_PRENORM};
use crate::quaternion::Quaternion;
use crate::rotation::RotationSequence;
use crate::Vec3;

/// Highest Lagrange degree used on one piece; longer normal intervals are split.
pub const MAX_DEGREE: usize = 7;

// Guards ceil/floor of quotients like 1/0.2 against representation error.
const COUNT_EPS: f64 = 1e-9;

/// `n` evenly spaced values over `[a, b]`, endpoints included. `n = 1` gives `[a]`.
pub fn linespace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|k| a + step * k as f64).collect();
            out[n - 1] = b;
            out
        }
    }
}

/// Samples on a normal interval: `ceil(1/delta)`, at least 2.
pub fn normal_sample_count(delta: f64) -> usize {
    ((1.0 / delta - COUNT_EPS).ceil() as usize).max(2)
}

/// Samples on an edge interval before clamping: `Int(eta * d / delta)`.
pub fn edge_sample_count(eta: f64, distance: f64, delta: f64) -> usize {
    (eta * distance / delta + COUNT_EPS).floor().max(0.0) as usize
}

/// Lagrange cardinal basis over distinct control times.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    times: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(times: Vec<f64>) -> Result<Self, DsiError> {
        if times.is_empty() {
            return Err(DsiError::TooFewFrames { needed: 1, found: 0 });
        }
        for (i, a) in times.iter().enumerate() {
            if times[i + 1..].contains(a) {
                return Err(DsiError::DuplicateControlTimes);
            }
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn range(&self) -> (f64, f64) {
        let lo = self.times.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// `L_t(x)` for every control time; one-hot at control times.
    pub fn weights(&self, x: f64) -> Result<Vec<f64>, DsiError> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(DsiError::Extrapolation { sample: x, low: lo, high: hi });
        }
        if let Some(k) = self.times.iter().position(|&t| t == x) {
            let mut w = vec![0.0; self.times.len()];
            w[k] = 1.0;
            return Ok(w);
        }
        Ok(self
            .times
            .iter()
            .enumerate()
            .map(|(k, &tk)| {
                self.times
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != k)
                    .map(|(_, &tm)| (x - tm) / (tk - tm))
                    .product()
            })
            .collect())
    }
}

fn blend_quaternions(weights: &[f64], controls: &[Quaternion]) -> Quaternion {
    let mut acc = [0.0; 4];
    for (w, q) in weights.iter().zip(controls) {
        for (a, c) in acc.iter_mut().zip(q.to_array()) {
            *a += w * c;
        }
    }
    Quaternion::from_array(acc)
}

fn renormalize(q: Quaternion, joint: usize) -> Result<Quaternion, DsiError> {
    let norm = q.norm();
    if !(norm >= MIN_PRENORM) {
        return Err(DsiError::NormCollapse { joint, norm });
    }
    Ok(q.scale(1.0 / norm))
}

/// Componentwise Lagrange interpolation of per-joint quaternions.
///
/// `controls[t][joint]` sits at `control_times[t]`; the result is indexed
/// `[sample][joint]`, each quaternion renormalized.
pub fn lagrange_interpolate(
    control_times: &[f64],
    controls: &[Vec<Quaternion>],
    samples: &[f64],
) -> Result<Vec<Vec<Quaternion>>, DsiError> {
    if controls.len() != control_times.len() {
        return Err(DsiError::CountMismatch { expected: control_times.len(), found: controls.len() });
    }
    let joints = controls.first().map_or(0, Vec::len);
    if let Some(bad) = controls.iter().find(|c| c.len() != joints) {
        return Err(DsiError::CountMismatch { expected: joints, found: bad.len() });
    }
    let basis = LagrangeBasis::new(control_times.to_vec())?;
    samples
        .iter()
        .map(|&x| {
            let w = basis.weights(x)?;
            (0..joints)
                .map(|j| {
                    let track: Vec<Quaternion> = controls.iter().map(|c| c[j]).collect();
                    renormalize(blend_quaternions(&w, &track), j)
                })
                .collect()
        })
        .collect()
}

/// Sample grid of one Lagrange piece over source frames `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGrid {
    pub start: usize,
    pub end: usize,
    pub samples: Vec<f64>,
    pub edge: bool,
}

/// Sample grids for every interval, normal intervals split so that no piece
/// spans more than `MAX_DEGREE` frame gaps.
pub fn interval_grids(
    seg: &SegmentBoundaries,
    params: &DsiParams,
) -> (Vec<IntervalGrid>, Vec<DsiWarning>) {
    let mut grids = Vec::new();
    let mut warnings = Vec::new();
    for iv in &seg.intervals {
        match iv.kind {
            IntervalKind::Edge { distance } => {
                let requested = edge_sample_count(params.eta, distance, params.delta);
                if requested < 2 {
                    warnings.push(DsiWarning::EdgeSamplesClamped { start: iv.start, requested });
                }
                grids.push(IntervalGrid {
                    start: iv.start,
                    end: iv.end,
                    samples: linespace(iv.start as f64, iv.end as f64, requested.max(2)),
                    edge: true,
                });
            }
            IntervalKind::Normal => {
                let gaps = iv.end - iv.start;
                let pieces = gaps.div_ceil(MAX_DEGREE);
                let n = normal_sample_count(params.delta);
                let mut s = iv.start;
                for p in 0..pieces {
                    // near-equal split, remainder spread over the first pieces
                    let len = gaps / pieces + usize::from(p < gaps % pieces);
                    let e = s + len;
                    grids.push(IntervalGrid {
                        start: s,
                        end: e,
                        samples: linespace(s as f64, e as f64, n),
                        edge: false,
                    });
                    s = e;
                }
            }
        }
    }
    (grids, warnings)
}

/// Result of resampling a sequence on the segment grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub sequence: RotationSequence,
    /// Position of every output frame on the 0-indexed source frame axis.
    pub sample_times: Vec<f64>,
    pub segmentation: SegmentBoundaries,
    pub warnings: Vec<DsiWarning>,
}

pub fn dsi_interpolate(
    seq: &RotationSequence,
    weights: &[f64],
    params: &DsiParams,
) -> Result<Interpolation, DsiError> {
    params.validate()?;
    seq.validate()?;
    let frames = seq.frame_count();
    if frames < 2 {
        return Err(DsiError::TooFewFrames { needed: 2, found: frames });
    }
    let segmentation = segment(seq, weights, params)?;
    let (grids, warnings) = interval_grids(&segmentation, params);
    let joints = seq.joint_count();

    let mut sample_times: Vec<f64> = Vec::new();
    let mut tracks: Vec<Vec<Quaternion>> = vec![Vec::new(); joints];
    let mut roots: Vec<Vec3> = Vec::new();
    for grid in &grids {
        let basis = LagrangeBasis::new((grid.start..=grid.end).map(|t| t as f64).collect())?;
        for &x in &grid.samples {
            if sample_times.last() == Some(&x) {
                continue;
            }
            let w = basis.weights(x)?;
            for (j, out) in tracks.iter_mut().enumerate() {
                let q = blend_quaternions(&w, &seq.tracks[j][grid.start..=grid.end]);
                out.push(renormalize(q, j)?);
            }
            let root = w
                .iter()
                .zip(&seq.root_positions[grid.start..=grid.end])
                .fold(Vec3::zeros(), |acc, (wk, p)| acc + p * *wk);
            roots.push(root);
            sample_times.push(x);
        }
    }

    let out_frames = sample_times.len();
    let fps = seq.fps * (out_frames - 1) as f64 / (frames - 1) as f64;
    let mut sequence = RotationSequence { fps, root_positions: roots, tracks };
    sequence.align_hemispheres();
    Ok(Interpolation { sequence, sample_times, segmentation, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::quaternion_from_axis_angle;

    #[test]
    fn linespace_examples() {
        assert_eq!(linespace(2.0, 5.0, 4), vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(linespace(0.0, 1.0, 1), vec![0.0]);
        assert_eq!(linespace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn sample_counts() {
        assert_eq!(normal_sample_count(0.2), 5);
        assert_eq!(normal_sample_count(1.0), 2);
        assert_eq!(normal_sample_count(0.3), 4);
        assert_eq!(edge_sample_count(10.0, 0.5, 0.2), 25);
        assert_eq!(edge_sample_count(1.0, 0.1, 1.0), 0);
    }

    #[test]
    fn two_point_midpoint_is_normalized_average() {
        let a = quaternion_from_axis_angle(Vec3::z(), 0.2).unwrap();
        let b = quaternion_from_axis_angle(Vec3::x(), 0.3).unwrap();
        let out = lagrange_interpolate(&[0.0, 1.0], &[vec![a], vec![b]], &[0.5]).unwrap();
        let avg = Quaternion::from_array([
            (a.x + b.x) / 2.0,
            (a.y + b.y) / 2.0,
            (a.z + b.z) / 2.0,
            (a.w + b.w) / 2.0,
        ])
        .normalized()
        .unwrap();
        assert!(out[0][0].approx_eq_up_to_sign(avg, 1e-15));
    }

    #[test]
    fn control_times_are_reproduced() {
        let qs: Vec<Vec<Quaternion>> = (0..4)
            .map(|k| vec![quaternion_from_axis_angle(Vec3::y(), 0.1 * k as f64).unwrap()])
            .collect();
        let out = lagrange_interpolate(&[0.0, 1.0, 2.0, 3.0], &qs, &[2.0]).unwrap();
        assert_eq!(out[0][0], qs[2][0]);
    }

    #[test]
    fn extrapolation_and_duplicates_refused() {
        let q = vec![vec![Quaternion::IDENTITY]; 2];
        assert!(matches!(
            lagrange_interpolate(&[0.0, 1.0], &q, &[1.5]),
            Err(DsiError::Extrapolation { .. })
        ));
        assert_eq!(
            lagrange_interpolate(&[1.0, 1.0], &q, &[1.0]).unwrap_err(),
            DsiError::DuplicateControlTimes
        );
    }

    #[test]
    fn cubic_through_a_geodesic() {
        let axis = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let at = |t: f64| quaternion_from_axis_angle(axis, 0.5 * t / 3.0).unwrap();
        let controls: Vec<Vec<Quaternion>> = (0..4).map(|t| vec![at(t as f64)]).collect();
        let samples = linespace(0.0, 3.0, 61);
        let out = lagrange_interpolate(&[0.0, 1.0, 2.0, 3.0], &controls, &samples).unwrap();
        for (x, q) in samples.iter().zip(&out) {
            let exact = at(*x).to_array();
            for (c, e) in q[0].to_array().iter().zip(exact) {
                assert!((c - e).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn long_normal_intervals_are_split() {
        let seg = super::super::segment_distances(&[0.0; 20], 0.15);
        let (grids, _) = interval_grids(&seg, &DsiParams::default());
        assert_eq!(grids.len(), 3);
        assert!(grids.iter().all(|g| g.end - g.start <= MAX_DEGREE));
        assert_eq!(grids.first().unwrap().start, 0);
        assert_eq!(grids.last().unwrap().end, 20);
    }

    #[test]
    fn small_edge_is_clamped_with_warning() {
        let seg = super::super::segment_distances(&[0.2], 0.15);
        let p = DsiParams { eta: 0.1, delta: 1.0, ..Default::default() };
        let (grids, warnings) = interval_grids(&seg, &p);
        assert_eq!(grids[0].samples, vec![0.0, 1.0]);
        assert_eq!(warnings, vec![DsiWarning::EdgeSamplesClamped { start: 0, requested: 0 }]);
    }

    #[test]
    fn constant_input_stays_constant() {
        let q = quaternion_from_axis_angle(Vec3::new(0.0, 0.6, 0.8), 0.9).unwrap();
        let seq = RotationSequence {
            fps: 30.0,
            root_positions: vec![Vec3::new(1.0, 2.0, 3.0); 10],
            tracks: vec![vec![q; 10]; 3],
        };
        let out = dsi_interpolate(&seq, &[1.0; 3], &DsiParams::default()).unwrap();
        for track in &out.sequence.tracks {
            for s in track {
                assert!(s.approx_eq_up_to_sign(q, 1e-9));
            }
        }
        for p in &out.sequence.root_positions {
            assert!((p - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-9);
        }
        let duration = (out.sequence.frame_count() - 1) as f64 / out.sequence.fps;
        assert!((duration - 9.0 / 30.0).abs() < 1e-12);
    }
}
