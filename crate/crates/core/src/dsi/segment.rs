use super::{angular_distance, DsiError, DsiParams};
use crate::rotation::RotationSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalKind {
    /// Consecutive frames all within the threshold.
    Normal,
    /// A single frame pair whose distance exceeded the threshold.
    Edge { distance: f64 },
}

/// Closed frame interval `[start, end]`, 0-indexed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
    pub kind: IntervalKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentBoundaries {
    /// Sorted, unique interval endpoints.
    pub boundaries: Vec<usize>,
    pub intervals: Vec<Interval>,
    /// `distances[k]` is the distance between frames `k` and `k + 1`.
    pub distances: Vec<f64>,
}

/// Weighted angular distance between each pair of consecutive frames.
pub fn frame_distances(seq: &RotationSequence, weights: &[f64]) -> Result<Vec<f64>, DsiError> {
    if weights.len() != seq.joint_count() {
        return Err(DsiError::CountMismatch { expected: seq.joint_count(), found: weights.len() });
    }
    let frames: Vec<_> = (0..seq.frame_count()).map(|f| seq.frame(f)).collect();
    frames
        .windows(2)
        .map(|w| angular_distance(&w[0], &w[1], weights))
        .collect()
}

/// Cuts the frame axis at every distance above `threshold`.
///
/// The pair straddling a jump becomes an edge interval; the frames between
/// jumps form normal intervals.
pub fn segment_distances(distances: &[f64], threshold: f64) -> SegmentBoundaries {
    let frames = distances.len() + 1;
    let mut intervals = Vec::new();
    let mut start = 0;
    for f in 1..frames {
        let d = distances[f - 1];
        if d > threshold {
            if f - 1 > start {
                intervals.push(Interval { start, end: f - 1, kind: IntervalKind::Normal });
            }
            intervals.push(Interval { start: f - 1, end: f, kind: IntervalKind::Edge { distance: d } });
            start = f;
        }
    }
    if frames - 1 > start {
        intervals.push(Interval { start, end: frames - 1, kind: IntervalKind::Normal });
    }
    let mut boundaries: Vec<usize> = intervals.iter().flat_map(|i| [i.start, i.end]).collect();
    boundaries.dedup();
    SegmentBoundaries { boundaries, intervals, distances: distances.to_vec() }
}

/// A single-frame sequence yields the boundary set `{0}` with no intervals.
pub fn segment(
    seq: &RotationSequence,
    weights: &[f64],
    params: &DsiParams,
) -> Result<SegmentBoundaries, DsiError> {
    if seq.frame_count() < 2 {
        return Ok(SegmentBoundaries {
            boundaries: vec![0; seq.frame_count()],
            intervals: Vec::new(),
            distances: Vec::new(),
        });
    }
    Ok(segment_distances(&frame_distances(seq, weights)?, params.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_jump_in_ten_frames() {
        let mut d = vec![0.01; 9];
        d[4] = 0.5;
        let s = segment_distances(&d, 0.15);
        // 1-indexed {1, 5, 6, 10}
        assert_eq!(s.boundaries, vec![0, 4, 5, 9]);
        assert_eq!(s.intervals.len(), 3);
        assert_eq!(s.intervals[0], Interval { start: 0, end: 4, kind: IntervalKind::Normal });
        assert_eq!(
            s.intervals[1],
            Interval { start: 4, end: 5, kind: IntervalKind::Edge { distance: 0.5 } }
        );
        assert_eq!(s.intervals[2], Interval { start: 5, end: 9, kind: IntervalKind::Normal });
    }

    #[test]
    fn quiet_sequence_is_one_interval() {
        let s = segment_distances(&[0.0; 5], 0.15);
        assert_eq!(s.boundaries, vec![0, 5]);
        assert_eq!(s.intervals.len(), 1);
    }

    #[test]
    fn consecutive_and_terminal_jumps() {
        let s = segment_distances(&[0.2, 0.3, 0.0, 0.4], 0.15);
        assert_eq!(s.boundaries, vec![0, 1, 2, 3, 4]);
        let kinds: Vec<bool> =
            s.intervals.iter().map(|i| matches!(i.kind, IntervalKind::Edge { .. })).collect();
        assert_eq!(kinds, vec![true, true, false, true]);
    }

    #[test]
    fn intervals_tile_the_axis() {
        let s = segment_distances(&[0.0, 0.3, 0.3, 0.0, 0.0, 0.9, 0.0], 0.15);
        assert_eq!(s.intervals.first().unwrap().start, 0);
        assert_eq!(s.intervals.last().unwrap().end, 7);
        for w in s.intervals.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }
}
