use rayon::prelude::*;

use super::{AnimationSet, DsiError, DsiParams, MIN_PRENORM};
use crate::quaternion::Quaternion;
use crate::rotation::{align_track, RotationSequence};
use crate::seed::{derive_seed, rng_from_seed, uniform};

/// Redraws allowed per track before a variant is given up.
pub const MAX_RESAMPLES: usize = 16;

pub fn variant_seed(seed: u64, variant: usize) -> u64 {
    derive_seed(seed, "variant", &[variant as u64])
}

pub fn track_seed(variant_seed: u64, joint: usize) -> u64 {
    derive_seed(variant_seed, "joint", &[joint as u64])
}

/// Adds `U(noise_low, noise_high)` to every component of one track, drawing
/// x, y, z, w per frame in order. Returns `None` when some perturbed
/// quaternion fell below the norm floor.
fn perturb_track(
    track: &[Quaternion],
    rng: &mut crate::seed::StageRng,
    low: f64,
    high: f64,
) -> Option<Vec<Quaternion>> {
    let mut out = Vec::with_capacity(track.len());
    for q in track {
        let mut c = q.to_array();
        for v in &mut c {
            *v += uniform(rng, low, high);
        }
        let p = Quaternion::from_array(c);
        let n = p.norm();
        if !(n >= MIN_PRENORM) {
            return None;
        }
        out.push(p.scale(1.0 / n));
    }
    align_track(&mut out);
    Some(out)
}

/// `V` independently seeded noisy copies of `seq`.
pub fn random_variants(seq: &RotationSequence, params: &DsiParams) -> Result<AnimationSet, DsiError> {
    params.validate()?;
    seq.validate()?;
    let seeds: Vec<u64> = (0..params.variants).map(|v| variant_seed(params.seed, v)).collect();
    let variants = seeds
        .par_iter()
        .enumerate()
        .map(|(v, &vs)| {
            let tracks = seq
                .tracks
                .iter()
                .enumerate()
                .map(|(j, track)| {
                    let mut rng = rng_from_seed(track_seed(vs, j));
                    (0..MAX_RESAMPLES)
                        .find_map(|_| perturb_track(track, &mut rng, params.noise_low, params.noise_high))
                        .ok_or(DsiError::ResampleExhausted { variant: v, joint: j, attempts: MAX_RESAMPLES })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RotationSequence { fps: seq.fps, root_positions: seq.root_positions.clone(), tracks })
        })
        .collect::<Result<Vec<_>, DsiError>>()?;
    let source_times = (0..seq.frame_count()).map(|f| f as f64).collect();
    Ok(AnimationSet { variants, seeds, source_times })
}
