//! Pseudo-mask selection from a candidate pool.
//!
//! Two priors drive the selection. Under the framing prior, a candidate
//! whose foreground bounding box spans the full grid width or height is
//! background and is dropped. If every candidate would be dropped, the pool
//! is kept whole. Under the distinctiveness prior, the surviving candidate
//! with the highest mean IoU against the *other* survivors wins. Scores
//! within [`TIE_TOLERANCE`] of the maximum count as tied, and the winner is
//! drawn uniformly among them from the seed.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::metrics::iou;
use crate::seed::{derive_seed, rng_from_seed, VOTE_TAG};
use crate::spectral::{generate_candidates, CandidatePool, Provenance};
use crate::{BinaryMask, FeatureMap, Result};

/// Mean-IoU scores this close to the maximum are treated as a tie. Mean IoUs
/// of identical masks can differ by a few ulps through summation order.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VoteResult {
    pub winner: BinaryMask,
    pub winner_provenance: Provenance,
    /// Index of the winner within the voting (post-filter) pool.
    pub winner_index: usize,
    /// Winner's mean IoU against the other voters; 0 for a lone candidate.
    pub mean_iou: f64,
    /// Candidates before the framing filter.
    pub pool_size: usize,
    /// Candidates that took part in the vote.
    pub filtered_count: usize,
    pub tie_broken: bool,
}

/// True when the foreground bounding box reaches the full grid width or height.
pub fn spans_frame(mask: &BinaryMask) -> bool {
    match mask.bounding_box() {
        Some(b) => b.width() == mask.width() || b.height() == mask.height(),
        None => false,
    }
}

/// Drops frame-spanning candidates; returns the pool unchanged if none survive.
pub fn framing_filter(pool: &CandidatePool) -> CandidatePool {
    let keep: Vec<bool> = pool.masks().iter().map(|m| !spans_frame(m)).collect();
    if keep.iter().any(|&k| k) {
        pool.retain_indices(&keep)
    } else {
        pool.clone()
    }
}

/// Mean IoU of each candidate against all other candidates.
pub fn mean_iou_scores(pool: &CandidatePool) -> Vec<f64> {
    let masks = pool.masks();
    let p = masks.len();
    if p < 2 {
        return vec![0.0; p];
    }
    let mut sums = vec![0.0; p];
    for i in 0..p {
        for j in (i + 1)..p {
            // Pool masks share a grid, so the IoU cannot fail.
            let s = iou(&masks[i], &masks[j]).expect("pool masks share a grid");
            sums[i] += s;
            sums[j] += s;
        }
    }
    sums.iter().map(|s| s / (p - 1) as f64).collect()
}

/// Picks the candidate with the highest mean pairwise IoU.
pub fn winner_takes_all(pool: &CandidatePool, seed: u64) -> VoteResult {
    let scores = mean_iou_scores(pool);
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..scores.len()).filter(|&i| best - scores[i] <= TIE_TOLERANCE).collect();
    let tie_broken = tied.len() > 1;
    let winner_index =
        if tie_broken { tied[rng_from_seed(seed).random_range(0..tied.len())] } else { tied[0] };
    VoteResult {
        winner: pool.masks()[winner_index].clone(),
        winner_provenance: pool.provenance()[winner_index].clone(),
        winner_index,
        mean_iou: scores[winner_index],
        pool_size: pool.len(),
        filtered_count: pool.len(),
        tie_broken,
    }
}

/// Framing filter then winner-takes-all on an existing pool.
pub fn vote(pool: &CandidatePool, root_seed: u64) -> VoteResult {
    let survivors = framing_filter(pool);
    let mut result = winner_takes_all(&survivors, derive_seed(root_seed, VOTE_TAG, 0));
    result.pool_size = pool.len();
    result
}

/// Candidate generation, framing filter and voting in one call.
pub fn select_pseudo_mask(
    feature_sets: &[(&str, &FeatureMap)],
    ks: &[usize],
    root_seed: u64,
) -> Result<VoteResult> {
    let pool = generate_candidates(feature_sets, ks, root_seed)?;
    Ok(vote(&pool, root_seed))
}
