//! Metric and loss checks against independent brute-force computations.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_vote_core::losses::{
    dice_loss, rank_predictions, ranking_loss, select_inference_mask, total_loss, PredictionBatch,
};
use spectral_vote_core::metrics::{accuracy, f_beta, iou, max_f_beta, upper_bound_iou, HALF_THRESHOLD};
use spectral_vote_core::{BinaryMask, GrayMask, SoftMask};

fn random_mask(rng: &mut ChaCha8Rng, h: usize, w: usize, p: f64) -> BinaryMask {
    BinaryMask::new(h, w, (0..h * w).map(|_| rng.random_bool(p)).collect()).unwrap()
}

fn non_empty_mask(rng: &mut ChaCha8Rng, h: usize, w: usize) -> BinaryMask {
    loop {
        let m = random_mask(rng, h, w, 0.4);
        if !m.is_empty() {
            return m;
        }
    }
}

/// Fβ straight from the definition on bit vectors.
fn brute_f_beta(pred: &[bool], gt: &[bool], beta_sq: f64) -> f64 {
    let tp = pred.iter().zip(gt).filter(|(p, g)| **p && **g).count() as f64;
    let pp = pred.iter().filter(|p| **p).count() as f64;
    let gp = gt.iter().filter(|g| **g).count() as f64;
    if tp == 0.0 {
        return 0.0;
    }
    let (precision, recall) = (tp / pp, tp / gp);
    (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall)
}

#[test]
fn max_f_beta_matches_threshold_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let gt = non_empty_mask(&mut rng, 8, 8);
        let values: Vec<u8> = (0..64).map(|_| rng.random()).collect();
        let pred = GrayMask::new(8, 8, values.clone()).unwrap();
        let mut sweep = 0.0f64;
        for t in 0..=254u8 {
            let bits: Vec<bool> = values.iter().map(|&v| v > t).collect();
            sweep = sweep.max(brute_f_beta(&bits, gt.bits(), 0.3));
        }
        let got = max_f_beta(&pred, &gt).unwrap();
        assert_eq!(got, sweep);
        assert!(got >= f_beta(&pred.threshold(HALF_THRESHOLD), &gt, 0.3).unwrap());
    }
}

#[test]
fn upper_bound_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let gt = non_empty_mask(&mut rng, 6, 6);
        let masks: Vec<BinaryMask> = (0..5).map(|_| random_mask(&mut rng, 6, 6, 0.5)).collect();
        let scores: Vec<f64> = masks.iter().map(|m| iou(m, &gt).unwrap()).collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let idx = scores.iter().position(|&s| s == best).unwrap();
        assert_eq!(upper_bound_iou(&masks, &gt).unwrap(), (best, idx));
    }
}

proptest! {
    #[test]
    fn metric_identities(seed in any::<u64>(), h in 1usize..9, w in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mask(&mut rng, h, w, 0.5);
        let b = random_mask(&mut rng, h, w, 0.5);
        let ab = iou(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, iou(&b, &a).unwrap());
        prop_assert_eq!(iou(&a, &a).unwrap(), 1.0);
        let sum = accuracy(&a, &b).unwrap() + accuracy(&a.complement(), &b).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        if !b.is_empty() {
            let c = spectral_vote_core::metrics::Confusion::of(&a, &b).unwrap();
            let f1 = f_beta(&a, &b, 1.0).unwrap();
            let classical = if c.tp == 0 { 0.0 } else {
                let p = c.tp as f64 / (c.tp + c.fp) as f64;
                let r = c.tp as f64 / (c.tp + c.fn_) as f64;
                2.0 * p * r / (p + r)
            };
            prop_assert!((f1 - classical).abs() < 1e-12);
        }
    }
}

// ---- losses ----

fn random_soft(rng: &mut ChaCha8Rng, h: usize, w: usize) -> SoftMask {
    SoftMask::new(h, w, (0..h * w).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap()
}

#[test]
fn rank_order_matches_sorted_losses() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n_q = rng.random_range(1..=7);
        let pseudo = non_empty_mask(&mut rng, 4, 4);
        let masks: Vec<SoftMask> = (0..n_q).map(|_| random_soft(&mut rng, 4, 4)).collect();
        let batch = PredictionBatch::new(masks, (0..n_q).map(|_| rng.random()).collect()).unwrap();
        let losses: Vec<f64> = batch.masks().iter().map(|m| dice_loss(m, &pseudo).unwrap().0).collect();
        // Insertion sort oracle: stable by construction.
        let mut oracle: Vec<usize> = Vec::new();
        for i in 0..n_q {
            let pos = oracle.iter().position(|&j| losses[j] > losses[i]).unwrap_or(oracle.len());
            oracle.insert(pos, i);
        }
        assert_eq!(rank_predictions(&batch, &pseudo).unwrap(), oracle);
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn ranking_loss_zero_iff_non_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=4 {
        for _ in 0..50 {
            // Occasionally repeat a value so equal-score orderings are covered.
            let mut scores: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            if n > 1 && rng.random_bool(0.3) {
                scores[1] = scores[0];
            }
            for order in permutations(n) {
                let (loss, _) = ranking_loss(&scores, &order).unwrap();
                let non_increasing = order.windows(2).all(|p| scores[p[0]] >= scores[p[1]]);
                assert!(loss >= 0.0);
                assert_eq!(loss == 0.0, non_increasing, "scores {scores:?} order {order:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn dice_bounds_and_pixel_permutation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_soft(&mut rng, 3, 5);
        let g = random_mask(&mut rng, 3, 5, 0.5);
        let (l, _) = dice_loss(&p, &g).unwrap();
        prop_assert!((0.0..1.0).contains(&l));
        let mut idx: Vec<usize> = (0..15).collect();
        for i in (1..15).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let pp = SoftMask::new(3, 5, idx.iter().map(|&i| p.values()[i]).collect()).unwrap();
        let gp = BinaryMask::new(3, 5, idx.iter().map(|&i| g.bits()[i]).collect()).unwrap();
        prop_assert!((dice_loss(&pp, &gp).unwrap().0 - l).abs() < 1e-12);
    }

    #[test]
    fn ranking_loss_shift_invariant(
        scores in prop::collection::vec(0.0f64..0.5, 1..7),
        shift in 0.0f64..0.5,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..scores.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
        let a = ranking_loss(&scores, &order).unwrap().0;
        let b = ranking_loss(&shifted, &order).unwrap().0;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn inference_argmax_is_monotone_invariant(seed in any::<u64>(), n_q in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let masks: Vec<SoftMask> = (0..n_q).map(|_| random_soft(&mut rng, 3, 3)).collect();
        let o: Vec<f64> = (0..n_q).map(|_| rng.random()).collect();
        let squashed: Vec<f64> = o.iter().map(|v| v * v * 0.5 + 0.1).collect();
        let a = select_inference_mask(&PredictionBatch::new(masks.clone(), o).unwrap());
        let b = select_inference_mask(&PredictionBatch::new(masks, squashed).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn total_loss_decomposes(seed in any::<u64>(), n_q in 1usize..5, lambda in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pseudo = non_empty_mask(&mut rng, 3, 3);
        let masks: Vec<SoftMask> = (0..n_q).map(|_| random_soft(&mut rng, 3, 3)).collect();
        let o: Vec<f64> = (0..n_q).map(|_| rng.random()).collect();
        let batch = PredictionBatch::new(masks, o.clone()).unwrap();
        let t = total_loss(&batch, &pseudo, lambda).unwrap();
        let mean_dice = batch.masks().iter().map(|m| dice_loss(m, &pseudo).unwrap().0).sum::<f64>() / n_q as f64;
        let order = rank_predictions(&batch, &pseudo).unwrap();
        let rank = ranking_loss(&o, &order).unwrap().0;
        prop_assert!((t.value - (mean_dice + lambda * rank)).abs() < 1e-12);
    }
}
