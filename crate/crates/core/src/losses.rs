//! Training objective for mask predictors supervised by a pseudo-mask.
//!
//! Every prediction is pulled towards the pseudo-mask with a smoothed Dice
//! loss. Predictions are ranked by that loss, and a zero-margin pairwise
//! hinge asks the objectness scores to follow the same order. All functions
//! return the loss together with its analytic gradient.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{BinaryMask, Error, Result, SoftMask};

/// Additive smoothing in the Dice numerator and denominator.
pub const DICE_SMOOTHING: f64 = 1.0;

/// Weight of the ranking term in [`total_loss`].
pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Threshold applied to the chosen mask at inference (strict `>`).
pub const INFERENCE_THRESHOLD: f64 = 0.5;

/// `n_q` soft mask predictions on a shared grid with their objectness scores.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch {
    masks: Vec<SoftMask>,
    objectness: Vec<f64>,
}

impl PredictionBatch {
    pub fn new(masks: Vec<SoftMask>, objectness: Vec<f64>) -> Result<Self> {
        let first = masks
            .first()
            .ok_or_else(|| Error::Parameter("a prediction batch needs at least one mask".to_string()))?;
        if objectness.len() != masks.len() {
            return Err(Error::Shape(format!(
                "{} masks but {} objectness scores",
                masks.len(),
                objectness.len()
            )));
        }
        if let Some(i) = masks.iter().position(|m| m.dims() != first.dims()) {
            return Err(Error::Shape(format!("prediction {i} does not share the grid of prediction 0")));
        }
        if let Some(index) = objectness.iter().position(|o| !(0.0..=1.0).contains(o)) {
            return Err(Error::OutOfRange { index, what: "objectness" });
        }
        Ok(Self { masks, objectness })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[SoftMask] {
        &self.masks
    }

    pub fn objectness(&self) -> &[f64] {
        &self.objectness
    }

    pub fn dims(&self) -> (usize, usize) {
        self.masks[0].dims()
    }
}

/// Dice loss `1 − (2Σpg + ε)/(Σp + Σg + ε)` and its gradient w.r.t. `pred`.
pub fn dice_loss(pred: &SoftMask, target: &BinaryMask) -> Result<(f64, Vec<f64>)> {
    if pred.dims() != target.dims() {
        return Err(Error::Shape(format!("prediction {:?} vs target {:?}", pred.dims(), target.dims())));
    }
    Ok(dice_loss_values(pred.values(), target.bits()))
}

/// [`dice_loss`] on raw slices of equal length.
pub fn dice_loss_values(pred: &[f64], target: &[bool]) -> (f64, Vec<f64>) {
    debug_assert_eq!(pred.len(), target.len());
    let mut overlap = 0.0;
    let mut pred_sum = 0.0;
    let mut target_sum = 0.0;
    for (&p, &g) in pred.iter().zip(target) {
        pred_sum += p;
        if g {
            overlap += p;
            target_sum += 1.0;
        }
    }
    let num = 2.0 * overlap + DICE_SMOOTHING;
    let den = pred_sum + target_sum + DICE_SMOOTHING;
    let loss = 1.0 - num / den;
    // d/dp_k [num/den] = (2 g_k den − num) / den²
    let grad = target
        .iter()
        .map(|&g| {
            let g = if g { 1.0 } else { 0.0 };
            -(2.0 * g * den - num) / (den * den)
        })
        .collect();
    (loss, grad)
}

/// Indices of the predictions sorted by Dice loss against `pseudo`, best first.
/// Equal losses keep their original relative order.
pub fn rank_predictions(batch: &PredictionBatch, pseudo: &BinaryMask) -> Result<Vec<usize>> {
    let losses =
        batch.masks().iter().map(|m| dice_loss(m, pseudo).map(|(l, _)| l)).collect::<Result<Vec<_>>>()?;
    Ok(order_by_loss(&losses))
}

fn order_by_loss(losses: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..losses.len()).collect();
    order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));
    order
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidPermutation);
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation);
        }
        seen[i] = true;
    }
    Ok(())
}

/// Hinge ranking loss `Σ_{r<s} max(0, o[order[s]] − o[order[r]])`, where
/// `order[0]` is the prediction that should score highest. The gradient is
/// indexed like `objectness`; at `o_j = o_i` the inactive side (0) is taken.
pub fn ranking_loss(objectness: &[f64], order: &[usize]) -> Result<(f64, Vec<f64>)> {
    check_permutation(order, objectness.len())?;
    let mut loss = 0.0;
    let mut grad = vec![0.0; objectness.len()];
    for (r, &hi) in order.iter().enumerate() {
        for &lo in &order[r + 1..] {
            let margin = objectness[lo] - objectness[hi];
            if margin > 0.0 {
                loss += margin;
                grad[lo] += 1.0;
                grad[hi] -= 1.0;
            }
        }
    }
    Ok((loss, grad))
}

/// Value and gradients of the combined objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalLoss {
    pub value: f64,
    /// Mean Dice loss over the predictions.
    pub mask_loss: f64,
    pub rank_loss: f64,
    /// Ranking used by the hinge term, best prediction first.
    pub order: Vec<usize>,
    /// Gradient w.r.t. every value of every mask, in batch order.
    pub mask_grads: Vec<Vec<f64>>,
    pub objectness_grad: Vec<f64>,
}

/// `L = mean_i Dice(M_i, pseudo) + λ · L_rank`.
///
/// Models with several decoder layers apply this per layer and sum.
pub fn total_loss(batch: &PredictionBatch, pseudo: &BinaryMask, lambda: f64) -> Result<TotalLoss> {
    let n_q = batch.len() as f64;
    let mut losses = Vec::with_capacity(batch.len());
    let mut mask_grads = Vec::with_capacity(batch.len());
    for m in batch.masks() {
        let (l, mut g) = dice_loss(m, pseudo)?;
        for v in &mut g {
            *v /= n_q;
        }
        losses.push(l);
        mask_grads.push(g);
    }
    let mask_loss = losses.iter().sum::<f64>() / n_q;
    let order = order_by_loss(&losses);
    let (rank_loss, mut objectness_grad) = ranking_loss(batch.objectness(), &order)?;
    for g in &mut objectness_grad {
        *g *= lambda;
    }
    Ok(TotalLoss {
        value: mask_loss + lambda * rank_loss,
        mask_loss,
        rank_loss,
        order,
        mask_grads,
        objectness_grad,
    })
}

/// Highest-objectness prediction (lowest index on ties), binarised at 0.5.
pub fn select_inference_mask(batch: &PredictionBatch) -> BinaryMask {
    let mut best = 0;
    for (i, &o) in batch.objectness().iter().enumerate() {
        if o > batch.objectness()[best] {
            best = i;
        }
    }
    batch.masks()[best].binarize(INFERENCE_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soft(h: usize, w: usize, v: &[f64]) -> SoftMask {
        SoftMask::new(h, w, v.to_vec()).unwrap()
    }

    #[test]
    fn perfect_prediction_has_zero_dice() {
        let t = BinaryMask::new(2, 2, vec![true, false, true, true]).unwrap();
        let p = soft(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(dice_loss(&p, &t).unwrap().0, 0.0);
    }

    #[test]
    fn complement_on_two_pixels() {
        let t = BinaryMask::new(1, 2, vec![true, false]).unwrap();
        let p = soft(1, 2, &[0.0, 1.0]);
        let (l, _) = dice_loss(&p, &t).unwrap();
        assert!((l - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dice_shape_mismatch() {
        let t = BinaryMask::filled(1, 2, true).unwrap();
        assert!(dice_loss(&soft(2, 1, &[0.5, 0.5]), &t).is_err());
    }

    #[test]
    fn ranking_loss_examples() {
        assert_eq!(ranking_loss(&[0.9, 0.5, 0.1], &[0, 1, 2]).unwrap().0, 0.0);
        let (l, g) = ranking_loss(&[0.2, 0.5], &[0, 1]).unwrap();
        assert!((l - 0.3).abs() < 1e-15);
        assert_eq!(g, vec![-1.0, 1.0]);
        assert_eq!(ranking_loss(&[0.4], &[0]).unwrap().0, 0.0);
        // Equal scores sit on the kink; zero loss and zero subgradient.
        assert_eq!(ranking_loss(&[0.4, 0.4], &[1, 0]).unwrap(), (0.0, vec![0.0, 0.0]));
    }

    #[test]
    fn invalid_permutations() {
        assert_eq!(ranking_loss(&[0.1, 0.2], &[0, 0]), Err(Error::InvalidPermutation));
        assert_eq!(ranking_loss(&[0.1, 0.2], &[0]), Err(Error::InvalidPermutation));
        assert_eq!(ranking_loss(&[0.1, 0.2], &[0, 2]), Err(Error::InvalidPermutation));
    }

    #[test]
    fn exact_match_is_ranked_first() {
        let pseudo = BinaryMask::new(1, 3, vec![true, false, true]).unwrap();
        let batch = PredictionBatch::new(
            vec![soft(1, 3, &[0.0, 1.0, 0.0]), soft(1, 3, &[0.0, 1.0, 0.0]), soft(1, 3, &[1.0, 0.0, 1.0])],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        assert_eq!(rank_predictions(&batch, &pseudo).unwrap(), vec![2, 0, 1]);
        let single = PredictionBatch::new(vec![soft(1, 3, &[0.3, 0.3, 0.3])], vec![0.5]).unwrap();
        assert_eq!(rank_predictions(&single, &pseudo).unwrap(), vec![0]);
    }

    #[test]
    fn total_loss_components() {
        let pseudo = BinaryMask::new(1, 2, vec![true, false]).unwrap();
        let batch =
            PredictionBatch::new(vec![soft(1, 2, &[0.9, 0.2]), soft(1, 2, &[0.1, 0.8])], vec![0.3, 0.7])
                .unwrap();
        let no_rank = total_loss(&batch, &pseudo, 0.0).unwrap();
        assert_eq!(no_rank.value, no_rank.mask_loss);
        assert_eq!(no_rank.objectness_grad, vec![0.0, 0.0]);
        let full = total_loss(&batch, &pseudo, DEFAULT_LAMBDA).unwrap();
        assert!((full.rank_loss - 0.4).abs() < 1e-15);

        let perfect = PredictionBatch::new(vec![soft(1, 2, &[1.0, 0.0])], vec![1.0]).unwrap();
        assert_eq!(total_loss(&perfect, &pseudo, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn inference_selection() {
        let batch = PredictionBatch::new(
            vec![soft(1, 2, &[0.9, 0.9]), soft(1, 2, &[0.6, 0.4]), soft(1, 2, &[0.0, 1.0])],
            vec![0.1, 0.9, 0.3],
        )
        .unwrap();
        assert_eq!(select_inference_mask(&batch).bits(), &[true, false]);
        let half = PredictionBatch::new(vec![soft(1, 3, &[0.5; 3])], vec![0.2]).unwrap();
        assert!(select_inference_mask(&half).is_empty());
    }

    #[test]
    fn batch_validation() {
        assert!(PredictionBatch::new(vec![], vec![]).is_err());
        assert!(PredictionBatch::new(vec![soft(1, 1, &[0.5])], vec![1.5]).is_err());
        assert!(
            PredictionBatch::new(vec![soft(1, 1, &[0.5]), soft(1, 2, &[0.5, 0.5])], vec![0.1, 0.2]).is_err()
        );
    }
}
