//! Salient object detection metrics.
//!
//! Binary metrics take a predicted and a ground-truth [`BinaryMask`]. Max-Fβ
//! takes an 8-bit prediction and sweeps the thresholds `0..=254`, treating
//! `value > t` as foreground. Dataset scores are unweighted per-image means.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{BinaryMask, Error, GrayMask, Result};

/// Default precision weight β² used throughout SOD evaluation.
pub const DEFAULT_BETA_SQ: f64 = 0.3;

/// Threshold that binarises an 8-bit prediction at one half.
pub const HALF_THRESHOLD: u8 = 127;

fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("mask dims {a:?} != {b:?}")));
    }
    Ok(())
}

/// `|a ∩ b| / |a ∪ b|`; two empty masks score 1.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let union = a.union_count(b);
    if union == 0 {
        return Ok(1.0);
    }
    Ok(a.intersection_count(b) as f64 / union as f64)
}

/// Fraction of pixels where `pred` and `gt` agree.
pub fn accuracy(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    check_dims(pred.dims(), gt.dims())?;
    let agree = pred.bits().iter().zip(gt.bits()).filter(|(a, b)| a == b).count();
    Ok(agree as f64 / pred.len() as f64)
}

/// Confusion counts of a binary prediction against a ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn of(pred: &BinaryMask, gt: &BinaryMask) -> Result<Self> {
        check_dims(pred.dims(), gt.dims())?;
        let mut c = Confusion { tp: 0, fp: 0, fn_: 0 };
        for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
            match (p, g) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => {}
            }
        }
        Ok(c)
    }

    /// Fβ from the counts. Requires `tp + fn > 0`.
    pub fn f_beta(&self, beta_sq: f64) -> f64 {
        if self.tp == 0 {
            return 0.0;
        }
        let precision = self.tp as f64 / (self.tp + self.fp) as f64;
        let recall = self.tp as f64 / (self.tp + self.fn_) as f64;
        f_beta_from_pr(precision, recall, beta_sq)
    }
}

/// `(1+β²)·P·R / (β²·P + R)`, zero when both are zero.
pub fn f_beta_from_pr(precision: f64, recall: f64, beta_sq: f64) -> f64 {
    let denom = beta_sq * precision + recall;
    if denom == 0.0 {
        return 0.0;
    }
    (1.0 + beta_sq) * precision * recall / denom
}

/// Fβ of a binary prediction. An empty ground truth is an error since recall
/// is undefined.
pub fn f_beta(pred: &BinaryMask, gt: &BinaryMask, beta_sq: f64) -> Result<f64> {
    let c = Confusion::of(pred, gt)?;
    if c.tp + c.fn_ == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    Ok(c.f_beta(beta_sq))
}

/// Maximum Fβ (β² = 0.3) over the 255 binarisations `pred > t`, `t ∈ 0..=254`.
pub fn max_f_beta(pred: &GrayMask, gt: &BinaryMask) -> Result<f64> {
    max_f_beta_with(pred, gt, DEFAULT_BETA_SQ)
}

pub fn max_f_beta_with(pred: &GrayMask, gt: &BinaryMask, beta_sq: f64) -> Result<f64> {
    check_dims(pred.dims(), gt.dims())?;
    let mut fg = [0usize; 256];
    let mut bg = [0usize; 256];
    for (&v, &g) in pred.values().iter().zip(gt.bits()) {
        if g {
            fg[v as usize] += 1;
        } else {
            bg[v as usize] += 1;
        }
    }
    let positives: usize = fg.iter().sum();
    if positives == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    // Walk thresholds downward: at `t`, the prediction is every value > t.
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut best = 0.0f64;
    for t in (0..=254usize).rev() {
        tp += fg[t + 1];
        fp += bg[t + 1];
        let score = Confusion { tp, fp, fn_: positives - tp }.f_beta(beta_sq);
        if score > best {
            best = score;
        }
    }
    Ok(best)
}

/// Best IoU of any candidate against `gt`, with its index (lowest on ties).
pub fn upper_bound_iou(masks: &[BinaryMask], gt: &BinaryMask) -> Result<(f64, usize)> {
    if masks.is_empty() {
        return Err(Error::Parameter("upper-bound IoU needs at least one mask".to_string()));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, m) in masks.iter().enumerate() {
        let s = iou(m, gt)?;
        if s > best.0 {
            best = (s, i);
        }
    }
    Ok(best)
}

/// Scores of one prediction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImageScores {
    pub name: String,
    pub iou: f64,
    pub accuracy: f64,
    pub max_f_beta: f64,
}

/// Scores an 8-bit prediction: IoU and accuracy on the half-binarised mask
/// (`value > 127`), max-Fβ over all thresholds.
pub fn evaluate_image(name: &str, pred: &GrayMask, gt: &BinaryMask) -> Result<ImageScores> {
    let binary = pred.threshold(HALF_THRESHOLD);
    Ok(ImageScores {
        name: name.to_string(),
        iou: iou(&binary, gt)?,
        accuracy: accuracy(&binary, gt)?,
        max_f_beta: max_f_beta(pred, gt)?,
    })
}

/// Per-image scores plus their unweighted means.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub images: Vec<ImageScores>,
    pub mean_iou: f64,
    pub mean_accuracy: f64,
    pub mean_max_f_beta: f64,
}

impl EvalReport {
    /// Means are accumulated in record order. An empty record list gives
    /// zero means.
    pub fn from_records(images: Vec<ImageScores>) -> Self {
        let n = images.len().max(1) as f64;
        let mut sums = (0.0, 0.0, 0.0);
        for r in &images {
            sums.0 += r.iou;
            sums.1 += r.accuracy;
            sums.2 += r.max_f_beta;
        }
        Self { images, mean_iou: sums.0 / n, mean_accuracy: sums.1 / n, mean_max_f_beta: sums.2 / n }
    }
}
