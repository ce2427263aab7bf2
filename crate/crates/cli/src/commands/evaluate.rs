use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use spectral_vote_core::metrics::{evaluate_image, EvalReport, ImageScores};
use spectral_vote_core::resize_gray_nearest;

use super::thread_pool;
use crate::atomic::{write_atomic, write_json};
use crate::error::{CliError, Result};
use crate::masks::{read_gray, read_mask};

pub const REPORT_FILE: &str = "evaluation.json";
pub const CSV_FILE: &str = "evaluation.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub pred: PathBuf,
    pub gt: PathBuf,
    pub out: PathBuf,
    pub csv: bool,
    /// Score the matched pairs even if some files have no counterpart.
    pub allow_missing: bool,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub count: usize,
    pub mean_iou: f64,
    pub mean_accuracy: f64,
    pub mean_max_f_beta: f64,
    pub images: Vec<ImageScores>,
    /// Ground-truth stems with no prediction.
    pub missing_predictions: Vec<String>,
    /// Prediction stems with no ground truth.
    pub missing_ground_truth: Vec<String>,
    /// Predictions resampled (nearest) to ground-truth resolution.
    pub resized: Vec<String>,
}

/// Scores every prediction in `pred` against the same-stem mask in `gt`.
/// Predictions are binarised at `> 127` for IoU and accuracy. Files without
/// a counterpart are listed in the report and left out of the means; see
/// [`Evaluation::exit_code`].
pub fn run(config: &EvalConfig) -> Result<Evaluation> {
    let preds = list_masks(&config.pred)?;
    let gts = list_masks(&config.gt)?;
    let matched: Vec<(&String, &PathBuf, &PathBuf)> =
        preds.iter().filter_map(|(stem, p)| gts.get(stem).map(|g| (stem, p, g))).collect();
    if matched.is_empty() {
        return Err(CliError::Invalid(format!(
            "no prediction in {} matches a ground-truth mask in {}",
            config.pred.display(),
            config.gt.display()
        )));
    }
    let missing_predictions: Vec<String> = gts.keys().filter(|s| !preds.contains_key(*s)).cloned().collect();
    let missing_ground_truth: Vec<String> = preds.keys().filter(|s| !gts.contains_key(*s)).cloned().collect();
    let pool = thread_pool(config.workers)?;
    let scored: Vec<Result<(ImageScores, bool)>> =
        pool.install(|| matched.par_iter().map(|(stem, p, g)| score_pair(stem, p, g)).collect());
    let mut images = Vec::with_capacity(scored.len());
    let mut resized = Vec::new();
    for r in scored {
        let (scores, was_resized) = r?;
        if was_resized {
            resized.push(scores.name.clone());
        }
        images.push(scores);
    }

    let report = EvalReport::from_records(images);
    let evaluation = Evaluation {
        count: report.images.len(),
        mean_iou: report.mean_iou,
        mean_accuracy: report.mean_accuracy,
        mean_max_f_beta: report.mean_max_f_beta,
        images: report.images,
        missing_predictions,
        missing_ground_truth,
        resized,
    };
    write_json(&config.out.join(REPORT_FILE), &evaluation)?;
    if config.csv {
        write_atomic(&config.out.join(CSV_FILE), &to_csv(&evaluation)?)?;
    }
    Ok(evaluation)
}

impl Evaluation {
    pub fn complete(&self) -> bool {
        self.missing_predictions.is_empty() && self.missing_ground_truth.is_empty()
    }

    /// 1 if some file was unmatched and that is not allowed, else 0.
    pub fn exit_code(&self, allow_missing: bool) -> i32 {
        if self.complete() || allow_missing {
            0
        } else {
            crate::error::EXIT_INPUT
        }
    }
}

fn score_pair(stem: &str, pred_path: &Path, gt_path: &Path) -> Result<(ImageScores, bool)> {
    let gt = read_mask(gt_path)?;
    let mut pred = read_gray(pred_path)?;
    let resize = pred.dims() != gt.dims();
    if resize {
        pred = resize_gray_nearest(&pred, gt.height(), gt.width())?;
    }
    let scores = evaluate_image(stem, &pred, &gt).map_err(|e| CliError::from(e).with_path(gt_path))?;
    Ok((scores, resize))
}

/// `.pgm` and `.png` files in `dir`, keyed by file stem.
fn list_masks(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut found = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if !matches!(ext.as_deref(), Some("pgm" | "png")) || !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
            continue;
        };
        if let Some(prev) = found.insert(stem.clone(), path.clone()) {
            return Err(CliError::Invalid(format!(
                "{} and {} share the stem '{stem}'",
                prev.display(),
                path.display()
            )));
        }
    }
    Ok(found)
}

fn to_csv(e: &Evaluation) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row =
        |fields: [String; 4]| w.write_record(&fields).map_err(|err| CliError::Internal(err.to_string()));
    row(["image".into(), "iou".into(), "accuracy".into(), "max_f_beta".into()])?;
    for r in &e.images {
        row([r.name.clone(), r.iou.to_string(), r.accuracy.to_string(), r.max_f_beta.to_string()])?;
    }
    row(["mean".into(), e.mean_iou.to_string(), e.mean_accuracy.to_string(), e.mean_max_f_beta.to_string()])?;
    w.into_inner().map_err(|err| CliError::Internal(err.to_string()))
}
