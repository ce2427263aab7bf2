use std::path::{Path, PathBuf};

use serde::Serialize;
use spectral_vote_core::metrics::iou;
use spectral_vote_core::spectral::{generate_candidates, Provenance};
use spectral_vote_core::voting::vote;
use spectral_vote_core::{resize_mask_nearest, FeatureMap};

use super::{run_batch, BatchSummary};
use crate::atomic::write_json;
use crate::config::RunConfig;
use crate::error::Result;
use crate::manifest::{ImageEntry, Manifest};
use crate::masks::{read_mask, write_mask};
use crate::npy::read_feature_map;

#[derive(Debug, Serialize)]
struct Upsampled {
    file: String,
    height: usize,
    width: usize,
}

#[derive(Debug, Serialize)]
struct PseudoSidecar<'a> {
    image: &'a str,
    root_seed: u64,
    sources: &'a [String],
    ks: &'a [usize],
    grid: [usize; 2],
    pool_size: usize,
    filtered_count: usize,
    winner: Provenance,
    winner_index: usize,
    mean_iou: f64,
    tie_broken: bool,
    mask: String,
    upsampled: Option<Upsampled>,
    /// IoU against `<gt>/<id>` at ground-truth resolution, when available.
    reference_iou: Option<f64>,
}

/// Writes `<out>/<id>.pgm` (the winning mask at feature resolution), an
/// optional `<id>_upsampled.pgm`, and a `<id>.json` sidecar.
pub fn run(config: &RunConfig) -> Result<BatchSummary> {
    config.validate()?;
    let manifest = Manifest::load(&config.manifest)?;
    let sources = manifest.resolve_sources(config.sources.as_deref())?;
    run_batch("pseudo-label", &manifest.images, &config.out, config.workers, config.keep_going, |entry| {
        label_image(entry, &sources, config)
    })
}

fn label_image(entry: &ImageEntry, sources: &[String], config: &RunConfig) -> Result<()> {
    let mut loaded: Vec<(&str, FeatureMap)> = Vec::with_capacity(sources.len());
    for source in sources {
        loaded.push((source.as_str(), read_feature_map(entry.feature_path(source)?)?));
    }
    let named: Vec<(&str, &FeatureMap)> = loaded.iter().map(|(n, f)| (*n, f)).collect();
    let pool = generate_candidates(&named, &config.ks, config.seed)?;
    let result = vote(&pool, config.seed);
    let (h, w) = pool.grid();

    let mask_file = format!("{}.pgm", entry.id);
    write_mask(&result.winner, &config.out.join(&mask_file))?;

    let upsampled = match config.upsample {
        Some((uh, uw)) => {
            let file = format!("{}_upsampled.pgm", entry.id);
            write_mask(&resize_mask_nearest(&result.winner, uh, uw)?, &config.out.join(&file))?;
            Some(Upsampled { file, height: uh, width: uw })
        }
        None => None,
    };

    let reference_iou = match config.gt_dir.as_deref().and_then(|d| find_mask(d, &entry.id)) {
        Some(path) => {
            let gt = read_mask(&path)?;
            let pred = resize_mask_nearest(&result.winner, gt.height(), gt.width())?;
            Some(iou(&pred, &gt)?)
        }
        None => None,
    };

    let sidecar = PseudoSidecar {
        image: &entry.id,
        root_seed: config.seed,
        sources,
        ks: &config.ks,
        grid: [h, w],
        pool_size: result.pool_size,
        filtered_count: result.filtered_count,
        winner: result.winner_provenance,
        winner_index: result.winner_index,
        mean_iou: result.mean_iou,
        tie_broken: result.tie_broken,
        mask: mask_file,
        upsampled,
        reference_iou,
    };
    write_json(&config.out.join(format!("{}.json", entry.id)), &sidecar)
}

/// `<dir>/<stem>.pgm`, else `<dir>/<stem>.png`.
pub(crate) fn find_mask(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["pgm", "png"].iter().map(|ext| dir.join(format!("{stem}.{ext}"))).find(|p| p.is_file())
}
