use std::path::Path;

use serde::Serialize;
use spectral_vote_core::spectral::{run_seed, spectral_cluster_named};

use super::{run_batch, BatchSummary};
use crate::atomic::write_json;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::manifest::{ImageEntry, Manifest};
use crate::masks::write_mask;
use crate::npy::read_feature_map;

#[derive(Debug, Serialize)]
struct MaskRecord {
    cluster: usize,
    file: String,
    area: usize,
}

#[derive(Debug, Serialize)]
struct ClusterSidecar<'a> {
    image: &'a str,
    source: &'a str,
    k: usize,
    seed: u64,
    root_seed: u64,
    grid: [usize; 2],
    eigenvalues: &'a [f64],
    masks: Vec<MaskRecord>,
}

/// Writes `<out>/<id>/<source>_k<k>_c<j>.pgm` for every cluster plus a
/// `<source>_k<k>.json` sidecar per run.
pub fn run(config: &RunConfig) -> Result<BatchSummary> {
    config.validate()?;
    let manifest = Manifest::load(&config.manifest)?;
    let sources = manifest.resolve_sources(config.sources.as_deref())?;
    run_batch("cluster", &manifest.images, &config.out, config.workers, config.keep_going, |entry| {
        cluster_image(entry, &sources, config)
    })
}

fn cluster_image(entry: &ImageEntry, sources: &[String], config: &RunConfig) -> Result<()> {
    let dir = config.out.join(&entry.id);
    for source in sources {
        let path = entry.feature_path(source)?;
        let features = read_feature_map(path)?;
        for &k in &config.ks {
            let seed = run_seed(config.seed, source, k);
            let set = spectral_cluster_named(source, &features, k, seed)
                .map_err(|e| CliError::from(e).with_path(path))?;
            let (h, w) = set.grid();
            let mut records = Vec::with_capacity(set.masks.len());
            for (j, mask) in set.masks.iter().enumerate() {
                let file = format!("{source}_k{k}_c{j}.pgm");
                write_mask(mask, &dir.join(&file))?;
                records.push(MaskRecord { cluster: j, file, area: mask.count() });
            }
            let sidecar = ClusterSidecar {
                image: &entry.id,
                source,
                k,
                seed,
                root_seed: config.seed,
                grid: [h, w],
                eigenvalues: &set.eigenvalues,
                masks: records,
            };
            write_json(&sidecar_path(&dir, source, k), &sidecar)?;
        }
    }
    Ok(())
}

fn sidecar_path(dir: &Path, source: &str, k: usize) -> std::path::PathBuf {
    dir.join(format!("{source}_k{k}.json"))
}
