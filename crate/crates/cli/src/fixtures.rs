//! Synthetic planted-blob dataset on disk, for smoke runs and tests.
//!
//! Layout under the target directory:
//! `manifest.json`, `features/<source>/<id>.npy`, and `gt/<id>.pgm` with the
//! blob at [`GT_SCALE`] times the feature resolution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use spectral_vote_core::resize_mask_nearest;
use spectral_vote_core::synthetic::{planted_blob_scene, SCENE_SIZE};

use crate::atomic::write_json;
use crate::error::Result;
use crate::manifest::{ImageEntry, Manifest};
use crate::masks::write_mask;
use crate::npy::write_feature_map;

pub const GT_SCALE: usize = 2;

/// Writes `count` scenes, the scene for image `i` built from `seed + i`.
/// Returns the manifest path.
pub fn write_planted_dataset(dir: &Path, count: usize, seed: u64) -> Result<PathBuf> {
    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("{i:04}");
        let scene = planted_blob_scene(seed.wrapping_add(i as u64));
        let mut features = BTreeMap::new();
        for (source, fm) in &scene.sources {
            let rel = PathBuf::from("features").join(source).join(format!("{id}.npy"));
            write_feature_map(fm, &dir.join(&rel))?;
            features.insert(source.clone(), rel);
        }
        let gt = resize_mask_nearest(&scene.blob, SCENE_SIZE * GT_SCALE, SCENE_SIZE * GT_SCALE)?;
        write_mask(&gt, &dir.join("gt").join(format!("{id}.pgm")))?;
        images.push(ImageEntry { id, features });
    }
    let manifest_path = dir.join("manifest.json");
    write_json(&manifest_path, &Manifest { images })?;
    Ok(manifest_path)
}
