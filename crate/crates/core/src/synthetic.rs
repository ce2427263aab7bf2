//! Synthetic feature maps with planted structure, for tests and demos.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::math::{dot, sqrt};
use crate::seed::rng_from_seed;
use crate::{BinaryMask, FeatureMap};

/// Side of the planted-blob grid.
pub const SCENE_SIZE: usize = 16;
/// Side of the planted square blob.
pub const BLOB_SIZE: usize = 6;
/// Feature channels per source in the planted-blob scene.
pub const SCENE_CHANNELS: usize = 8;
/// Channels reserved for the blob; the background lives in the others.
const BLOB_CHANNELS: usize = 2;

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = sqrt(dot(&v, &v));
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// `h × w` map whose left `w/2` columns carry one random vector and whose
/// right columns carry a second vector orthogonalised against the first.
/// Returns the map and the left-block mask.
pub fn two_block_features(h: usize, w: usize, channels: usize, seed: u64) -> (FeatureMap, BinaryMask) {
    assert!(channels >= 2 && w >= 2);
    let mut rng = rng_from_seed(seed);
    let a = random_unit(&mut rng, channels);
    let b = loop {
        let v = random_unit(&mut rng, channels);
        let p = dot(&v, &a);
        let r: Vec<f64> = v.iter().zip(&a).map(|(x, y)| x - p * y).collect();
        let n = sqrt(dot(&r, &r));
        if n > 1e-3 {
            break r.iter().map(|x| x / n).collect::<Vec<_>>();
        }
    };
    let split = w / 2;
    let fm = FeatureMap::from_fn(h, w, channels, |_, c| if c < split { a.clone() } else { b.clone() })
        .expect("dimensions are consistent");
    let left = BinaryMask::from_fn(h, w, |_, c| c < split).expect("dimensions are positive");
    (fm, left)
}

/// Three feature sources over a shared 16×16 grid with a planted 6×6 blob.
#[derive(Debug, Clone)]
pub struct PlantedScene {
    pub sources: Vec<(String, FeatureMap)>,
    pub blob: BinaryMask,
}

impl PlantedScene {
    pub fn named(&self) -> Vec<(&str, &FeatureMap)> {
        self.sources.iter().map(|(n, f)| (n.as_str(), f)).collect()
    }
}

/// Band layout of the background clutter, one per source. Every band spans
/// the full grid in one direction.
#[derive(Debug, Clone, Copy)]
enum Bands {
    Rows(usize),
    Cols(usize),
}

impl Bands {
    fn band(self, r: usize, c: usize) -> usize {
        match self {
            Bands::Rows(n) => r * n / SCENE_SIZE,
            Bands::Cols(n) => c * n / SCENE_SIZE,
        }
    }
}

/// Builds the planted-blob scene for `seed`.
///
/// In every source the blob carries a random vector supported on the first
/// two channels, so it is orthogonal to all background cells. The background
/// is split into full-span bands (rows, columns, rows) whose vectors share a
/// positive base on the remaining channels plus a band-specific bump, so the
/// background is one connected but internally structured component. With
/// `k = 2` each source therefore yields exactly the blob and its
/// frame-spanning complement.
pub fn planted_blob_scene(seed: u64) -> PlantedScene {
    let mut rng = rng_from_seed(seed);
    let lo = (SCENE_SIZE - BLOB_SIZE) / 2;
    let blob = BinaryMask::from_fn(SCENE_SIZE, SCENE_SIZE, |r, c| {
        (lo..lo + BLOB_SIZE).contains(&r) && (lo..lo + BLOB_SIZE).contains(&c)
    })
    .expect("dimensions are positive");

    let layouts = [Bands::Rows(4), Bands::Cols(4), Bands::Rows(3)];
    let names = ["source_a", "source_b", "source_c"];
    let mut sources = Vec::with_capacity(layouts.len());
    for (name, layout) in names.iter().zip(layouts) {
        let mut blob_vec = vec![0.0; SCENE_CHANNELS];
        for v in &mut blob_vec[..BLOB_CHANNELS] {
            *v = rng.random_range(0.2..1.0);
        }
        let base: Vec<f64> = (BLOB_CHANNELS..SCENE_CHANNELS).map(|_| rng.random_range(0.5..1.0)).collect();
        let bump = rng.random_range(0.6..1.0);
        let fm = FeatureMap::from_fn(SCENE_SIZE, SCENE_SIZE, SCENE_CHANNELS, |r, c| {
            if blob.get(r, c) {
                return blob_vec.clone();
            }
            let mut v = vec![0.0; SCENE_CHANNELS];
            v[BLOB_CHANNELS..].copy_from_slice(&base);
            let band = layout.band(r, c);
            v[BLOB_CHANNELS + band % (SCENE_CHANNELS - BLOB_CHANNELS)] += bump;
            v
        })
        .expect("dimensions are consistent");
        sources.push((String::from(*name), fm));
    }
    PlantedScene { sources, blob }
}
