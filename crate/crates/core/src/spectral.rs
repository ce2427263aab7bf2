//! Normalised spectral clustering of a feature map into a partition of masks,
//! and candidate pools gathered across feature sources and cluster counts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::eigen::smallest_generalized_eigenpairs;
use crate::graph::build_graph;
use crate::kmeans::kmeans;
use crate::seed::derive_seed;
use crate::{BinaryMask, Error, FeatureMap, Result};

/// One clustering run: `k` disjoint non-empty masks covering the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    pub source: String,
    pub k: usize,
    /// Seed handed to k-means for this run.
    pub seed: u64,
    pub masks: Vec<BinaryMask>,
    /// The `k` smallest generalised eigenvalues of the run.
    pub eigenvalues: Vec<f64>,
}

impl MaskSet {
    pub fn grid(&self) -> (usize, usize) {
        self.masks[0].dims()
    }
}

/// Where a candidate mask came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub source: String,
    pub k: usize,
    pub cluster: usize,
}

/// Candidate masks on a shared grid, each tagged with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    grid: (usize, usize),
    masks: Vec<BinaryMask>,
    provenance: Vec<Provenance>,
}

impl CandidatePool {
    pub fn new(masks: Vec<BinaryMask>, provenance: Vec<Provenance>) -> Result<Self> {
        let first =
            masks.first().ok_or_else(|| Error::Parameter("candidate pool must not be empty".to_string()))?;
        let grid = first.dims();
        if provenance.len() != masks.len() {
            return Err(Error::Shape(format!(
                "{} masks but {} provenance records",
                masks.len(),
                provenance.len()
            )));
        }
        for (i, m) in masks.iter().enumerate() {
            if m.dims() != grid {
                return Err(Error::Shape(format!("candidate {i} is {:?}, pool grid is {grid:?}", m.dims())));
            }
            if m.is_empty() {
                return Err(Error::Parameter(format!("candidate {i} has no foreground")));
            }
        }
        Ok(Self { grid, masks, provenance })
    }

    /// Pool of untagged masks; provenance is `("", 0, index)`.
    pub fn from_masks(masks: Vec<BinaryMask>) -> Result<Self> {
        let provenance =
            (0..masks.len()).map(|cluster| Provenance { source: String::new(), k: 0, cluster }).collect();
        Self::new(masks, provenance)
    }

    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[BinaryMask] {
        &self.masks
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Keeps the candidates for which `keep` is true, in order.
    pub(crate) fn retain_indices(&self, keep: &[bool]) -> Self {
        let mut masks = Vec::new();
        let mut provenance = Vec::new();
        for ((m, p), _) in self.masks.iter().zip(&self.provenance).zip(keep).filter(|(_, &k)| k) {
            masks.push(m.clone());
            provenance.push(p.clone());
        }
        Self { grid: self.grid, masks, provenance }
    }
}

/// Clusters `features` into `k` masks: affinity graph, `k` smallest
/// generalised eigenvectors, k-means on the rows of the eigenvector matrix.
/// Mask `j` holds the cells labelled `j`; label order carries no meaning.
pub fn spectral_cluster(features: &FeatureMap, k: usize, seed: u64) -> Result<MaskSet> {
    spectral_cluster_named("", features, k, seed)
}

/// [`spectral_cluster`] with the source name recorded on the result.
pub fn spectral_cluster_named(source: &str, features: &FeatureMap, k: usize, seed: u64) -> Result<MaskSet> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".to_string()));
    }
    let graph = build_graph(features)?;
    let basis = smallest_generalized_eigenpairs(&graph, k)?;
    let clustering = kmeans(basis.vectors(), k, k, seed)?;

    let (h, w) = (features.height(), features.width());
    let masks = (0..k)
        .map(|j| {
            let bits = clustering.assignments.iter().map(|&l| l == j).collect();
            BinaryMask::new(h, w, bits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MaskSet { source: source.to_string(), k, seed, masks, eigenvalues: basis.eigenvalues().to_vec() })
}

/// Seed of the k-means run for `(source, k)` under `root_seed`.
pub fn run_seed(root_seed: u64, source: &str, k: usize) -> u64 {
    derive_seed(root_seed, source, k as u64)
}

/// Checks that a set of named feature maps and cluster counts can be pooled.
pub fn validate_sources(feature_sets: &[(&str, &FeatureMap)], ks: &[usize]) -> Result<(usize, usize)> {
    let (_, first) = feature_sets
        .first()
        .ok_or_else(|| Error::Parameter("at least one feature source is required".to_string()))?;
    if ks.is_empty() {
        return Err(Error::Parameter("ks must not be empty".to_string()));
    }
    if let Some(k) = ks.iter().find(|&&k| k == 0) {
        return Err(Error::Parameter(format!("cluster count {k} is not positive")));
    }
    let grid = (first.height(), first.width());
    for (name, fm) in feature_sets {
        if (fm.height(), fm.width()) != grid {
            return Err(Error::Shape(format!(
                "source '{name}' grid {}x{} differs from {}x{}; resample to a common grid first",
                fm.height(),
                fm.width(),
                grid.0,
                grid.1
            )));
        }
    }
    Ok(grid)
}

/// Runs spectral clustering for every `(source, k)` pair and collects all
/// masks, ordered by source, then `k` (as given), then cluster index.
pub fn generate_candidates(
    feature_sets: &[(&str, &FeatureMap)],
    ks: &[usize],
    root_seed: u64,
) -> Result<CandidatePool> {
    validate_sources(feature_sets, ks)?;
    let mut runs = Vec::with_capacity(feature_sets.len() * ks.len());
    for (name, fm) in feature_sets {
        for &k in ks {
            runs.push(spectral_cluster_named(name, fm, k, run_seed(root_seed, name, k))?);
        }
    }
    pool_from_runs(runs)
}

/// Flattens mask sets into a pool, preserving their order.
pub fn pool_from_runs(runs: Vec<MaskSet>) -> Result<CandidatePool> {
    let mut masks = Vec::new();
    let mut provenance = Vec::new();
    for run in runs {
        for (cluster, m) in run.masks.into_iter().enumerate() {
            masks.push(m);
            provenance.push(Provenance { source: run.source.clone(), k: run.k, cluster });
        }
    }
    CandidatePool::new(masks, provenance)
}
