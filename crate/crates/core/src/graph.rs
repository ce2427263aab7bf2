//! Similarity graph over feature-map cells.
//!
//! Edge weights are clamped cosine similarities `w_ij = max(0, cos(f_i, f_j))`.
//! Self-loops are kept (`w_ii = 1`), so every degree is at least one and the
//! degree matrix stays invertible even for a cell dissimilar to all others.
//! Storage is dense, which is fine for grids up to roughly 64×64.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{dot, sqrt};
use crate::{Error, FeatureMap, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    n: usize,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    laplacian: Vec<f64>,
}

/// Builds the clamped-cosine affinity graph of `features`.
pub fn build_graph(features: &FeatureMap) -> Result<AffinityGraph> {
    let n = features.cells();
    let d = features.channels();
    let mut unit = Vec::with_capacity(n * d);
    for i in 0..n {
        let f = features.cell(i);
        let norm = sqrt(dot(f, f));
        if norm == 0.0 {
            return Err(Error::DegenerateFeature { cell: i });
        }
        unit.extend(f.iter().map(|v| v / norm));
    }

    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        weights[i * n + i] = 1.0;
        let ui = &unit[i * d..(i + 1) * d];
        for j in (i + 1)..n {
            let w = dot(ui, &unit[j * d..(j + 1) * d]).clamp(0.0, 1.0);
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
    }
    Ok(AffinityGraph::assemble(n, weights))
}

impl AffinityGraph {
    /// Graph from an explicit row-major weight matrix. Weights must be finite,
    /// non-negative and symmetric, and every degree must be positive.
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n == 0 || weights.len() != n * n {
            return Err(Error::Shape(format!(
                "weight matrix for {n} vertices needs {} entries, got {}",
                n * n,
                weights.len()
            )));
        }
        for (idx, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index: idx });
            }
            if w < 0.0 {
                return Err(Error::OutOfRange { index: idx, what: "edge weight" });
            }
            let (i, j) = (idx / n, idx % n);
            if w != weights[j * n + i] {
                return Err(Error::Parameter(format!("weights not symmetric at ({i}, {j})")));
            }
        }
        let graph = Self::assemble(n, weights);
        if let Some(i) = graph.degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::Parameter(format!("vertex {i} has zero degree")));
        }
        Ok(graph)
    }

    fn assemble(n: usize, weights: Vec<f64>) -> Self {
        let degrees: Vec<f64> = weights.chunks_exact(n).map(|row| row.iter().sum()).collect();
        let mut laplacian: Vec<f64> = weights.iter().map(|w| -w).collect();
        for i in 0..n {
            laplacian[i * n + i] += degrees[i];
        }
        Self { n, weights, degrees, laplacian }
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn laplacian(&self) -> &[f64] {
        &self.laplacian
    }

    pub fn laplacian_at(&self, i: usize, j: usize) -> f64 {
        self.laplacian[i * self.n + j]
    }

    pub fn laplacian_frobenius(&self) -> f64 {
        sqrt(self.laplacian.iter().map(|v| v * v).sum())
    }

    /// `xᵀ L x`, equal to `½ Σ w_ij (x_i − x_j)²`.
    pub fn laplacian_quadratic(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Shape(format!("vector length {} != vertex count {}", x.len(), self.n)));
        }
        Ok(self.laplacian.chunks_exact(self.n).zip(x).map(|(row, xi)| xi * dot(row, x)).sum())
    }
}
