//! Seeded k-means: k-means++ initialisation followed by Lloyd iterations.
//!
//! One restart per call; callers wanting best-of-n run several seeds. The
//! loop stops at an exact assignment fixpoint or after [`MAX_ITERATIONS`].
//! Assignment ties go to the lowest centre index. A cluster left empty takes
//! the point farthest from its current centre among clusters that can spare
//! one, so the result never has empty clusters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sq_dist;
use crate::seed::rng_from_seed;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub dim: usize,
    /// Cluster label per point, each in `0..k`.
    pub assignments: Vec<usize>,
    /// `k × dim` row-major centres (means of the assigned points).
    pub centers: Vec<f64>,
    /// Σ ‖x_i − c(label_i)‖².
    pub inertia: f64,
    /// Inertia of the seeded centres before any Lloyd step.
    pub initial_inertia: f64,
    pub iterations: usize,
}

impl Clustering {
    pub fn center(&self, j: usize) -> &[f64] {
        &self.centers[j * self.dim..(j + 1) * self.dim]
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Clusters the rows of the row-major `n × dim` matrix `points` into `k` groups.
pub fn kmeans(points: &[f64], dim: usize, k: usize, seed: u64) -> Result<Clustering> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::Shape(format!("{} values do not form rows of dimension {dim}", points.len())));
    }
    let n = points.len() / dim;
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k must lie in 1..={n}, got {k}")));
    }
    if let Some(index) = points.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let row = |i: usize| &points[i * dim..(i + 1) * dim];

    let mut centers = seed_plus_plus(points, dim, k, seed);
    let mut labels = assign(points, dim, &centers);
    let initial_inertia = inertia(points, dim, &centers, &labels);
    repair_empty(points, dim, &mut centers, &mut labels, k);
    centers = means(points, dim, &labels, k);

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut next = assign(points, dim, &centers);
        repair_empty(points, dim, &mut centers, &mut next, k);
        if next == labels {
            break;
        }
        labels = next;
        centers = means(points, dim, &labels, k);
    }
    centers = means(points, dim, &labels, k);

    let inertia = (0..n).map(|i| sq_dist(row(i), &centers[labels[i] * dim..(labels[i] + 1) * dim])).sum();
    Ok(Clustering { k, dim, assignments: labels, centers, inertia, initial_inertia, iterations })
}

fn seed_plus_plus(points: &[f64], dim: usize, k: usize, seed: u64) -> Vec<f64> {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut rng = rng_from_seed(seed);
    let mut centers = Vec::with_capacity(k * dim);
    centers.extend_from_slice(row(rng.random_range(0..n)));

    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(row(i), &centers[..dim])).collect();
    for _ in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` at or above the final sum.
            chosen.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).unwrap_or(n - 1))
        } else {
            rng.random_range(0..n)
        };
        let start = centers.len();
        centers.extend_from_slice(row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), &centers[start..start + dim]));
        }
    }
    centers
}

fn assign(points: &[f64], dim: usize, centers: &[f64]) -> Vec<usize> {
    points
        .chunks_exact(dim)
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.chunks_exact(dim).enumerate() {
                let d = sq_dist(p, c);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

fn means(points: &[f64], dim: usize, labels: &[usize], k: usize) -> Vec<f64> {
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.chunks_exact(dim).zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (j, &c) in counts.iter().enumerate() {
        for s in &mut sums[j * dim..(j + 1) * dim] {
            *s /= c as f64;
        }
    }
    sums
}

fn inertia(points: &[f64], dim: usize, centers: &[f64], labels: &[usize]) -> f64 {
    points.chunks_exact(dim).zip(labels).map(|(p, &l)| sq_dist(p, &centers[l * dim..(l + 1) * dim])).sum()
}

fn repair_empty(points: &[f64], dim: usize, centers: &mut [f64], labels: &mut [usize], k: usize) {
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut victim = None;
        let mut worst = -1.0;
        for (i, p) in points.chunks_exact(dim).enumerate() {
            let l = labels[i];
            if counts[l] < 2 {
                continue;
            }
            let d = sq_dist(p, &centers[l * dim..(l + 1) * dim]);
            if d > worst {
                worst = d;
                victim = Some(i);
            }
        }
        // k ≤ n guarantees some cluster holds two or more points.
        let i = victim.expect("a cluster with at least two points exists");
        counts[labels[i]] -= 1;
        counts[empty] = 1;
        labels[i] = empty;
        centers[empty * dim..(empty + 1) * dim].copy_from_slice(&points[i * dim..(i + 1) * dim]);
    }
}
