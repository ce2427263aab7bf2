//! Generalised symmetric eigenproblem `L u = λ D u` with diagonal `D > 0`.
//!
//! The problem is reduced to the standard symmetric one
//! `D^{-1/2} L D^{-1/2} v = λ v`, solved densely (Householder
//! tridiagonalisation followed by implicit QL), and mapped back through
//! `u = D^{-1/2} v`. Columns of the result are therefore D-orthonormal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::AffinityGraph;
use crate::math::{hypot, sqrt};
use crate::{Error, Result};

/// The `k` smallest generalised eigenpairs, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    n: usize,
    eigenvalues: Vec<f64>,
    /// `n × k`, row-major; column `j` pairs with `eigenvalues[j]`.
    vectors: Vec<f64>,
}

impl EigenBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major `n × k` matrix `U`; row `i` is the spectral embedding of vertex `i`.
    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.k();
        &self.vectors[i * k..(i + 1) * k]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.k() + j]).collect()
    }
}

/// Solves for the `k` smallest pairs of `L u = λ D u` on `graph`.
pub fn smallest_generalized_eigenpairs(graph: &AffinityGraph, k: usize) -> Result<EigenBasis> {
    let n = graph.n();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k must lie in 1..={n}, got {k}")));
    }
    let inv_sqrt: Vec<f64> = graph.degrees().iter().map(|&d| 1.0 / sqrt(d)).collect();
    let mut reduced = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = graph.laplacian_at(i, j) * inv_sqrt[i] * inv_sqrt[j];
            reduced[i * n + j] = v;
            reduced[j * n + i] = v;
        }
    }
    let full = SymmetricEigen::new(n, reduced);

    let mut vectors = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..k {
            vectors[i * k + j] = full.vectors[i * n + j] * inv_sqrt[i];
        }
    }
    Ok(EigenBasis { n, eigenvalues: full.values[..k].to_vec(), vectors })
}

/// Full eigendecomposition of a dense real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order; ties keep the solver's order.
    pub values: Vec<f64>,
    /// `n × n` row-major; column `j` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// Decomposes the row-major symmetric `n × n` matrix `a`. Only symmetric
    /// input gives meaningful results; the lower triangle is what gets read.
    pub fn new(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n, "matrix must be n×n");
        if n == 0 {
            return Self { values: Vec::new(), vectors: Vec::new() };
        }
        let mut z = a;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(n, &mut z, &mut d, &mut e);
        implicit_ql(n, &mut z, &mut d, &mut e);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let values = order.iter().map(|&i| d[i]).collect();
        let mut vectors = vec![0.0; n * n];
        for (dst, &src) in order.iter().enumerate() {
            for r in 0..n {
                vectors[r * n + dst] = z[r * n + src];
            }
        }
        Self { values, vectors }
    }
}

// Householder reduction to tridiagonal form. On return `d` holds the diagonal,
// `e[1..]` the sub-diagonal, and `z` the accumulated orthogonal transform.
fn tridiagonalize(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = z[at(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = z[at(i - 1, j)];
                z[at(i, j)] = 0.0;
                z[at(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                z[at(j, i)] = f;
                g = e[j] + z[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += z[at(k, j)] * d[k];
                    e[k] += z[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    z[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = z[at(i - 1, j)];
                z[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        z[at(n - 1, i)] = z[at(i, i)];
        z[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = z[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += z[at(k, i + 1)] * z[at(k, j)];
                }
                for k in 0..=i {
                    z[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            z[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = z[at(n - 1, j)];
        z[at(n - 1, j)] = 0.0;
    }
    z[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL iterations with Wilkinson-style shifts on the tridiagonal
// (d, e), rotating the columns of `z` along.
fn implicit_ql(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |r: usize, c: usize| r * n + c;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[at(k, i + 1)];
                        let zk = z[at(k, i)];
                        z[at(k, i + 1)] = s * zk + c * zk1;
                        z[at(k, i)] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}
