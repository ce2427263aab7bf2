#![cfg_attr(not(test), no_std)]
//! Label-free salient mask proposals from dense feature maps.
//!
//! The crate is `no_std` + `alloc`. It covers the numerical side of the
//! pipeline:
//!
//! - [`graph`] – clamped-cosine affinity graph, degrees and the un-normalised
//!   Laplacian `L = D - W`.
//! - [`eigen`] – the `k` smallest pairs of `L u = λ D u`, via the symmetric
//!   reduction `D^{-1/2} L D^{-1/2}` and a dense tridiagonal QL solver.
//! - [`kmeans`] – seeded k-means++ / Lloyd clustering.
//! - [`spectral`] – the composition of the above into per-`k` mask sets and
//!   candidate pools across feature sources.
//! - [`voting`] – the framing filter and winner-takes-all IoU voting that
//!   selects one pseudo-mask from a pool.
//! - [`metrics`] – IoU, pixel accuracy, Fβ, max-Fβ and upper-bound IoU.
//! - [`losses`] – Dice mask loss, prediction ranking, hinge ranking loss and
//!   the combined objective, all with analytic gradients; [`gradcheck`]
//!   verifies them against central finite differences.
//!
//! [`synthetic`] builds feature maps with planted structure for tests.
//!
//! File formats, the CLI and parallel batch processing live in the
//! `spectral-vote` companion crate.
//!
//! # Features
//!
//! - `serde` – derives `Serialize`/`Deserialize` on the report and provenance
//!   types.

extern crate alloc;

mod error;
mod math;

pub mod eigen;
pub mod feature;
pub mod gradcheck;
pub mod graph;
pub mod kmeans;
pub mod losses;
pub mod mask;
pub mod metrics;
pub mod seed;
pub mod spectral;
pub mod synthetic;
pub mod voting;

pub use error::{Error, Result};
pub use feature::FeatureMap;
pub use mask::{resize_gray_nearest, resize_mask_nearest, BinaryMask, BoundingBox, GrayMask, SoftMask};
