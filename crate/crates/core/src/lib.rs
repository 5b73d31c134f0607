//! Gaussian-process regression with neural-network Gaussian process (NNGP)
//! and Matérn kernels.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense matrices, Cholesky factorization and solves.
//! - [`kernels`]: Matérn and NNGP kernels, validity checks.
//! - [`embed`]: min-max scaling and the unit-hypersphere embedding.
//! - [`gp`]: kriging weights, posterior moments and linear trends.
//! - [`design`]: 1-D grids, van der Corput, Latin hypercube, seeded noise.
//! - [`bench`]: Friedman and borehole surfaces, CSV ingestion.
//! - [`stats`]: RMSE and kriging-weight comparison statistics.
//! - [`study`]: the validity scan, 1-D comparison and benchmark drivers.

pub mod bench;
pub mod design;
pub mod embed;
pub mod error;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod stats;
pub mod study;

pub use error::{Error, Result};
pub use gp::{GpConfig, KrigingWeights, PosteriorSummary, Trend};
pub use kernels::{KernelMatrix, KernelSpec, Smoothness};
pub use linalg::DenseMatrix;
