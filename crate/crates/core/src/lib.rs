//! Bayesian spatial factor models with nearest-neighbor Gaussian process
//! priors, sampled by a projected blocked Gibbs algorithm (ProjMC2) or its
//! unprojected baselines.
//!
//! The crate is organized around the sampling pipeline:
//!
//! * [`spatial`] — sites, maximin ordering, predecessor nearest neighbors,
//!   and correlation kernels.
//! * [`nngp`] — the sparse `(I - A, D)` factorization of each factor's GP
//!   prior and its whitening operators.
//! * [`linalg`] — LSMR over abstract linear operators, modified Gram-Schmidt
//!   thin QR, and randomized SVD.
//! * [`model`] — the factor-model state, the scaled-Stiefel projection, the
//!   augmented least-squares systems, and all conjugate conditional updates.
//! * [`sampler`] — the MCMC drivers, initialization, and post-centering.
//! * [`store`] — retained-draw storage and its on-disk format.
//! * [`diagnostics`] — effective sample sizes, sign alignment, directional
//!   summaries, and factor-recovery metrics.
//! * [`simgen`] — synthetic data generation for the simulation studies.
//! * [`io`] — CSV/JSON ingestion and emission helpers.

pub mod diagnostics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod nngp;
pub mod sampler;
pub mod simgen;
pub mod spatial;
pub mod store;

pub use error::{Error, Result};
