//! Iterative and randomized numerical kernels over abstract linear
//! operators.

mod lsmr;
mod qr;
mod rsvd;

pub use lsmr::{lsmr, LsmrOptions, LsmrResult, StopReason};
pub use qr::{mgs_thin_qr, mgs_thin_qr_with, ThinQr};
pub use rsvd::{randomized_svd, RandomizedSvd};

use nalgebra::DMatrix;

/// A matrix known only through forward and adjoint products.
///
/// Implementations must be consistent: `<apply(u), v> == <u, apply_transpose(v)>`
/// up to roundoff for all probes, and both calls must be safe to issue
/// concurrently on a shared reference.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out = A x`; `x.len() == ncols`, `out.len() == nrows`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// `out = A' y`; `y.len() == nrows`, `out.len() == ncols`.
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
}

/// Dense operator over an owned matrix; used by tests and small problems.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    mat: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(mat: DMatrix<f64>) -> Self {
        Self { mat }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

impl LinearOperator for DenseOperator {
    fn nrows(&self) -> usize {
        self.mat.nrows()
    }

    fn ncols(&self) -> usize {
        self.mat.ncols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.mat[(i, j)] * xj;
            }
            *o = acc;
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, yi) in y.iter().enumerate() {
                acc += self.mat[(i, j)] * yi;
            }
            *o = acc;
        }
    }
}
