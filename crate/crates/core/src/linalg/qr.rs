//! Thin QR by modified Gram-Schmidt.
//!
//! The R factor always carries a strictly positive diagonal because columns
//! are normalized by their (positive) residual norms; that sign convention
//! is what makes the downstream projection map single-valued.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative residual-norm floor below which a column is declared dependent.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ThinQr {
    /// `n x K`, orthonormal columns.
    pub q: DMatrix<f64>,
    /// `K x K`, upper-triangular with strictly positive diagonal.
    pub r: DMatrix<f64>,
}

/// Thin QR of an `n x K` matrix (`K <= n`) with a single projection pass.
pub fn mgs_thin_qr(mat: &DMatrix<f64>) -> Result<ThinQr> {
    mgs_thin_qr_with(mat, false)
}

/// Thin QR with an optional second orthogonalization pass for
/// ill-conditioned input. Cost stays `O(n K^2)`.
pub fn mgs_thin_qr_with(mat: &DMatrix<f64>, reorthogonalize: bool) -> Result<ThinQr> {
    let n = mat.nrows();
    let k = mat.ncols();
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "thin QR needs K <= n, got {n} x {k}"
        )));
    }
    let threshold = RANK_TOLERANCE
        * (0..k)
            .map(|j| mat.column(j).norm())
            .fold(0.0f64, f64::max);

    let mut q = mat.clone();
    let mut r = DMatrix::zeros(k, k);
    for j in 0..k {
        let passes = if reorthogonalize { 2 } else { 1 };
        for _ in 0..passes {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                r[(i, j)] += proj;
                let qi = q.column(i).clone_owned();
                let mut qj = q.column_mut(j);
                qj.axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm <= threshold {
            return Err(Error::RankDeficient { col: j });
        }
        r[(j, j)] = norm;
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(ThinQr { q, r })
}
