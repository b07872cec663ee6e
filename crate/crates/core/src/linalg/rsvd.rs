//! Randomized truncated SVD.
//!
//! Range finding with a Gaussian test matrix and subspace (power) iteration,
//! as in Halko, Martinsson & Tropp, "Finding structure with randomness"
//! (SIAM Review 2011). Deterministic given the seed.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RandomizedSvd {
    /// `n x K`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Nonincreasing, nonnegative.
    pub singular_values: DVector<f64>,
    /// `q x K`, orthonormal columns.
    pub v: DMatrix<f64>,
}

/// Rank-`rank` randomized SVD of an `n x q` matrix.
pub fn randomized_svd(
    mat: &DMatrix<f64>,
    rank: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<RandomizedSvd> {
    let n = mat.nrows();
    let q = mat.ncols();
    let limit = n.min(q);
    if rank == 0 || rank > limit {
        return Err(Error::DimensionMismatch(format!(
            "target rank {rank} outside 1..={limit} for a {n} x {q} matrix"
        )));
    }
    let samples = (rank + oversample).min(limit);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(q, samples, |_, _| rng.sample::<f64, _>(StandardNormal));

    let mut basis = orthonormal_range(&(mat * omega));
    for _ in 0..power_iters {
        basis = orthonormal_range(&(mat.transpose() * basis));
        basis = orthonormal_range(&(mat * basis));
    }

    if basis.ncols() == 0 {
        // Zero (or numerically zero) input: spectrum is all zeros.
        return Ok(RandomizedSvd {
            u: canonical_columns(n, rank),
            singular_values: DVector::zeros(rank),
            v: canonical_columns(q, rank),
        });
    }

    let small = basis.transpose() * mat;
    let svd = small.svd(true, true);
    let u_small = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let found = svd.singular_values.len().min(rank);

    let u_full = &basis * &u_small;
    let mut u = DMatrix::zeros(n, rank);
    let mut v = DMatrix::zeros(q, rank);
    let mut s = DVector::zeros(rank);
    for j in 0..found {
        u.set_column(j, &u_full.column(j));
        v.set_column(j, &v_t.row(j).transpose());
        s[j] = svd.singular_values[j];
    }
    if found < rank {
        complete_orthonormal(&mut u, found);
        complete_orthonormal(&mut v, found);
    }
    Ok(RandomizedSvd {
        u,
        singular_values: s,
        v,
    })
}

/// Orthonormal basis of the column range, dropping numerically dependent
/// columns instead of failing.
fn orthonormal_range(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mat.nrows();
    let k = mat.ncols();
    let scale = (0..k).map(|j| mat.column(j).norm()).fold(0.0f64, f64::max);
    let threshold = if scale > 0.0 { 1e-12 * scale } else { 0.0 };
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = mat.column(j).clone_owned();
        for b in &cols {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        // Second pass for stability of the retained basis.
        for b in &cols {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        let norm = v.norm();
        if norm > threshold && norm > 0.0 {
            cols.push(v / norm);
        }
    }
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// First `k` canonical basis vectors as columns.
fn canonical_columns(dim: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, k, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// Extends columns `0..filled` (assumed orthonormal) to a full orthonormal
/// set using canonical vectors.
fn complete_orthonormal(mat: &mut DMatrix<f64>, filled: usize) {
    let dim = mat.nrows();
    let want = mat.ncols();
    let mut have = filled;
    for e in 0..dim {
        if have == want {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[e] = 1.0;
        for j in 0..have {
            let proj = mat.column(j).dot(&v);
            let col = mat.column(j).clone_owned();
            v.axpy(-proj, &col, 1.0);
        }
        let norm = v.norm();
        if norm > 0.5 {
            mat.set_column(have, &(v / norm));
            have += 1;
        }
    }
}
