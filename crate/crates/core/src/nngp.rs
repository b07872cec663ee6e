//! Sparse nearest-neighbor GP factorization.
//!
//! For a correlation kernel and an ordered site set, the GP precision is
//! approximated as `(I - A)' D^{-1} (I - A)` where row `i` of the strictly
//! lower-triangular `A` holds the kriging weights of site `i` on its (at
//! most `m`) nearest predecessors, and `D` holds the conditional variances.
//! The whitening map `L^{-1} = D^{-1/2}(I - A)` is what every consumer
//! actually applies; the factor also carries the site ordering so callers
//! can feed vectors in original site indexing.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spatial::{Kernel, LocationSet, NeighborSets, SiteOrdering};

/// Jitter added to a neighbor correlation matrix on the single retry allowed
/// before construction fails.
const LOCAL_SOLVE_JITTER: f64 = 1e-10;

/// One factor's sparse `(A, D)` pair together with its ordering.
#[derive(Debug, Clone)]
pub struct NngpFactor {
    /// Row `i`: `(ordered neighbor position, coefficient)` pairs, matching
    /// the neighbor sets exactly.
    rows: Vec<Vec<(usize, f64)>>,
    /// Conditional variances, strictly positive.
    diag: Vec<f64>,
    /// Ordered position -> original site index.
    perm: Vec<usize>,
}

/// Builds the sparse factor for one kernel.
///
/// Each row solves the local `m x m` correlation system by Cholesky; a
/// single diagonal jitter retry is attempted before reporting the offending
/// row. Rows are independent, so construction is distributed over a thread
/// pool with results identical to sequential order.
pub fn build_nngp_factor(
    locs: &LocationSet,
    ord: &SiteOrdering,
    nbrs: &NeighborSets,
    kernel: &Kernel,
) -> Result<NngpFactor> {
    let n = locs.len();
    if ord.len() != n || nbrs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: ord.len().min(nbrs.len()),
        });
    }

    let results: Vec<Result<(Vec<(usize, f64)>, f64)>> = (0..n)
        .into_par_iter()
        .map(|pos| build_row(locs, ord, nbrs, kernel, pos))
        .collect();

    let mut rows = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for r in results {
        let (row, d) = r?;
        rows.push(row);
        diag.push(d);
    }
    Ok(NngpFactor {
        rows,
        diag,
        perm: ord.perm().to_vec(),
    })
}

fn build_row(
    locs: &LocationSet,
    ord: &SiteOrdering,
    nbrs: &NeighborSets,
    kernel: &Kernel,
    pos: usize,
) -> Result<(Vec<(usize, f64)>, f64)> {
    let here = locs.site(ord.site_at(pos));
    let set = nbrs.set(pos);
    let k = set.len();
    if k == 0 {
        // Marginal variance of a correlation kernel at zero distance.
        return Ok((Vec::new(), kernel.correlation(here, here)));
    }
    let sites: Vec<&[f64]> = set.iter().map(|&p| locs.site(ord.site_at(p))).collect();
    let cnn = DMatrix::from_fn(k, k, |a, b| kernel.correlation(sites[a], sites[b]));
    let c = DVector::from_fn(k, |a, _| kernel.correlation(sites[a], here));

    let solve = |m: &DMatrix<f64>| -> Option<(DVector<f64>, f64)> {
        let chol = Cholesky::new(m.clone())?;
        let a = chol.solve(&c);
        let d = kernel.correlation(here, here) - a.dot(&c);
        Some((a, d))
    };

    let mut attempt = solve(&cnn);
    if !matches!(&attempt, Some((_, d)) if *d > 0.0) {
        let mut jittered = cnn;
        for i in 0..k {
            jittered[(i, i)] += LOCAL_SOLVE_JITTER;
        }
        attempt = solve(&jittered);
    }
    match attempt {
        Some((a, d)) if d > 0.0 => Ok((set.iter().copied().zip(a.iter().copied()).collect(), d)),
        Some((_, d)) => Err(Error::DegenerateNngpRow { row: pos, value: d }),
        None => Err(Error::DegenerateNngpRow {
            row: pos,
            value: f64::NAN,
        }),
    }
}

impl NngpFactor {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Conditional variances (the diagonal of `D`).
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Sparse rows of `A` in ordered indexing.
    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Ordered position -> original site index.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Total nonzeros of `A`.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Applies `D^{-1/2}(I - A) P` where `P` permutes original site order
    /// into the factor's ordering. Input is in original indexing; output
    /// lives in whitened (ordered-row) space. Runs in `O(n m)`.
    pub fn whiten(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; n];
        self.whiten_into(v, &mut out);
        Ok(out)
    }

    /// Adjoint of [`Self::whiten`]: applies `P' (I - A)' D^{-1/2}`, mapping a
    /// whitened-space vector back to original site indexing.
    pub fn whiten_adjoint(&self, w: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: w.len(),
            });
        }
        let mut out = vec![0.0; n];
        self.whiten_adjoint_into(w, &mut out);
        Ok(out)
    }

    /// Allocation-free version of [`Self::whiten`].
    pub fn whiten_into(&self, v: &[f64], out: &mut [f64]) {
        for pos in 0..self.len() {
            let mut acc = v[self.perm[pos]];
            for &(nb, a) in &self.rows[pos] {
                acc -= a * v[self.perm[nb]];
            }
            out[pos] = acc / self.diag[pos].sqrt();
        }
    }

    /// Allocation-free version of [`Self::whiten_adjoint`]; `out` must be
    /// zeroed by the caller (accumulates).
    pub fn whiten_adjoint_into(&self, w: &[f64], out: &mut [f64]) {
        for pos in 0..self.len() {
            let u = w[pos] / self.diag[pos].sqrt();
            out[self.perm[pos]] += u;
            for &(nb, a) in &self.rows[pos] {
                out[self.perm[nb]] -= a * u;
            }
        }
    }

    /// Dense implied precision `P'(I - A)' D^{-1} (I - A) P` in original site
    /// indexing. Intended for small-`n` inspection and verification.
    pub fn dense_precision(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut prec = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut w = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.whiten_into(&e, &mut w);
            let mut col = vec![0.0; n];
            self.whiten_adjoint_into(&w, &mut col);
            for i in 0..n {
                prec[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        prec
    }

    /// `(ordered row, ordered col, value)` triplets of `A`, for diagnostics.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, a)| (i, j, a)))
    }
}
