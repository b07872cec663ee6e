//! Chain diagnostics: effective sample sizes, label-switching sign
//! alignment, directional summaries, and factor-recovery metrics.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::project_factors;
use crate::spatial::{dist2, LocationSet};
use crate::store::ChainStore;

/// Cap applied to superefficient (antithetic) chains.
pub const ESS_CAP_FACTOR: f64 = 1.5;

/// Autocovariance-based effective sample size with Geyer's initial monotone
/// positive sequence truncation (Geyer 1992).
///
/// Conventions: a constant chain reports ESS equal to its length; chains
/// whose asymptotic-variance estimate collapses to zero or below (antithetic
/// chains) are capped at 1.5x the length.
pub fn effective_sample_size(chain: &[f64]) -> Result<f64> {
    let n = chain.len();
    if n < 10 {
        return Err(Error::InvalidInput(format!(
            "ESS needs a chain of length >= 10, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = chain.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = chain.iter().map(|v| v - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let var0 = autocov(0);
    if var0 == 0.0 {
        log::warn!("constant chain: ESS defined as the chain length by convention");
        return Ok(nf);
    }

    // Sum of paired autocovariances while the pairs stay positive, enforcing
    // monotone nonincreasing pair sums.
    let mut pair_sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = 0usize;
    while 2 * m < n {
        let g0 = autocov(2 * m);
        let g1 = if 2 * m + 1 < n { autocov(2 * m + 1) } else { 0.0 };
        let mut pair = g0 + g1;
        if pair <= 0.0 {
            break;
        }
        if pair > prev {
            pair = prev;
        }
        pair_sum += pair;
        prev = pair;
        m += 1;
    }
    let asymptotic_var = 2.0 * pair_sum - var0;
    let cap = ESS_CAP_FACTOR * nf;
    if asymptotic_var <= 0.0 {
        return Ok(cap);
    }
    Ok((nf * var0 / asymptotic_var).min(cap))
}

/// Aggregate ESS figures for one parameter block.
#[derive(Debug, Clone)]
pub struct EssSummary {
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub frac_below_100: f64,
    pub count: usize,
}

/// Per-block ESS summaries in the order the blocks were requested.
#[derive(Debug, Clone)]
pub struct EssReport {
    pub blocks: Vec<(String, EssSummary)>,
}

impl EssReport {
    pub fn block(&self, name: &str) -> Option<&EssSummary> {
        self.blocks.iter().find(|(b, _)| b == name).map(|(_, s)| s)
    }
}

/// ESS for every scalar parameter in each named block, aggregated per block.
/// Parameters fan out across a thread pool; the aggregation order is fixed.
pub fn ess_report(chains: &ChainStore, blocks: &[&str]) -> Result<EssReport> {
    let mut out = Vec::with_capacity(blocks.len());
    for &block in blocks {
        let scalar = chains.scalar_chains(block)?;
        let ess: Vec<f64> = scalar
            .par_iter()
            .map(|c| effective_sample_size(c))
            .collect::<Result<Vec<_>>>()?;
        out.push((block.to_string(), summarize(&ess)));
    }
    Ok(EssReport { blocks: out })
}

fn summarize(ess: &[f64]) -> EssSummary {
    let count = ess.len();
    let mut sorted = ess.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min = sorted.first().copied().unwrap_or(f64::NAN);
    let mean = ess.iter().sum::<f64>() / count.max(1) as f64;
    let median = if count == 0 {
        f64::NAN
    } else if count % 2 == 1 {
        sorted[count / 2]
    } else {
        0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
    };
    let frac_below_100 = ess.iter().filter(|&&e| e < 100.0).count() as f64 / count.max(1) as f64;
    EssSummary {
        min,
        mean,
        median,
        frac_below_100,
        count,
    }
}

/// Aligns the sign modes of the loading rows (and the matching factor
/// columns) against the posterior-mean reference, in a single pass.
///
/// For each row `k` the reference is the across-draw mean of that loading
/// row; a draw whose row has negative inner product with the reference gets
/// row `k` of the loadings and column `k` of the factors negated. The
/// per-draw product `F Lambda` is unchanged. A degenerate (numerically
/// zero) mean row falls back to the first draw's row as the reference.
pub fn align_signs(chains: &ChainStore) -> ChainStore {
    let mut out = chains.clone();
    let d = out.retained();
    if d == 0 {
        return out;
    }
    let k = out.meta.k;
    let q = out.meta.q;
    for row in 0..k {
        let mut reference = DVector::zeros(q);
        for t in 0..d {
            reference += out.lambda[t].row(row).transpose();
        }
        reference /= d as f64;
        if reference.norm() < 1e-10 {
            reference = out.lambda[0].row(row).transpose();
        }
        for t in 0..d {
            let dot = out.lambda[t].row(row).transpose().dot(&reference);
            if dot < 0.0 {
                for j in 0..q {
                    out.lambda[t][(row, j)] = -out.lambda[t][(row, j)];
                }
                for i in 0..out.meta.n {
                    out.factors[t][(i, row)] = -out.factors[t][(i, row)];
                }
            }
        }
    }
    out
}

/// Mean direction and concentration of a set of vectors on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphericalSummary {
    pub mean_direction: DVector<f64>,
    /// Mean resultant length, in [0, 1].
    pub r_bar: f64,
    /// `1 - r_bar^2`.
    pub spherical_variance: f64,
}

/// Normalizes each sample to the unit sphere and summarizes the bundle by
/// its mean direction and resultant length.
pub fn spherical_summary(samples: &[DVector<f64>]) -> Result<SphericalSummary> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].len();
    let mut mean = DVector::zeros(dim);
    for s in samples {
        if s.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: s.len(),
            });
        }
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::InvalidInput("zero-length sample vector".into()));
        }
        mean += s / norm;
    }
    mean /= samples.len() as f64;
    let r_bar = mean.norm();
    if r_bar < 1e-12 {
        return Err(Error::DegenerateMeanDirection);
    }
    Ok(SphericalSummary {
        mean_direction: mean / r_bar,
        r_bar,
        spherical_variance: 1.0 - r_bar * r_bar,
    })
}

/// How the true factors are mapped onto the comparison space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthProjection {
    /// Center and scale each true column to the unit sphere (baseline
    /// samplers).
    Sphere,
    /// Project the true factor matrix onto the scaled Stiefel manifold
    /// first (projected sampler), then scale columns to the unit sphere.
    Stiefel,
}

/// Recovery metrics for one factor.
#[derive(Debug, Clone)]
pub struct FactorMetric {
    pub euclidean_distance: f64,
    pub spherical_variance: f64,
}

/// Per-factor distance between the posterior mean direction and the
/// (projected) truth, plus the posterior spherical variance.
///
/// Expects sign-aligned chains.
pub fn factor_recovery_metrics(
    true_f: &DMatrix<f64>,
    chains: &ChainStore,
    mode: TruthProjection,
) -> Result<Vec<FactorMetric>> {
    let k = chains.meta.k;
    if true_f.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "truth has {} factors but chains have {k}",
            true_f.ncols()
        )));
    }
    if true_f.nrows() != chains.meta.n {
        return Err(Error::DimensionMismatch(format!(
            "truth has {} sites but chains have {}",
            true_f.nrows(),
            chains.meta.n
        )));
    }
    let n = true_f.nrows();
    let target = match mode {
        TruthProjection::Sphere => {
            let mut t = true_f.clone();
            for j in 0..k {
                let mean = t.column(j).sum() / n as f64;
                t.column_mut(j).add_scalar_mut(-mean);
                let norm = t.column(j).norm();
                if norm == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "true factor {j} is constant"
                    )));
                }
                t.column_mut(j).scale_mut(1.0 / norm);
            }
            t
        }
        TruthProjection::Stiefel => {
            let proj = project_factors(true_f)?;
            proj / (n as f64).sqrt()
        }
    };

    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let samples: Vec<DVector<f64>> = chains
            .factors
            .iter()
            .map(|f| f.column(j).clone_owned())
            .collect();
        let summary = spherical_summary(&samples)?;
        let truth_col = target.column(j).clone_owned();
        out.push(FactorMetric {
            euclidean_distance: (&summary.mean_direction - truth_col).norm(),
            spherical_variance: summary.spherical_variance,
        });
    }
    Ok(out)
}

/// Average correlation between a site value and its `k` nearest neighbors:
/// an empirical lag-1 spatial autocorrelation. Higher means smoother.
pub fn nearest_neighbor_correlation(
    locs: &LocationSet,
    values: &[f64],
    k_neighbors: usize,
) -> Result<f64> {
    let n = locs.len();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: values.len(),
        });
    }
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::InvalidInput(
            "neighbor count must be in 1..n".into(),
        ));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Err(Error::InvalidInput("constant field".into()));
    }
    let mut acc = 0.0;
    let mut pairs = 0usize;
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dists.clear();
        for j in 0..n {
            if j != i {
                dists.push((dist2(locs.site(i), locs.site(j)), j));
            }
        }
        dists.select_nth_unstable_by(k_neighbors - 1, |a, b| {
            (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap()
        });
        for &(_, j) in &dists[..k_neighbors] {
            acc += (values[i] - mean) * (values[j] - mean);
            pairs += 1;
        }
    }
    Ok(acc / (pairs as f64 * var))
}
