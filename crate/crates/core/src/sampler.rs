//! MCMC drivers: the projected blocked Gibbs sampler, the plain blocked
//! Gibbs baseline, and the post-centered variant, plus initialization.
//!
//! One chain is strictly sequential. The master seed expands into
//! per-purpose substreams (initialization, factor noise, noise-variance
//! draws, coefficient draws) so adding diagnostics to one step never shifts
//! the draws of another.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{randomized_svd, LsmrOptions};
use crate::model::{
    build_factor_system, conditional_mniw_params, project_factors, sample_coefficients,
    sample_factors, sample_noise_variances, Dataset, ModelState, PriorSpec,
};
use crate::nngp::NngpFactor;
use crate::store::{Algorithm, ChainStore, RunMeta};

/// Chain-length and solver settings for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Total iterations `L`.
    pub iterations: usize,
    /// Iterations discarded before retention.
    pub warmup: usize,
    /// Keep one retained draw per `thin` iterations.
    pub thin: usize,
    pub seed: u64,
    pub lsmr_atol: f64,
    pub lsmr_btol: f64,
    /// Defaults to `4 * n * K` when absent.
    pub lsmr_max_iter: Option<usize>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, iterations: usize, warmup: usize, seed: u64) -> Self {
        Self {
            algorithm,
            iterations,
            warmup,
            thin: 1,
            seed,
            lsmr_atol: 1e-8,
            lsmr_btol: 1e-8,
            lsmr_max_iter: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.warmup >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "warmup ({}) must be smaller than iterations ({})",
                self.warmup, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if !(self.lsmr_atol > 0.0) || !(self.lsmr_btol > 0.0) {
            return Err(Error::InvalidConfig("LSMR tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Explicit starting values replacing the default OLS + randomized-SVD
/// initialization. Factors are completed by regressing the OLS residuals on
/// the supplied loadings.
#[derive(Debug, Clone)]
pub struct InitOverride {
    pub beta: DMatrix<f64>,
    pub lambda: DMatrix<f64>,
    pub sigma2: DVector<f64>,
}

/// Substream purposes for the master-seed expansion.
mod stream {
    pub const INIT: u64 = 1;
    pub const FACTOR_NOISE: u64 = 2;
    pub const NOISE_VARIANCE: u64 = 3;
    pub const COEFFICIENTS: u64 = 4;
}

/// splitmix64 mix of (seed, purpose) into an independent ChaCha stream.
pub(crate) fn substream(seed: u64, purpose: u64) -> ChaCha20Rng {
    let mut z = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha20Rng::seed_from_u64(z)
}

/// OLS regression followed by a rank-`K` randomized SVD of the residuals.
///
/// Returns raw (unprojected) factors `U S`, loadings `V'`, and residual
/// column variances as the noise-variance starting point. The SVD's
/// nonincreasing singular values put the highest-variance (smoothest)
/// factor first.
pub fn initialize_state(data: &Dataset, k: usize, seed: u64) -> Result<ModelState> {
    let x = data.x();
    let y = data.y();
    let gram = x.transpose() * x;
    let chol = Cholesky::new(gram).ok_or_else(|| {
        Error::InvalidInput("design matrix rank-deficient in initialization".into())
    })?;
    let beta = chol.solve(&(x.transpose() * y));
    let resid = y - x * &beta;

    let mut rng = substream(seed, stream::INIT);
    let svd = randomized_svd(&resid, k, 10, 2, rng.next_u64())?;
    let factors = &svd.u * DMatrix::from_diagonal(&svd.singular_values);
    let lambda = svd.v.transpose();
    let after = &resid - &factors * &lambda;
    let n = data.n() as f64;
    let mut sigma2 = DVector::zeros(data.q());
    for j in 0..data.q() {
        let col = after.column(j);
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        // Floor keeps noiseless synthetic fits from starting at zero variance.
        sigma2[j] = var.max(1e-10);
    }
    Ok(ModelState {
        beta,
        lambda,
        sigma2,
        factors,
    })
}

/// State from an explicit override: factors are the least-squares fit of
/// the OLS residuals onto the supplied loadings.
fn state_from_override(data: &Dataset, init: &InitOverride) -> Result<ModelState> {
    let p = data.p();
    let q = data.q();
    let k = init.lambda.nrows();
    if init.beta.nrows() != p || init.beta.ncols() != q {
        return Err(Error::DimensionMismatch(format!(
            "init beta must be {p} x {q}"
        )));
    }
    if init.lambda.ncols() != q {
        return Err(Error::DimensionMismatch(format!(
            "init lambda must have {q} columns"
        )));
    }
    if k == 0 {
        return Err(Error::DimensionMismatch("init lambda needs rows".into()));
    }
    if init.sigma2.len() != q || init.sigma2.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidInput(
            "init noise variances must be positive, one per outcome".into(),
        ));
    }
    let resid = data.y() - data.x() * &init.beta;
    let llt = &init.lambda * init.lambda.transpose();
    let chol = Cholesky::new(llt)
        .ok_or_else(|| Error::InvalidInput("init loadings are rank-deficient".into()))?;
    // F = R L' (L L')^{-1}, so the starting factors match the loadings.
    let factors = chol.solve(&(&init.lambda * resid.transpose())).transpose();
    Ok(ModelState {
        beta: init.beta.clone(),
        lambda: init.lambda.clone(),
        sigma2: init.sigma2.clone(),
        factors,
    })
}

/// Runs the sampler selected by `cfg.algorithm`.
///
/// `GibbsPost` runs the plain blocked Gibbs chain and recenters it, so its
/// raw draws coincide with a `Gibbs` run at the same seed.
pub fn run(
    data: &Dataset,
    priors: &PriorSpec,
    cfg: &RunConfig,
    factors: &[NngpFactor],
    init: Option<&InitOverride>,
) -> Result<ChainStore> {
    cfg.validate()?;
    priors.validate(data.p(), data.q())?;
    if cfg.algorithm == Algorithm::GibbsPost {
        let mut gibbs_cfg = cfg.clone();
        gibbs_cfg.algorithm = Algorithm::Gibbs;
        let raw = run(data, priors, &gibbs_cfg, factors, init)?;
        return post_center(&raw);
    }
    let project = cfg.algorithm == Algorithm::ProjMc2;

    let k = priors.n_factors();
    let n = data.n();
    if factors.len() != k || factors.iter().any(|f| f.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "need {k} NNGP factors of size {n}"
        )));
    }

    let wrap = |index: usize| move |e: Error| Error::Iteration {
        index,
        source: Box::new(e),
    };

    let mut state = match init {
        Some(o) => state_from_override(data, o)?,
        None => initialize_state(data, k, cfg.seed)?,
    };
    if project {
        state.factors = project_factors(&state.factors)?;
    }

    let opts = LsmrOptions {
        atol: cfg.lsmr_atol,
        btol: cfg.lsmr_btol,
        max_iter: cfg.lsmr_max_iter.unwrap_or(4 * n * k),
    };
    let mut f_rng = substream(cfg.seed, stream::FACTOR_NOISE);
    let mut s_rng = substream(cfg.seed, stream::NOISE_VARIANCE);
    let mut g_rng = substream(cfg.seed, stream::COEFFICIENTS);

    let capacity = (cfg.iterations - cfg.warmup) / cfg.thin;
    let mut out = ChainStore {
        factors: Vec::with_capacity(capacity),
        beta: Vec::with_capacity(capacity),
        lambda: Vec::with_capacity(capacity),
        sigma2: Vec::with_capacity(capacity),
        meta: RunMeta {
            algorithm: cfg.algorithm,
            iterations: cfg.iterations,
            warmup: cfg.warmup,
            thin: cfg.thin,
            seed: cfg.seed,
            n,
            p: data.p(),
            q: data.q(),
            k,
            retained: 0,
            intercept_col: data.intercept_col(),
            lsmr_warnings: 0,
            wall_time_secs: 0.0,
            config: serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null),
            dtype: "f64le".into(),
            shape: BTreeMap::new(),
        },
    };

    let start = Instant::now();
    for l in 1..=cfg.iterations {
        let (system, rhs) = build_factor_system(&state, data, factors).map_err(wrap(l))?;
        let draw = sample_factors(&system, &rhs, &opts, &mut f_rng).map_err(wrap(l))?;
        if draw.hit_iteration_limit {
            out.meta.lsmr_warnings += 1;
            log::warn!(
                "iteration {l}: LSMR hit the iteration limit after {} iterations; using best iterate",
                draw.lsmr_iterations
            );
        }
        state.factors = if project {
            project_factors(&draw.factors).map_err(wrap(l))?
        } else {
            draw.factors
        };
        let params = conditional_mniw_params(&state.factors, data, priors).map_err(wrap(l))?;
        state.sigma2 = sample_noise_variances(&params, &mut s_rng).map_err(wrap(l))?;
        let (beta, lambda) =
            sample_coefficients(&params, &state.sigma2, &mut g_rng).map_err(wrap(l))?;
        state.beta = beta;
        state.lambda = lambda;

        if l > cfg.warmup && (l - cfg.warmup) % cfg.thin == 0 {
            out.factors.push(state.factors.clone());
            out.beta.push(state.beta.clone());
            out.lambda.push(state.lambda.clone());
            out.sigma2.push(state.sigma2.clone());
        }
    }
    out.meta.retained = out.retained();
    out.meta.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(out)
}

/// Projected blocked Gibbs sampler.
pub fn run_projmc2(
    data: &Dataset,
    priors: &PriorSpec,
    cfg: &RunConfig,
    factors: &[NngpFactor],
    init: Option<&InitOverride>,
) -> Result<ChainStore> {
    let mut cfg = cfg.clone();
    cfg.algorithm = Algorithm::ProjMc2;
    run(data, priors, &cfg, factors, init)
}

/// Plain blocked Gibbs baseline (no projection step).
pub fn run_blocked_gibbs(
    data: &Dataset,
    priors: &PriorSpec,
    cfg: &RunConfig,
    factors: &[NngpFactor],
    init: Option<&InitOverride>,
) -> Result<ChainStore> {
    let mut cfg = cfg.clone();
    cfg.algorithm = Algorithm::Gibbs;
    run(data, priors, &cfg, factors, init)
}

/// Recenters every retained factor draw at zero and absorbs the removed
/// means into the intercept row, leaving fitted values `X beta + F Lambda`
/// unchanged.
pub fn post_center(chains: &ChainStore) -> Result<ChainStore> {
    let icol = chains.meta.intercept_col.ok_or_else(|| {
        Error::InvalidInput(
            "post-centering needs an intercept column to absorb the factor means".into(),
        )
    })?;
    let mut out = chains.clone();
    out.meta.algorithm = Algorithm::GibbsPost;
    let n = chains.meta.n as f64;
    for t in 0..out.retained() {
        let k = out.factors[t].ncols();
        let mut means = DVector::zeros(k);
        for kk in 0..k {
            means[kk] = out.factors[t].column(kk).sum() / n;
        }
        for kk in 0..k {
            out.factors[t].column_mut(kk).add_scalar_mut(-means[kk]);
        }
        // beta[intercept, :] += means' Lambda keeps X beta + F Lambda fixed.
        let shift = means.transpose() * &out.lambda[t];
        for j in 0..out.meta.q {
            out.beta[t][(icol, j)] += shift[(0, j)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nngp::build_nngp_factor;
    use crate::spatial::{maximin_order, predecessor_neighbors, Kernel, LocationSet};
    use rand::prelude::*;

    fn random_locs(n: usize, seed: u64) -> LocationSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
        LocationSet::new(coords, n, 2).unwrap()
    }

    fn random_matrix(n: usize, k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5)
    }

    fn dataset_with_intercept(n: usize, q: usize, seed: u64) -> Dataset {
        let locs = random_locs(n, seed);
        let mut x = random_matrix(n, 2, seed ^ 0xa);
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let y = random_matrix(n, q, seed ^ 0xb);
        Dataset::new(x, y, locs).unwrap()
    }

    fn nngp_factors(data: &Dataset, decays: &[f64], m: usize) -> Vec<NngpFactor> {
        let ord = maximin_order(data.locs()).unwrap();
        let nbrs = predecessor_neighbors(data.locs(), &ord, m).unwrap();
        decays
            .iter()
            .map(|&d| {
                build_nngp_factor(data.locs(), &ord, &nbrs, &Kernel::exponential(d).unwrap())
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn initialization_recovers_exact_regression() {
        let n = 60;
        let locs = random_locs(n, 1);
        let mut x = random_matrix(n, 2, 2);
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let beta_true = random_matrix(2, 3, 3);
        let y = &x * &beta_true;
        let data = Dataset::new(x, y, locs).unwrap();
        let state = initialize_state(&data, 1, 7).unwrap();
        assert!((&state.beta - &beta_true).amax() < 1e-10);
        // Residuals are zero, so the factor scale collapses.
        assert!(state.factors.amax() < 1e-8);
        assert!(state.sigma2.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn initialization_recovers_rank_one_residual() {
        let n = 80;
        let locs = random_locs(n, 4);
        let mut x = random_matrix(n, 2, 5);
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let beta_true = random_matrix(2, 4, 6);
        let u = DVector::from_fn(n, |i, _| ((i + 1) as f64).sin());
        let v = DVector::from_column_slice(&[2.0, -1.0, 0.5, 1.5]);
        let y = &x * &beta_true + &u * v.transpose();
        let data = Dataset::new(x, y, locs).unwrap();
        let state = initialize_state(&data, 1, 8).unwrap();

        // Lambda row is proportional to v and F column to u, up to a shared sign.
        let lam = state.lambda.row(0).transpose();
        let cos_v = lam.dot(&v) / (lam.norm() * v.norm());
        assert!(cos_v.abs() > 1.0 - 1e-8, "cos {cos_v}");
        let f = state.factors.column(0).clone_owned();
        let cos_u = f.dot(&u) / (f.norm() * u.norm());
        assert!(cos_u.abs() > 1.0 - 1e-8, "cos {cos_u}");
        assert!((cos_u * cos_v - 1.0).abs() < 1e-8, "signs must cancel");
    }

    #[test]
    fn initialization_deterministic() {
        let data = dataset_with_intercept(40, 3, 9);
        let a = initialize_state(&data, 2, 11).unwrap();
        let b = initialize_state(&data, 2, 11).unwrap();
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.lambda, b.lambda);
        assert_eq!(a.factors, b.factors);
        assert_eq!(a.sigma2, b.sigma2);
    }

    #[test]
    fn projected_smoke_run_retains_projected_draws() {
        let data = dataset_with_intercept(25, 2, 12);
        let factors = nngp_factors(&data, &[4.0, 6.0], 5);
        let priors = PriorSpec::flat(
            2.0,
            1.0,
            2,
            vec![
                Kernel::exponential(4.0).unwrap(),
                Kernel::exponential(6.0).unwrap(),
            ],
        );
        let cfg = RunConfig::new(Algorithm::ProjMc2, 10, 0, 13);
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        assert_eq!(chains.retained(), 10);
        let n = 25.0;
        for f in &chains.factors {
            let gram = f.transpose() * f;
            assert!((gram - DMatrix::identity(2, 2) * n).amax() < 1e-6 * n);
            for j in 0..2 {
                assert!(f.column(j).sum().abs() / n < 1e-8);
            }
        }
        assert!(chains.sigma2.iter().all(|s| s.iter().all(|&v| v > 0.0)));
    }

    #[test]
    fn gibbs_smoke_run_keeps_raw_draws() {
        let data = dataset_with_intercept(25, 2, 14);
        let factors = nngp_factors(&data, &[4.0], 5);
        let priors = PriorSpec::flat(2.0, 1.0, 2, vec![Kernel::exponential(4.0).unwrap()]);
        let cfg = RunConfig::new(Algorithm::Gibbs, 10, 0, 15);
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        assert_eq!(chains.retained(), 10);
        // Raw draws are generally not on the manifold.
        let f = &chains.factors[5];
        let gram = f.transpose() * f;
        assert!((gram - DMatrix::identity(1, 1) * 25.0).amax() > 1e-4);
    }

    #[test]
    fn thinning_and_warmup_counts() {
        let data = dataset_with_intercept(20, 1, 16);
        let factors = nngp_factors(&data, &[6.0], 4);
        let priors = PriorSpec::flat(2.0, 1.0, 1, vec![Kernel::exponential(6.0).unwrap()]);
        let mut cfg = RunConfig::new(Algorithm::ProjMc2, 10, 3, 17);
        cfg.thin = 2;
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        assert_eq!(chains.retained(), 3); // floor((10 - 3) / 2)
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(Algorithm::Gibbs, 5, 5, 0);
        assert!(cfg.validate().is_err());
        cfg.warmup = 2;
        cfg.thin = 0;
        assert!(cfg.validate().is_err());
        cfg.thin = 1;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn runs_deterministic_across_repeats() {
        let data = dataset_with_intercept(30, 2, 18);
        let factors = nngp_factors(&data, &[4.0, 6.0], 6);
        let priors = PriorSpec::flat(
            2.0,
            1.0,
            2,
            vec![
                Kernel::exponential(4.0).unwrap(),
                Kernel::exponential(6.0).unwrap(),
            ],
        );
        let cfg = RunConfig::new(Algorithm::ProjMc2, 8, 2, 19);
        let a = run(&data, &priors, &cfg, &factors, None).unwrap();
        let b = run(&data, &priors, &cfg, &factors, None).unwrap();
        assert_eq!(a.factors, b.factors);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.lambda, b.lambda);
        assert_eq!(a.sigma2, b.sigma2);
    }

    #[test]
    fn gibbs_post_matches_post_centered_gibbs() {
        let data = dataset_with_intercept(30, 2, 20);
        let factors = nngp_factors(&data, &[6.0], 6);
        let priors = PriorSpec::flat(2.0, 1.0, 2, vec![Kernel::exponential(6.0).unwrap()]);
        let cfg_gibbs = RunConfig::new(Algorithm::Gibbs, 12, 4, 21);
        let mut cfg_post = cfg_gibbs.clone();
        cfg_post.algorithm = Algorithm::GibbsPost;

        let gibbs = run(&data, &priors, &cfg_gibbs, &factors, None).unwrap();
        let post = run(&data, &priors, &cfg_post, &factors, None).unwrap();
        let centered = post_center(&gibbs).unwrap();
        assert_eq!(post.factors, centered.factors);
        assert_eq!(post.beta, centered.beta);
        assert_eq!(post.meta.algorithm, Algorithm::GibbsPost);
    }

    #[test]
    fn post_center_preserves_fitted_values() {
        let data = dataset_with_intercept(30, 3, 22);
        let factors = nngp_factors(&data, &[6.0, 9.0], 6);
        let priors = PriorSpec::flat(
            2.0,
            1.0,
            3,
            vec![
                Kernel::exponential(6.0).unwrap(),
                Kernel::exponential(9.0).unwrap(),
            ],
        );
        let cfg = RunConfig::new(Algorithm::Gibbs, 10, 2, 23);
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        let centered = post_center(&chains).unwrap();
        for t in 0..chains.retained() {
            let before = data.x() * &chains.beta[t] + &chains.factors[t] * &chains.lambda[t];
            let after = data.x() * &centered.beta[t] + &centered.factors[t] * &centered.lambda[t];
            assert!((before - after).amax() < 1e-12);
            for kk in 0..centered.meta.k {
                assert!(centered.factors[t].column(kk).sum().abs() / 30.0 < 1e-12);
            }
        }
    }

    #[test]
    fn post_center_is_identity_on_centered_draws() {
        let data = dataset_with_intercept(30, 2, 24);
        let factors = nngp_factors(&data, &[6.0], 6);
        let priors = PriorSpec::flat(2.0, 1.0, 2, vec![Kernel::exponential(6.0).unwrap()]);
        let cfg = RunConfig::new(Algorithm::ProjMc2, 6, 1, 25);
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        // Projected draws are already centered.
        let centered = post_center(&chains).unwrap();
        for t in 0..chains.retained() {
            assert!((&centered.factors[t] - &chains.factors[t]).amax() < 1e-12);
            assert!((&centered.beta[t] - &chains.beta[t]).amax() < 1e-12);
        }
    }

    #[test]
    fn post_center_requires_intercept() {
        let n = 20;
        let locs = random_locs(n, 26);
        let x = random_matrix(n, 2, 27); // no intercept column
        let y = random_matrix(n, 2, 28);
        let data = Dataset::new(x, y, locs).unwrap();
        let factors = nngp_factors(&data, &[6.0], 4);
        let priors = PriorSpec::flat(2.0, 1.0, 2, vec![Kernel::exponential(6.0).unwrap()]);
        let cfg = RunConfig::new(Algorithm::Gibbs, 5, 1, 29);
        let chains = run(&data, &priors, &cfg, &factors, None).unwrap();
        assert!(post_center(&chains).is_err());
    }

    #[test]
    fn override_initialization_used() {
        let data = dataset_with_intercept(30, 2, 30);
        let init = InitOverride {
            beta: random_matrix(2, 2, 31),
            lambda: random_matrix(2, 2, 32) + DMatrix::identity(2, 2),
            sigma2: DVector::from_column_slice(&[0.5, 0.8]),
        };
        let state = state_from_override(&data, &init).unwrap();
        assert_eq!(state.beta, init.beta);
        assert_eq!(state.lambda, init.lambda);
        // Factors minimize || (Y - X beta) - F Lambda ||_F, so the gradient
        // at the fit is zero: (Y - X beta - F Lambda) Lambda' = 0.
        let resid = data.y() - data.x() * &init.beta - &state.factors * &init.lambda;
        let grad = resid * init.lambda.transpose();
        assert!(grad.amax() < 1e-10);
    }

    #[test]
    fn substreams_do_not_collide() {
        let a = substream(42, stream::FACTOR_NOISE).next_u64();
        let b = substream(42, stream::NOISE_VARIANCE).next_u64();
        let c = substream(42, stream::COEFFICIENTS).next_u64();
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert_ne!(a, c);
    }
}
