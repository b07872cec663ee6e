//! Factor-model state, priors, the scaled-Stiefel projection, and the
//! conjugate conditional updates.
//!
//! The model is `Y = X beta + F Lambda + E` with independent `N(0, sigma_j^2)`
//! noise columns, one NNGP prior per factor column, and matrix-normal (or
//! flat) priors on the coefficient stack `gamma = [beta; Lambda]`. Both
//! conditional updates are phrased as augmented least-squares systems so the
//! factor draw can run matrix-free through LSMR while the coefficient draw
//! stays a small dense Cholesky.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{lsmr, mgs_thin_qr, LinearOperator, LsmrOptions, StopReason};
use crate::nngp::NngpFactor;
use crate::spatial::{Kernel, LocationSet};

/// Hard cap on the NNGP neighbor budget.
pub const MAX_NEIGHBORS: usize = 20;

/// Default NNGP neighbor budget.
pub const DEFAULT_NEIGHBORS: usize = 15;

/// Design matrix, outcomes, and site coordinates.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    locs: LocationSet,
    intercept_col: Option<usize>,
}

impl Dataset {
    /// Validates row agreement, `n > p`, and numerical full column rank of
    /// the design matrix. Detects an intercept column (all entries 1).
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, locs: LocationSet) -> Result<Self> {
        let n = locs.len();
        if x.nrows() != n || y.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rows disagree: locations {n}, X {}, Y {}",
                x.nrows(),
                y.nrows()
            )));
        }
        if x.ncols() == 0 || y.ncols() == 0 {
            return Err(Error::DimensionMismatch(
                "X and Y need at least one column".into(),
            ));
        }
        if n <= x.ncols() {
            return Err(Error::InvalidInput(format!(
                "need more sites than predictors, got n={n}, p={}",
                x.ncols()
            )));
        }
        let svd = x.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-10 * smax) {
            return Err(Error::InvalidInput(format!(
                "design matrix numerically rank-deficient (smin/smax = {:.3e})",
                smin / smax
            )));
        }
        let intercept_col =
            (0..x.ncols()).find(|&j| x.column(j).iter().all(|&v| (v - 1.0).abs() <= 1e-12));
        Ok(Self {
            x,
            y,
            locs,
            intercept_col,
        })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn locs(&self) -> &LocationSet {
        &self.locs
    }

    pub fn n(&self) -> usize {
        self.locs.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    /// Index of the all-ones design column, when present.
    pub fn intercept_col(&self) -> Option<usize> {
        self.intercept_col
    }
}

/// Prior on a coefficient block: flat, or matrix-normal with an SPD row
/// covariance.
#[derive(Debug, Clone)]
pub enum CoeffPrior {
    Flat,
    Normal { mean: DMatrix<f64>, cov: DMatrix<f64> },
}

impl CoeffPrior {
    fn validate(&self, rows: usize, cols: usize, label: &str) -> Result<()> {
        if let CoeffPrior::Normal { mean, cov } = self {
            if mean.nrows() != rows || mean.ncols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "{label} prior mean must be {rows} x {cols}, got {} x {}",
                    mean.nrows(),
                    mean.ncols()
                )));
            }
            if cov.nrows() != rows || cov.ncols() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "{label} prior covariance must be {rows} x {rows}"
                )));
            }
            if Cholesky::new(cov.clone()).is_none() {
                return Err(Error::InvalidInput(format!(
                    "{label} prior covariance is not positive definite"
                )));
            }
        }
        Ok(())
    }
}

/// Full prior specification: coefficient priors, inverse-gamma noise priors,
/// and the prefixed per-factor kernels with their shared neighbor budget.
#[derive(Debug, Clone)]
pub struct PriorSpec {
    pub beta: CoeffPrior,
    pub lambda: CoeffPrior,
    /// Inverse-gamma shape `a` shared across outcomes.
    pub ig_shape: f64,
    /// Inverse-gamma scales `b_i`, one per outcome.
    pub ig_scale: DVector<f64>,
    /// One kernel per factor; the decays stay fixed for the whole run.
    pub kernels: Vec<Kernel>,
    /// NNGP neighbor budget `m`.
    pub neighbors: usize,
}

impl PriorSpec {
    /// Flat coefficient priors with shared IG(a, b) noise priors.
    pub fn flat(a: f64, b: f64, q: usize, kernels: Vec<Kernel>) -> Self {
        Self {
            beta: CoeffPrior::Flat,
            lambda: CoeffPrior::Flat,
            ig_shape: a,
            ig_scale: DVector::from_element(q, b),
            kernels,
            neighbors: DEFAULT_NEIGHBORS,
        }
    }

    pub fn n_factors(&self) -> usize {
        self.kernels.len()
    }

    pub fn validate(&self, p: usize, q: usize) -> Result<()> {
        if self.kernels.is_empty() {
            return Err(Error::InvalidConfig(
                "need at least one factor kernel".into(),
            ));
        }
        if !(self.ig_shape > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "inverse-gamma shape must be positive, got {}",
                self.ig_shape
            )));
        }
        if self.ig_scale.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "need one inverse-gamma scale per outcome ({q}), got {}",
                self.ig_scale.len()
            )));
        }
        if self.ig_scale.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidConfig(
                "inverse-gamma scales must be positive".into(),
            ));
        }
        if self.neighbors == 0 || self.neighbors > MAX_NEIGHBORS {
            return Err(Error::InvalidNeighborBudget {
                got: self.neighbors,
                max: MAX_NEIGHBORS,
            });
        }
        self.beta.validate(p, q, "beta")?;
        self.lambda.validate(self.n_factors(), q, "lambda")?;
        Ok(())
    }
}

/// One draw of all sampled quantities.
#[derive(Debug, Clone)]
pub struct ModelState {
    /// `p x q` regression coefficients.
    pub beta: DMatrix<f64>,
    /// `K x q` loadings.
    pub lambda: DMatrix<f64>,
    /// Noise variances, strictly positive.
    pub sigma2: DVector<f64>,
    /// `n x K` factors (projected for the projected sampler, raw otherwise).
    pub factors: DMatrix<f64>,
}

impl ModelState {
    /// Checks the post-projection invariants: centered columns and
    /// `F'F = n I`.
    pub fn check_projected(&self) -> Result<()> {
        let n = self.factors.nrows() as f64;
        for j in 0..self.factors.ncols() {
            let mean = self.factors.column(j).sum() / n;
            if mean.abs() > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "factor column {j} mean {mean:.3e} not centered"
                )));
            }
        }
        let gram = self.factors.transpose() * &self.factors;
        let target = DMatrix::identity(self.factors.ncols(), self.factors.ncols()) * n;
        if (gram - target).amax() > 1e-6 * n {
            return Err(Error::InvalidInput("factor Gram matrix is not n I".into()));
        }
        if self.sigma2.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidInput(
                "noise variances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Centers the columns of `f` and projects onto the scaled Stiefel manifold:
/// `sqrt(n)` times the thin-QR Q factor of the centered matrix.
///
/// The output has zero column means and Gram matrix `n I`. Matrices of the
/// form `g(F) R + 1 mu'` (upper-triangular `R` with positive diagonal) all
/// map back to `g(F)`.
pub fn project_factors(f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = f.nrows();
    let mut centered = f.clone();
    for j in 0..centered.ncols() {
        let mean = centered.column(j).sum() / n as f64;
        centered.column_mut(j).add_scalar_mut(-mean);
    }
    let qr = mgs_thin_qr(&centered)?;
    Ok(qr.q * (n as f64).sqrt())
}

/// The matrix-free augmented system whose least-squares solution (plus
/// standard-normal perturbation) is a conditional factor draw.
///
/// Rows: `n q` whitened-likelihood rows followed by `n K` prior-whitening
/// rows; columns: `vec(F)` stacked factor by factor in original site order.
pub struct FactorSystem<'a> {
    n: usize,
    q: usize,
    k: usize,
    /// `coef[(k, j)] = lambda[(k, j)] / sigma_j`.
    coef: DMatrix<f64>,
    factors: &'a [NngpFactor],
}

impl FactorSystem<'_> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_factors(&self) -> usize {
        self.k
    }
}

impl LinearOperator for FactorSystem<'_> {
    fn nrows(&self) -> usize {
        self.n * (self.q + self.k)
    }

    fn ncols(&self) -> usize {
        self.n * self.k
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        out[..n * self.q].fill(0.0);
        for k in 0..self.k {
            let xk = &x[k * n..(k + 1) * n];
            for j in 0..self.q {
                let c = self.coef[(k, j)];
                if c != 0.0 {
                    let row = &mut out[j * n..(j + 1) * n];
                    for i in 0..n {
                        row[i] += c * xk[i];
                    }
                }
            }
        }
        for k in 0..self.k {
            let dst = &mut out[n * self.q + k * n..n * self.q + (k + 1) * n];
            self.factors[k].whiten_into(&x[k * n..(k + 1) * n], dst);
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.fill(0.0);
        for k in 0..self.k {
            let dst = &mut out[k * n..(k + 1) * n];
            for j in 0..self.q {
                let c = self.coef[(k, j)];
                if c != 0.0 {
                    let src = &y[j * n..(j + 1) * n];
                    for i in 0..n {
                        dst[i] += c * src[i];
                    }
                }
            }
        }
        for k in 0..self.k {
            let src = &y[n * self.q + k * n..n * self.q + (k + 1) * n];
            // Accumulates on top of the likelihood contribution.
            self.factors[k].whiten_adjoint_into(src, &mut out[k * n..(k + 1) * n]);
        }
    }
}

/// Builds the factor-draw system and its right-hand side from the current
/// coefficients and noise variances.
pub fn build_factor_system<'a>(
    state: &ModelState,
    data: &Dataset,
    factors: &'a [NngpFactor],
) -> Result<(FactorSystem<'a>, Vec<f64>)> {
    let n = data.n();
    let q = data.q();
    let k = state.lambda.nrows();
    if state.lambda.ncols() != q || state.beta.nrows() != data.p() || state.beta.ncols() != q {
        return Err(Error::DimensionMismatch(
            "state dimensions disagree with dataset".into(),
        ));
    }
    if factors.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "need one NNGP factor per latent factor ({k}), got {}",
            factors.len()
        )));
    }
    if factors.iter().any(|f| f.len() != n) {
        return Err(Error::DimensionMismatch(
            "NNGP factor size disagrees with dataset".into(),
        ));
    }
    if state.sigma2.len() != q || state.sigma2.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidInput(
            "noise variances must be positive and one per outcome".into(),
        ));
    }

    let inv_sd: Vec<f64> = state.sigma2.iter().map(|&s| 1.0 / s.sqrt()).collect();
    let coef = DMatrix::from_fn(k, q, |kk, j| state.lambda[(kk, j)] * inv_sd[j]);

    let resid = data.y() - data.x() * &state.beta;
    let mut rhs = vec![0.0; n * (q + k)];
    for j in 0..q {
        for i in 0..n {
            rhs[j * n + i] = resid[(i, j)] * inv_sd[j];
        }
    }
    Ok((
        FactorSystem {
            n,
            q,
            k,
            coef,
            factors,
        },
        rhs,
    ))
}

/// A conditional factor draw together with solver telemetry.
#[derive(Debug, Clone)]
pub struct FactorDraw {
    pub factors: DMatrix<f64>,
    pub lsmr_iterations: usize,
    pub hit_iteration_limit: bool,
}

/// Deterministic core of the factor draw: solves the augmented least-squares
/// system with an explicit perturbation (zero noise yields the conditional
/// posterior mean).
pub fn solve_factors_with_noise(
    system: &FactorSystem<'_>,
    rhs: &[f64],
    noise: &[f64],
    opts: &LsmrOptions,
) -> Result<FactorDraw> {
    let rows = system.nrows();
    if rhs.len() != rows || noise.len() != rows {
        return Err(Error::LengthMismatch {
            expected: rows,
            found: rhs.len().min(noise.len()),
        });
    }
    let b: Vec<f64> = rhs.iter().zip(noise).map(|(r, v)| r + v).collect();
    let res = lsmr(system, &b, opts)?;
    let n = system.n;
    let k = system.k;
    let factors = DMatrix::from_fn(n, k, |i, kk| res.x[kk * n + i]);
    Ok(FactorDraw {
        factors,
        lsmr_iterations: res.iterations,
        hit_iteration_limit: res.stop == StopReason::IterationLimit,
    })
}

/// Draws the factors from their conditional posterior by perturbing the
/// right-hand side with one standard-normal entry per augmented row.
pub fn sample_factors<R: Rng + ?Sized>(
    system: &FactorSystem<'_>,
    rhs: &[f64],
    opts: &LsmrOptions,
    rng: &mut R,
) -> Result<FactorDraw> {
    let noise: Vec<f64> = (0..system.nrows())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    solve_factors_with_noise(system, rhs, &noise, opts)
}

/// Conditional parameters of the coefficient/noise update with diagonal
/// noise covariance.
#[derive(Debug, Clone)]
pub struct MniwParams {
    /// `(p + K) x q` conditional mean of the coefficient stack.
    pub mu_star: DMatrix<f64>,
    /// Lower Cholesky factor of the augmented Gram matrix `X*'X*`.
    chol_l: DMatrix<f64>,
    /// `a + n/2`.
    pub a_star: f64,
    /// `b_i + 0.5 ||residual column i||^2`.
    pub b_star: DVector<f64>,
    p: usize,
}

impl MniwParams {
    /// `(X*'X*)^{-1}`.
    pub fn vstar(&self) -> DMatrix<f64> {
        let dim = self.chol_l.nrows();
        let inv_l = self
            .chol_l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(dim, dim))
            .expect("Cholesky factor is invertible");
        inv_l.transpose() * inv_l
    }

    pub fn chol_lower(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_factors(&self) -> usize {
        self.mu_star.nrows() - self.p
    }

    /// Test-support constructor from explicit parts.
    pub fn from_parts(
        mu_star: DMatrix<f64>,
        chol_l: DMatrix<f64>,
        a_star: f64,
        b_star: DVector<f64>,
        p: usize,
    ) -> Self {
        Self {
            mu_star,
            chol_l,
            a_star,
            b_star,
            p,
        }
    }
}

/// Stacks the data rows with the prior whitening rows. Flat priors
/// contribute no rows.
fn build_augmented(
    f_tilde: &DMatrix<f64>,
    data: &Dataset,
    priors: &PriorSpec,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = data.n();
    let p = data.p();
    let q = data.q();
    let k = priors.n_factors();
    if f_tilde.nrows() != n || f_tilde.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "factors must be {n} x {k}, got {} x {}",
            f_tilde.nrows(),
            f_tilde.ncols()
        )));
    }
    priors.validate(p, q)?;

    let beta_rows = matches!(priors.beta, CoeffPrior::Normal { .. }) as usize * p;
    let lambda_rows = matches!(priors.lambda, CoeffPrior::Normal { .. }) as usize * k;
    let total = n + beta_rows + lambda_rows;

    let mut xs = DMatrix::zeros(total, p + k);
    let mut ys = DMatrix::zeros(total, q);
    xs.view_mut((0, 0), (n, p)).copy_from(data.x());
    xs.view_mut((0, p), (n, k)).copy_from(f_tilde);
    ys.view_mut((0, 0), (n, q)).copy_from(data.y());

    let mut row = n;
    if let CoeffPrior::Normal { mean, cov } = &priors.beta {
        let inv_l = whitening_rows(cov)?;
        xs.view_mut((row, 0), (p, p)).copy_from(&inv_l);
        ys.view_mut((row, 0), (p, q)).copy_from(&(&inv_l * mean));
        row += p;
    }
    if let CoeffPrior::Normal { mean, cov } = &priors.lambda {
        let inv_l = whitening_rows(cov)?;
        xs.view_mut((row, p), (k, k)).copy_from(&inv_l);
        ys.view_mut((row, 0), (k, q)).copy_from(&(&inv_l * mean));
    }
    Ok((xs, ys))
}

/// `L^{-1}` for `cov = L L'`.
fn whitening_rows(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = cov.nrows();
    let chol = Cholesky::new(cov.clone())
        .ok_or_else(|| Error::InvalidInput("prior covariance is not positive definite".into()))?;
    chol.l()
        .solve_lower_triangular(&DMatrix::identity(dim, dim))
        .ok_or_else(|| Error::InvalidInput("prior covariance factor not invertible".into()))
}

/// Conditional update for the coefficient stack and noise variances given
/// projected (or raw) factors.
pub fn conditional_mniw_params(
    f_tilde: &DMatrix<f64>,
    data: &Dataset,
    priors: &PriorSpec,
) -> Result<MniwParams> {
    let (xs, ys) = build_augmented(f_tilde, data, priors)?;
    let gram = xs.transpose() * &xs;
    let chol = Cholesky::new(gram).ok_or(Error::UnidentifiedCoefficients)?;
    let mu_star = chol.solve(&(xs.transpose() * &ys));
    let resid = &ys - &xs * &mu_star;
    let mut b_star = priors.ig_scale.clone();
    for j in 0..data.q() {
        b_star[j] += 0.5 * resid.column(j).norm_squared();
    }
    Ok(MniwParams {
        mu_star,
        chol_l: chol.l(),
        a_star: priors.ig_shape + data.n() as f64 / 2.0,
        b_star,
        p: data.p(),
    })
}

/// Independent inverse-gamma draws of the noise variances.
pub fn sample_noise_variances<R: Rng + ?Sized>(
    params: &MniwParams,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(params.b_star.len());
    for j in 0..params.b_star.len() {
        let gamma = Gamma::new(params.a_star, 1.0 / params.b_star[j])
            .map_err(|e| Error::InvalidInput(format!("inverse-gamma parameters invalid: {e}")))?;
        out[j] = 1.0 / gamma.sample(rng);
    }
    Ok(out)
}

/// Matrix-normal coefficient draw `gamma = mu* + L*^{-T} U` with
/// `U[i, j] ~ N(0, sigma_j^2)`; splits into `(beta, lambda)`.
pub fn sample_coefficients<R: Rng + ?Sized>(
    params: &MniwParams,
    sigma2: &DVector<f64>,
    rng: &mut R,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rows = params.mu_star.nrows();
    let cols = params.mu_star.ncols();
    if sigma2.len() != cols {
        return Err(Error::LengthMismatch {
            expected: cols,
            found: sigma2.len(),
        });
    }
    let mut shock = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        let sd = sigma2[j].sqrt();
        for i in 0..rows {
            shock[(i, j)] = sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    coefficients_from_shock(params, &shock)
}

/// Deterministic core of the coefficient draw; a zero shock returns the
/// conditional mean.
pub fn coefficients_from_shock(
    params: &MniwParams,
    shock: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if shock.shape() != params.mu_star.shape() {
        return Err(Error::DimensionMismatch(format!(
            "shock must be {} x {}",
            params.mu_star.nrows(),
            params.mu_star.ncols()
        )));
    }
    let z = params
        .chol_l
        .transpose()
        .solve_upper_triangular(shock)
        .ok_or(Error::UnidentifiedCoefficients)?;
    let gamma = &params.mu_star + z;
    let p = params.p;
    let k = gamma.nrows() - p;
    Ok((
        gamma.rows(0, p).clone_owned(),
        gamma.rows(p, k).clone_owned(),
    ))
}

/// Full MNIW conditional parameters with an unrestricted noise covariance.
#[derive(Debug, Clone)]
pub struct FullMniwParams {
    pub mu_star: DMatrix<f64>,
    pub v_star: DMatrix<f64>,
    pub psi_star: DMatrix<f64>,
    pub nu_star: f64,
}

/// Dense reference construction of the full MNIW update. Restricted to
/// small instances; the scalable path models the noise covariance as
/// diagonal and shares `mu*`, `V*` with this oracle.
pub fn conditional_mniw_full_sigma_oracle(
    f_tilde: &DMatrix<f64>,
    data: &Dataset,
    priors: &PriorSpec,
    psi: &DMatrix<f64>,
    nu: f64,
) -> Result<FullMniwParams> {
    if data.n() > 200 {
        return Err(Error::InvalidInput(
            "full-covariance oracle is dense; limited to n <= 200".into(),
        ));
    }
    let q = data.q();
    if psi.nrows() != q || psi.ncols() != q {
        return Err(Error::DimensionMismatch(format!("psi must be {q} x {q}")));
    }
    let (xs, ys) = build_augmented(f_tilde, data, priors)?;
    let gram = xs.transpose() * &xs;
    let v_star = gram
        .clone()
        .try_inverse()
        .ok_or(Error::UnidentifiedCoefficients)?;
    let mu_star = &v_star * (xs.transpose() * &ys);
    let resid = &ys - &xs * &mu_star;
    let psi_star = psi + resid.transpose() * &resid;
    Ok(FullMniwParams {
        mu_star,
        v_star,
        psi_star,
        nu_star: nu + data.n() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nngp::build_nngp_factor;
    use crate::spatial::{maximin_order, predecessor_neighbors};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn random_locs(n: usize, seed: u64) -> LocationSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
        LocationSet::new(coords, n, 2).unwrap()
    }

    fn nngp_for(locs: &LocationSet, decay: f64, m: usize) -> NngpFactor {
        let ord = maximin_order(locs).unwrap();
        let nbrs = predecessor_neighbors(locs, &ord, m).unwrap();
        build_nngp_factor(locs, &ord, &nbrs, &Kernel::exponential(decay).unwrap()).unwrap()
    }

    fn dense_correlation(locs: &LocationSet, decay: f64) -> DMatrix<f64> {
        let kernel = Kernel::exponential(decay).unwrap();
        DMatrix::from_fn(locs.len(), locs.len(), |i, j| {
            kernel.correlation(locs.site(i), locs.site(j))
        })
    }

    fn random_matrix(n: usize, k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5)
    }

    // ---- projection -----------------------------------------------------

    #[test]
    fn projection_properties_on_random_input() {
        let f = random_matrix(200, 2, 1);
        let proj = project_factors(&f).unwrap();
        let n = 200.0;
        for j in 0..2 {
            assert!(proj.column(j).sum().abs() / n < 1e-12);
        }
        let gram = proj.transpose() * &proj;
        assert!((gram - DMatrix::identity(2, 2) * n).amax() < 1e-8);
        let twice = project_factors(&proj).unwrap();
        assert!((&twice - &proj).amax() < 1e-10);
    }

    #[test]
    fn projection_fixed_point() {
        let f = random_matrix(60, 3, 2);
        let proj = project_factors(&f).unwrap();
        let again = project_factors(&proj).unwrap();
        assert!((&again - &proj).amax() < 1e-10);
    }

    #[test]
    fn projection_rejects_rank_deficiency() {
        let mut f = random_matrix(30, 2, 3);
        let dup = f.column(0).clone_owned();
        f.set_column(1, &dup);
        assert!(matches!(
            project_factors(&f),
            Err(Error::RankDeficient { col: 1 })
        ));
    }

    proptest! {
        /// Invariance over the full inverse set: upper-triangular mixing
        /// with positive diagonal plus column shifts.
        #[test]
        fn projection_inverse_set_invariance(seed in 0u64..2000, k in 1usize..4) {
            let n = 50;
            let f = random_matrix(n, k, seed);
            let base = project_factors(&f).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
            let mut r = DMatrix::zeros(k, k);
            for j in 0..k {
                r[(j, j)] = 0.3 + 1.7 * rng.random::<f64>();
                for i in 0..j {
                    r[(i, j)] = rng.random::<f64>() - 0.5;
                }
            }
            let mu = DVector::from_fn(k, |_, _| 4.0 * (rng.random::<f64>() - 0.5));
            let shifted = &base * &r + DVector::from_element(n, 1.0) * mu.transpose();
            let back = project_factors(&shifted).unwrap();
            prop_assert!((&back - &base).amax() < 1e-10);
        }
    }

    // ---- factor system ----------------------------------------------------

    fn tiny_dataset(n: usize, p: usize, q: usize, seed: u64) -> Dataset {
        let locs = random_locs(n, seed);
        let mut x = random_matrix(n, p, seed ^ 1);
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let y = random_matrix(n, q, seed ^ 2);
        Dataset::new(x, y, locs).unwrap()
    }

    fn dense_operator_matrix(op: &dyn LinearOperator) -> DMatrix<f64> {
        let (r, c) = (op.nrows(), op.ncols());
        let mut mat = DMatrix::zeros(r, c);
        let mut e = vec![0.0; c];
        let mut col = vec![0.0; r];
        for j in 0..c {
            e[j] = 1.0;
            op.apply(&e, &mut col);
            for i in 0..r {
                mat[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        mat
    }

    #[test]
    fn zero_loadings_reduce_to_prior_precision() {
        let n = 6;
        let data = tiny_dataset(n, 1, 2, 10);
        let f1 = nngp_for(data.locs(), 6.0, n - 1);
        let f2 = nngp_for(data.locs(), 9.0, n - 1);
        let factors = vec![f1, f2];
        let state = ModelState {
            beta: DMatrix::zeros(1, 2),
            lambda: DMatrix::zeros(2, 2),
            sigma2: DVector::from_element(2, 1.0),
            factors: DMatrix::zeros(n, 2),
        };
        let (system, _) = build_factor_system(&state, &data, &factors).unwrap();
        let xt = dense_operator_matrix(&system);
        let gram = xt.transpose() * &xt;
        let mut expected = DMatrix::zeros(2 * n, 2 * n);
        for (k, f) in factors.iter().enumerate() {
            expected
                .view_mut((k * n, k * n), (n, n))
                .copy_from(&f.dense_precision());
        }
        assert!((gram - expected).amax() < 1e-10);
    }

    #[test]
    fn posterior_mean_matches_dense_closed_form() {
        // n=4, K=1, q=1, p=1, full neighbors: the NNGP prior is exact.
        let n = 4;
        let data = tiny_dataset(n, 1, 1, 11);
        let factor = nngp_for(data.locs(), 6.0, n - 1);
        let factors = vec![factor];
        let lam = 0.8;
        let sig2 = 0.25;
        let beta = DMatrix::from_element(1, 1, 0.3);
        let state = ModelState {
            beta: beta.clone(),
            lambda: DMatrix::from_element(1, 1, lam),
            sigma2: DVector::from_element(1, sig2),
            factors: DMatrix::zeros(n, 1),
        };
        let (system, rhs) = build_factor_system(&state, &data, &factors).unwrap();
        let noise = vec![0.0; system.nrows()];
        let draw =
            solve_factors_with_noise(&system, &rhs, &noise, &LsmrOptions::for_columns(n)).unwrap();

        let c = dense_correlation(data.locs(), 6.0);
        let prec = c.try_inverse().unwrap();
        let lhs = prec + DMatrix::identity(n, n) * (lam * lam / sig2);
        let resid = data.y() - data.x() * &beta;
        let rhs_dense = resid * (lam / sig2);
        let expected = lhs.try_inverse().unwrap() * rhs_dense;
        assert!((&draw.factors - &expected).amax() < 1e-8);
    }

    #[test]
    fn factor_system_adjoint_consistency() {
        let n = 12;
        let data = tiny_dataset(n, 2, 3, 12);
        let factors = vec![nngp_for(data.locs(), 6.0, 5), nngp_for(data.locs(), 9.0, 5)];
        let state = ModelState {
            beta: random_matrix(2, 3, 13),
            lambda: random_matrix(2, 3, 14),
            sigma2: DVector::from_column_slice(&[0.5, 1.5, 0.7]),
            factors: DMatrix::zeros(n, 2),
        };
        let (system, _) = build_factor_system(&state, &data, &factors).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        for _ in 0..6 {
            let u: Vec<f64> = (0..system.ncols())
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            let v: Vec<f64> = (0..system.nrows())
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            let mut au = vec![0.0; system.nrows()];
            system.apply(&u, &mut au);
            let mut atv = vec![0.0; system.ncols()];
            system.apply_transpose(&v, &mut atv);
            let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = u.iter().zip(&atv).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0));
        }
    }

    #[test]
    fn factor_draws_match_prior_when_loadings_vanish() {
        // Lambda = 0: draws must follow the NNGP prior regardless of data.
        let n = 4;
        let data = tiny_dataset(n, 1, 1, 16);
        let factor = nngp_for(data.locs(), 6.0, n - 1);
        let c = dense_correlation(data.locs(), 6.0);
        let factors = vec![factor];
        let state = ModelState {
            beta: DMatrix::zeros(1, 1),
            lambda: DMatrix::zeros(1, 1),
            sigma2: DVector::from_element(1, 1.0),
            factors: DMatrix::zeros(n, 1),
        };
        let (system, rhs) = build_factor_system(&state, &data, &factors).unwrap();
        let opts = LsmrOptions::for_columns(n);
        let draws = 20_000;
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let mut sum = DVector::zeros(n);
        let mut sum_outer = DMatrix::zeros(n, n);
        for _ in 0..draws {
            let d = sample_factors(&system, &rhs, &opts, &mut rng).unwrap();
            let v = d.factors.column(0).clone_owned();
            sum += &v;
            sum_outer += &v * v.transpose();
        }
        let nn = draws as f64;
        let mean = sum / nn;
        let cov = sum_outer / nn - &mean * mean.transpose();
        for i in 0..n {
            for j in 0..n {
                let se = ((c[(i, i)] * c[(j, j)] + c[(i, j)] * c[(i, j)]) / nn).sqrt();
                assert!(
                    (cov[(i, j)] - c[(i, j)]).abs() <= 3.0 * se,
                    "cov[{i},{j}] = {} vs {} (se {se})",
                    cov[(i, j)],
                    c[(i, j)]
                );
            }
        }
    }

    #[test]
    fn factor_draw_mean_matches_dense_mean() {
        let n = 4;
        let data = tiny_dataset(n, 1, 1, 18);
        let factor = nngp_for(data.locs(), 6.0, n - 1);
        let factors = vec![factor];
        let lam = 1.2;
        let sig2 = 0.5;
        let beta = DMatrix::from_element(1, 1, -0.4);
        let state = ModelState {
            beta: beta.clone(),
            lambda: DMatrix::from_element(1, 1, lam),
            sigma2: DVector::from_element(1, sig2),
            factors: DMatrix::zeros(n, 1),
        };
        let (system, rhs) = build_factor_system(&state, &data, &factors).unwrap();
        let opts = LsmrOptions::for_columns(n);

        let c = dense_correlation(data.locs(), 6.0);
        let prec = c.try_inverse().unwrap();
        let gram_inv = (prec + DMatrix::identity(n, n) * (lam * lam / sig2))
            .try_inverse()
            .unwrap();
        let resid = data.y() - data.x() * &beta;
        let expected = &gram_inv * (resid * (lam / sig2));

        let draws = 20_000;
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let mut sum: DVector<f64> = DVector::zeros(n);
        let mut sum_sq: DVector<f64> = DVector::zeros(n);
        for _ in 0..draws {
            let d = sample_factors(&system, &rhs, &opts, &mut rng).unwrap();
            for i in 0..n {
                sum[i] += d.factors[(i, 0)];
                sum_sq[i] += d.factors[(i, 0)] * d.factors[(i, 0)];
            }
        }
        let nn = draws as f64;
        for i in 0..n {
            let mean = sum[i] / nn;
            let var = sum_sq[i] / nn - mean * mean;
            let se = (var / nn).sqrt();
            assert!(
                (mean - expected[(i, 0)]).abs() <= 3.0 * se,
                "mean[{i}] {mean} vs {} (se {se})",
                expected[(i, 0)]
            );
        }
    }

    // ---- conjugate updates --------------------------------------------------

    fn informative_priors(p: usize, k: usize, q: usize, seed: u64) -> PriorSpec {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut spd = |dim: usize| {
            let a = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() - 0.5);
            &a * a.transpose() + DMatrix::identity(dim, dim) * 0.8
        };
        let beta_cov = spd(p);
        let lambda_cov = spd(k);
        PriorSpec {
            beta: CoeffPrior::Normal {
                mean: random_matrix(p, q, seed ^ 21),
                cov: beta_cov,
            },
            lambda: CoeffPrior::Normal {
                mean: random_matrix(k, q, seed ^ 22),
                cov: lambda_cov,
            },
            ig_shape: 2.0,
            ig_scale: DVector::from_element(q, 1.0),
            kernels: (0..k).map(|_| Kernel::exponential(6.0).unwrap()).collect(),
            neighbors: 15,
        }
    }

    #[test]
    fn a_star_formula() {
        let n = 2000;
        let data = tiny_dataset(n, 1, 1, 23);
        let f = project_factors(&random_matrix(n, 1, 24)).unwrap();
        let priors = PriorSpec::flat(2.0, 1.0, 1, vec![Kernel::exponential(6.0).unwrap()]);
        let params = conditional_mniw_params(&f, &data, &priors).unwrap();
        assert_eq!(params.a_star, 1002.0);
    }

    #[test]
    fn zero_residuals_leave_b_unchanged() {
        let n = 30;
        let locs = random_locs(n, 25);
        let mut x = random_matrix(n, 2, 26);
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let f = project_factors(&random_matrix(n, 2, 27)).unwrap();
        let gamma_true = random_matrix(4, 3, 28);
        let mut design = DMatrix::zeros(n, 4);
        design.view_mut((0, 0), (n, 2)).copy_from(&x);
        design.view_mut((0, 2), (n, 2)).copy_from(&f);
        let y = &design * &gamma_true;
        let data = Dataset::new(x, y, locs).unwrap();
        let priors = PriorSpec::flat(
            2.0,
            1.0,
            3,
            vec![
                Kernel::exponential(4.0).unwrap(),
                Kernel::exponential(6.0).unwrap(),
            ],
        );
        let params = conditional_mniw_params(&f, &data, &priors).unwrap();
        for j in 0..3 {
            assert!((params.b_star[j] - priors.ig_scale[j]).abs() < 1e-12);
        }
        assert!((&params.mu_star - &gamma_true).amax() < 1e-10);
    }

    #[test]
    fn matches_dense_brute_force_construction() {
        // n=12, p=1, K=1, q=2, informative priors.
        let n = 12;
        let data = tiny_dataset(n, 1, 2, 29);
        let f = project_factors(&random_matrix(n, 1, 30)).unwrap();
        let priors = informative_priors(1, 1, 2, 31);
        let params = conditional_mniw_params(&f, &data, &priors).unwrap();

        // Brute force: materialize X*, Y* and run plain normal equations.
        let (beta_mean, beta_cov) = match &priors.beta {
            CoeffPrior::Normal { mean, cov } => (mean.clone(), cov.clone()),
            _ => unreachable!(),
        };
        let (lam_mean, lam_cov) = match &priors.lambda {
            CoeffPrior::Normal { mean, cov } => (mean.clone(), cov.clone()),
            _ => unreachable!(),
        };
        let lb_inv = Cholesky::new(beta_cov).unwrap().l().try_inverse().unwrap();
        let ll_inv = Cholesky::new(lam_cov).unwrap().l().try_inverse().unwrap();
        let mut xs = DMatrix::zeros(n + 2, 2);
        xs.view_mut((0, 0), (n, 1)).copy_from(data.x());
        xs.view_mut((0, 1), (n, 1)).copy_from(&f);
        xs.view_mut((n, 0), (1, 1)).copy_from(&lb_inv);
        xs.view_mut((n + 1, 1), (1, 1)).copy_from(&ll_inv);
        let mut ys = DMatrix::zeros(n + 2, 2);
        ys.view_mut((0, 0), (n, 2)).copy_from(data.y());
        ys.view_mut((n, 0), (1, 2)).copy_from(&(&lb_inv * &beta_mean));
        ys.view_mut((n + 1, 0), (1, 2))
            .copy_from(&(&ll_inv * &lam_mean));

        let gram = xs.transpose() * &xs;
        let vstar = gram.clone().try_inverse().unwrap();
        let mu = &vstar * (xs.transpose() * &ys);
        let resid = &ys - &xs * &mu;

        assert!((&params.mu_star - &mu).amax() < 1e-10);
        assert!((params.vstar() - vstar).amax() < 1e-10);
        for j in 0..2 {
            let expect = priors.ig_scale[j] + 0.5 * resid.column(j).norm_squared();
            assert!((params.b_star[j] - expect).abs() < 1e-10);
        }
        assert_eq!(params.a_star, 2.0 + 6.0);
    }

    #[test]
    fn noise_variance_draw_moments() {
        let params = MniwParams::from_parts(
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            1002.0,
            DVector::from_column_slice(&[500.5, 500.5]),
            1,
        );
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let draws = 50_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            sum += sample_noise_variances(&params, &mut rng).unwrap()[0];
        }
        let mean = sum / draws as f64;
        let a: f64 = 1002.0;
        let b: f64 = 500.5;
        let expect = b / (a - 1.0);
        let sd = (b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0))).sqrt();
        let se = sd / (draws as f64).sqrt();
        assert!((mean - expect).abs() <= 3.0 * se, "mean {mean} vs {expect}");

        let params_small = MniwParams::from_parts(
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            3.0,
            DVector::from_column_slice(&[2.0, 2.0]),
            1,
        );
        let mut sum = 0.0;
        for _ in 0..draws {
            sum += sample_noise_variances(&params_small, &mut rng).unwrap()[0];
        }
        let mean = sum / draws as f64;
        // mean b/(a-1) = 1, sd^2 = b^2 / ((a-1)^2 (a-2)) = 4.
        let se = 2.0 / (draws as f64).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * se, "mean {mean} vs 1.0");
    }

    #[test]
    fn noise_variance_draw_deterministic() {
        let params = MniwParams::from_parts(
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            5.0,
            DVector::from_column_slice(&[1.0, 2.0]),
            1,
        );
        let a = sample_noise_variances(&params, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = sample_noise_variances(&params, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coefficient_draw_zero_shock_is_mean() {
        let n = 20;
        let data = tiny_dataset(n, 2, 2, 34);
        let f = project_factors(&random_matrix(n, 1, 35)).unwrap();
        let priors = informative_priors(2, 1, 2, 36);
        let params = conditional_mniw_params(&f, &data, &priors).unwrap();
        let (beta, lambda) = coefficients_from_shock(&params, &DMatrix::zeros(3, 2)).unwrap();
        assert!((beta - params.mu_star.rows(0, 2)).amax() < 1e-14);
        assert!((lambda - params.mu_star.rows(2, 1)).amax() < 1e-14);
    }

    #[test]
    fn coefficient_draw_covariance() {
        // 2 x 2 instance: cov(gamma[i,j], gamma[k,l]) = V*[i,k] sigma_j^2 1{j=l}.
        let mut rng = ChaCha20Rng::seed_from_u64(37);
        let a = random_matrix(2, 2, 38) + DMatrix::identity(2, 2) * 1.5;
        let gram = &a * a.transpose();
        let chol = Cholesky::new(gram.clone()).unwrap();
        let params = MniwParams::from_parts(
            random_matrix(2, 2, 39),
            chol.l(),
            3.0,
            DVector::from_element(2, 1.0),
            1,
        );
        let vstar = params.vstar();
        let sigma2 = DVector::from_column_slice(&[0.6, 2.0]);
        let draws = 50_000;
        let mut sum = [0.0; 4];
        let mut sum_outer = [[0.0; 4]; 4];
        for _ in 0..draws {
            let (beta, lambda) = sample_coefficients(&params, &sigma2, &mut rng).unwrap();
            let g = [beta[(0, 0)], lambda[(0, 0)], beta[(0, 1)], lambda[(0, 1)]];
            for i in 0..4 {
                sum[i] += g[i];
                for j in 0..4 {
                    sum_outer[i][j] += g[i] * g[j];
                }
            }
        }
        let nn = draws as f64;
        // Entry t encodes (row i, col j) with i = t % 2, j = t / 2.
        for t in 0..4 {
            for s in 0..4 {
                let (i, j) = (t % 2, t / 2);
                let (k, l) = (s % 2, s / 2);
                let expect = if j == l { vstar[(i, k)] * sigma2[j] } else { 0.0 };
                let got = sum_outer[t][s] / nn - (sum[t] / nn) * (sum[s] / nn);
                let var_t = vstar[(i, i)] * sigma2[j];
                let var_s = vstar[(k, k)] * sigma2[l];
                let se = ((var_t * var_s + expect * expect) / nn).sqrt();
                assert!(
                    (got - expect).abs() <= 3.0 * se,
                    "cov[{t},{s}] {got} vs {expect} (se {se})"
                );
            }
        }
    }

    #[test]
    fn coefficient_draw_standard_normal_case() {
        // V* = I and unit noise variances: vec(gamma) - vec(mu*) is iid
        // standard normal.
        let params = MniwParams::from_parts(
            DMatrix::from_element(2, 2, 0.7),
            DMatrix::identity(2, 2),
            3.0,
            DVector::from_element(2, 1.0),
            1,
        );
        let sigma2 = DVector::from_element(2, 1.0);
        let mut rng = ChaCha20Rng::seed_from_u64(40);
        let draws = 50_000;
        let mut sum = [0.0; 4];
        let mut sum_sq = [0.0; 4];
        for _ in 0..draws {
            let (beta, lambda) = sample_coefficients(&params, &sigma2, &mut rng).unwrap();
            let g = [beta[(0, 0)], lambda[(0, 0)], beta[(0, 1)], lambda[(0, 1)]];
            for i in 0..4 {
                sum[i] += g[i] - 0.7;
                sum_sq[i] += (g[i] - 0.7) * (g[i] - 0.7);
            }
        }
        let nn = draws as f64;
        for i in 0..4 {
            let mean = sum[i] / nn;
            let var = sum_sq[i] / nn - mean * mean;
            assert!(mean.abs() <= 3.0 / nn.sqrt(), "mean {mean}");
            assert!((var - 1.0).abs() <= 3.0 * (2.0 / nn).sqrt(), "var {var}");
        }
    }

    // ---- full-covariance oracle ----------------------------------------------

    #[test]
    fn full_sigma_oracle_consistency() {
        let n = 12;
        let q = 2;
        let data = tiny_dataset(n, 1, q, 41);
        let f = project_factors(&random_matrix(n, 1, 42)).unwrap();
        let priors = informative_priors(1, 1, q, 43);
        let psi = DMatrix::identity(q, q) * 1.3;
        let nu = q as f64 + 2.0;
        let full = conditional_mniw_full_sigma_oracle(&f, &data, &priors, &psi, nu).unwrap();
        assert_eq!(full.nu_star, nu + n as f64);

        // psi* - psi is a Gram matrix, hence symmetric PSD.
        let diff = &full.psi_star - &psi;
        assert!((diff.transpose() - &diff).amax() < 1e-12);
        let eig = diff.clone().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&e| e > -1e-10));

        let diag = conditional_mniw_params(&f, &data, &priors).unwrap();
        assert!((&full.mu_star - &diag.mu_star).amax() < 1e-10);
        assert!((&full.v_star - diag.vstar()).amax() < 1e-10);
    }

    #[test]
    fn full_sigma_oracle_rejects_large_n() {
        let data = tiny_dataset(250, 1, 1, 44);
        let f = project_factors(&random_matrix(250, 1, 45)).unwrap();
        let priors = PriorSpec::flat(2.0, 1.0, 1, vec![Kernel::exponential(6.0).unwrap()]);
        let psi = DMatrix::identity(1, 1);
        assert!(conditional_mniw_full_sigma_oracle(&f, &data, &priors, &psi, 3.0).is_err());
    }

    // ---- misc invariants -----------------------------------------------------

    #[test]
    fn fitted_product_invariant_under_signed_permutation() {
        let n = 40;
        let k = 3;
        let q = 4;
        let f = project_factors(&random_matrix(n, k, 46)).unwrap();
        let lambda = random_matrix(k, q, 47);
        let product = &f * &lambda;
        // Signed permutation: reverse factor order, flip the middle sign.
        let mut perm = DMatrix::zeros(k, k);
        perm[(0, 2)] = 1.0;
        perm[(1, 1)] = -1.0;
        perm[(2, 0)] = 1.0;
        let f2 = &f * &perm;
        let l2 = perm.transpose() * &lambda;
        assert!((f2 * l2 - product).amax() < 1e-12);
    }

    #[test]
    fn dataset_validation() {
        let locs = random_locs(10, 48);
        let x = DMatrix::from_element(10, 2, 1.0); // rank deficient
        let y = random_matrix(10, 2, 49);
        assert!(Dataset::new(x, y.clone(), locs.clone()).is_err());

        let x = random_matrix(10, 2, 50);
        let bad_y = random_matrix(9, 2, 51);
        assert!(Dataset::new(x.clone(), bad_y, locs.clone()).is_err());

        let mut with_intercept = x.clone();
        for i in 0..10 {
            with_intercept[(i, 0)] = 1.0;
        }
        let data = Dataset::new(with_intercept, y, locs).unwrap();
        assert_eq!(data.intercept_col(), Some(0));
    }

    #[test]
    fn gibbs_sweep_conditionals_match_dense_references() {
        // One consolidated check on a tiny instance: the factor-draw mean
        // and covariance and the coefficient/noise conditionals all agree
        // with independent dense constructions.
        let n = 8;
        let data = tiny_dataset(n, 1, 2, 52);
        let factor = nngp_for(data.locs(), 6.0, n - 1);
        let factors = vec![factor];
        let state = ModelState {
            beta: random_matrix(1, 2, 53),
            lambda: random_matrix(1, 2, 54),
            sigma2: DVector::from_column_slice(&[0.4, 1.1]),
            factors: DMatrix::zeros(n, 1),
        };
        let (system, rhs) = build_factor_system(&state, &data, &factors).unwrap();

        // Dense factor conditional.
        let c = dense_correlation(data.locs(), 6.0);
        let prec = c.try_inverse().unwrap();
        let mut gram = prec.clone();
        for j in 0..2 {
            let w = state.lambda[(0, j)] * state.lambda[(0, j)] / state.sigma2[j];
            for i in 0..n {
                gram[(i, i)] += w;
            }
        }
        let resid = data.y() - data.x() * &state.beta;
        let mut lin = DVector::zeros(n);
        for j in 0..2 {
            lin += resid.column(j) * (state.lambda[(0, j)] / state.sigma2[j]);
        }
        let cov_expect = gram.try_inverse().unwrap();
        let mean_expect = &cov_expect * lin;

        let zero = vec![0.0; system.nrows()];
        let mean_got =
            solve_factors_with_noise(&system, &rhs, &zero, &LsmrOptions::for_columns(n)).unwrap();
        assert!((mean_got.factors.column(0) - &mean_expect).amax() < 1e-8);

        // Covariance via the materialized operator.
        let xt = dense_operator_matrix(&system);
        let cov_got = (xt.transpose() * &xt).try_inverse().unwrap();
        assert!((cov_got - cov_expect).amax() < 1e-8);

        // Coefficient conditional against a dense normal-equations solve.
        let ftil = project_factors(&random_matrix(n, 1, 55)).unwrap();
        let priors = PriorSpec::flat(2.0, 1.0, 2, vec![Kernel::exponential(6.0).unwrap()]);
        let params = conditional_mniw_params(&ftil, &data, &priors).unwrap();
        let mut xs = DMatrix::zeros(n, 2);
        xs.view_mut((0, 0), (n, 1)).copy_from(data.x());
        xs.view_mut((0, 1), (n, 1)).copy_from(&ftil);
        let gram2 = xs.transpose() * &xs;
        let mu2 = gram2.clone().try_inverse().unwrap() * (xs.transpose() * data.y());
        assert!((&params.mu_star - &mu2).amax() < 1e-8);
        assert_relative_eq!(params.a_star, 2.0 + n as f64 / 2.0);
    }
}
