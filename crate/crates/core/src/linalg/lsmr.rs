//! LSMR iterative least-squares solver.
//!
//! Minimizes `||A x - b||` using only operator-vector and adjoint-vector
//! products, following Fong & Saunders, "LSMR: an iterative algorithm for
//! sparse least-squares problems" (SISC 2011). The normal-equation residual
//! norm `||A'(b - A x)||` is nonincreasing across iterations, which the
//! solver exposes through a per-iteration history.

use crate::error::{Error, Result};
use crate::linalg::LinearOperator;

#[derive(Debug, Clone, Copy)]
pub struct LsmrOptions {
    /// Relative tolerance on the operator side of the stopping rules.
    pub atol: f64,
    /// Relative tolerance on the right-hand-side residual.
    pub btol: f64,
    /// Hard iteration cap.
    pub max_iter: usize,
}

impl LsmrOptions {
    /// Defaults tied to the system width: `atol = btol = 1e-8`,
    /// `max_iter = 4 * ncols`.
    pub fn for_columns(ncols: usize) -> Self {
        Self {
            atol: 1e-8,
            btol: 1e-8,
            max_iter: 4 * ncols.max(1),
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `b` is zero (or `A'b` is zero): `x = 0` is the exact answer.
    ZeroSolution,
    /// `||b - Ax||` small enough for a consistent system.
    ResidualTolerance,
    /// `||A'(b - Ax)||` small enough for a least-squares solution.
    NormalEquationTolerance,
    /// The iteration cap was reached; the best iterate so far is returned.
    IterationLimit,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ZeroSolution => "zero solution",
            StopReason::ResidualTolerance => "residual tolerance",
            StopReason::NormalEquationTolerance => "normal-equation tolerance",
            StopReason::IterationLimit => "iteration limit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LsmrResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
    /// `||A' r||` estimate at entry to each iteration (index 0 = start).
    pub normar_history: Vec<f64>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scale(v: &mut [f64], s: f64) {
    for x in v.iter_mut() {
        *x *= s;
    }
}

/// Stable Givens rotation `(c, s, r)` with `r = hypot(a, b)`.
fn sym_ortho(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        if a == 0.0 {
            (1.0, 0.0, 0.0)
        } else {
            (a.signum(), 0.0, a.abs())
        }
    } else if a == 0.0 {
        (0.0, b.signum(), b.abs())
    } else if b.abs() > a.abs() {
        let tau = a / b;
        let s = b.signum() / (1.0 + tau * tau).sqrt();
        let c = s * tau;
        (c, s, b / s)
    } else {
        let tau = b / a;
        let c = a.signum() / (1.0 + tau * tau).sqrt();
        let s = c * tau;
        (c, s, a / c)
    }
}

/// Solves `min ||A x - b||` from a zero starting point.
///
/// Deterministic given its inputs; never forms `A'A`.
pub fn lsmr(op: &dyn LinearOperator, b: &[f64], opts: &LsmrOptions) -> Result<LsmrResult> {
    let m = op.nrows();
    let n = op.ncols();
    if b.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if !(opts.atol > 0.0) || !(opts.btol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "LSMR tolerances must be positive (atol={}, btol={})",
            opts.atol, opts.btol
        )));
    }

    let mut x = vec![0.0; n];
    let mut u = b.to_vec();
    let normb = norm2(&u);
    let mut beta = normb;
    let mut v = vec![0.0; n];
    let mut alpha = 0.0;
    if beta > 0.0 {
        scale(&mut u, 1.0 / beta);
        op.apply_transpose(&u, &mut v);
        alpha = norm2(&v);
        if alpha > 0.0 {
            scale(&mut v, 1.0 / alpha);
        }
    }

    let mut normar = alpha * beta;
    let mut history = vec![normar];
    if normar == 0.0 {
        return Ok(LsmrResult {
            x,
            iterations: 0,
            stop: StopReason::ZeroSolution,
            normar_history: history,
        });
    }

    // Golub-Kahan state and the two rotation chains of the algorithm.
    let mut h = v.clone();
    let mut hbar = vec![0.0; n];
    let mut zetabar = alpha * beta;
    let mut alphabar = alpha;
    let mut rho = 1.0;
    let mut rhobar = 1.0;
    let mut cbar = 1.0;
    let mut sbar = 0.0;

    // Residual-norm estimation state.
    let mut betadd = beta;
    let mut betad = 0.0;
    let mut rhodold = 1.0;
    let mut tautildeold = 0.0;
    let mut thetatilde = 0.0;
    let mut zeta = 0.0;

    let mut norm_a2 = alpha * alpha;

    let mut tmp_m = vec![0.0; m];
    let mut tmp_n = vec![0.0; n];

    let mut stop = StopReason::IterationLimit;
    let mut iterations = opts.max_iter;

    for itn in 1..=opts.max_iter {
        // Next Golub-Kahan step: u = A v - alpha u, v = A' u - beta v.
        op.apply(&v, &mut tmp_m);
        for (ui, ti) in u.iter_mut().zip(&tmp_m) {
            *ui = ti - alpha * *ui;
        }
        beta = norm2(&u);
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
        }
        op.apply_transpose(&u, &mut tmp_n);
        for (vi, ti) in v.iter_mut().zip(&tmp_n) {
            *vi = ti - beta * *vi;
        }
        alpha = norm2(&v);
        if alpha > 0.0 {
            scale(&mut v, 1.0 / alpha);
        }

        // Rotation eliminating the subdiagonal of the bidiagonal factor.
        let rhoold = rho;
        let (c, s, rho_new) = sym_ortho(alphabar, beta);
        rho = rho_new;
        let thetanew = s * alpha;
        alphabar = c * alpha;

        // Second rotation chain producing the LSMR iterate.
        let rhobarold = rhobar;
        let zetaold = zeta;
        let thetabar = sbar * rho;
        let (cbar_new, sbar_new, rhobar_new) = sym_ortho(cbar * rho, thetanew);
        cbar = cbar_new;
        sbar = sbar_new;
        rhobar = rhobar_new;
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        // Update search directions and the iterate.
        let hbar_coef = thetabar * rho / (rhoold * rhobarold);
        for (hb, hi) in hbar.iter_mut().zip(&h) {
            *hb = hi - hbar_coef * *hb;
        }
        let x_coef = zeta / (rho * rhobar);
        for (xi, hb) in x.iter_mut().zip(&hbar) {
            *xi += x_coef * hb;
        }
        let h_coef = thetanew / rho;
        for (hi, vi) in h.iter_mut().zip(&v) {
            *hi = vi - h_coef * *hi;
        }

        // Residual-norm estimate (no damping, so betacheck = 0).
        let betahat = c * betadd;
        betadd = -s * betadd;
        let thetatildeold = thetatilde;
        let (ctildeold, stildeold, rhotildeold) = sym_ortho(rhodold, thetabar);
        thetatilde = stildeold * rhobar;
        rhodold = ctildeold * rhobar;
        betad = -stildeold * betad + ctildeold * betahat;
        tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
        let taud = (zeta - thetatilde * tautildeold) / rhodold;
        let normr = ((betad - taud) * (betad - taud) + betadd * betadd).sqrt();

        norm_a2 += beta * beta;
        let norm_a = norm_a2.sqrt();
        norm_a2 += alpha * alpha;

        normar = zetabar.abs();
        history.push(normar);
        let normx = norm2(&x);

        // Stopping rules of the reference algorithm.
        let test1 = if normb > 0.0 { normr / normb } else { 0.0 };
        let test2 = if norm_a * normr > 0.0 {
            normar / (norm_a * normr)
        } else {
            0.0
        };
        let t1 = test1 / (1.0 + norm_a * normx / normb.max(f64::MIN_POSITIVE));
        let rtol = opts.btol + opts.atol * norm_a * normx / normb.max(f64::MIN_POSITIVE);

        if test2 <= opts.atol || 1.0 + test2 <= 1.0 {
            stop = StopReason::NormalEquationTolerance;
            iterations = itn;
            break;
        }
        if t1 <= rtol || test1 <= rtol || 1.0 + t1 <= 1.0 {
            stop = StopReason::ResidualTolerance;
            iterations = itn;
            break;
        }
    }

    Ok(LsmrResult {
        x,
        iterations,
        stop,
        normar_history: history,
    })
}
