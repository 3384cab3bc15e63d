//! Inexact augmented Lagrangian solver for
//!
//! ```text
//! min ‖Z‖_* + ‖L‖_* + λ‖E‖₁   s.t.  X = XZ + LX + E
//! ```
//!
//! The nuclear-norm terms are split off onto auxiliaries `J = Z` and `S = L`,
//! giving three equality constraints with multipliers `Y1`, `Y2`, `Y3`. Each
//! iteration takes a proximal step on `J`, `S` and `E`, a closed-form least
//! squares step on `Z` and `L`, then a dual ascent step with a penalty `μ`
//! that grows geometrically up to `mu_max`.

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lowrank::{ensure_finite, max_abs, shrink, svt};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Weight of the ℓ1 term on `E`.
    pub lambda: f64,
    pub mu0: f64,
    pub rho: f64,
    pub mu_max: f64,
    /// Stopping tolerance on the max-abs norm of every constraint residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.8,
            mu0: 1e-6,
            rho: 1.1,
            mu_max: 1e10,
            tol: 1e-7,
            max_iter: 2000,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.lambda) {
            return Err(Error::invalid(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !positive(self.mu0) || !positive(self.mu_max) || self.mu0 >= self.mu_max {
            return Err(Error::invalid(format!(
                "penalty schedule needs 0 < mu0 < mu_max, got mu0={} mu_max={}",
                self.mu0, self.mu_max
            )));
        }
        if !(self.rho.is_finite() && self.rho > 1.0) {
            return Err(Error::invalid(format!("rho must be > 1, got {}", self.rho)));
        }
        if !positive(self.tol) {
            return Err(Error::invalid(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LatLrrSolution {
    /// Low-rank coefficients, `cols × cols`.
    pub z: Matrix,
    /// Saliency (projection) coefficients, `rows × rows`.
    pub l: Matrix,
    /// Sparse residual, same shape as the data.
    pub e: Matrix,
    pub iterations: usize,
    /// `‖X − XZ − LX − E‖_max` of the returned iterate.
    pub final_residual: f64,
    /// `max(‖Z − J‖_max, ‖L − S‖_max)` of the returned iterate.
    pub aux_residual: f64,
    pub converged: bool,
    /// Constraint residual `‖X − XZ − LX − E‖_max` after every iteration.
    pub residual_history: Vec<f64>,
}

impl LatLrrSolution {
    /// The low-rank part `XZ`.
    pub fn low_rank(&self, x: &Matrix) -> Matrix {
        x * &self.z
    }

    /// The saliency part `LX`.
    pub fn saliency(&self, x: &Matrix) -> Matrix {
        &self.l * x
    }
}

struct Iterate {
    z: Matrix,
    l: Matrix,
    e: Matrix,
    primary: f64,
    aux: f64,
}

fn spd_factor(m: Matrix, what: &str) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    Cholesky::new(m).ok_or_else(|| Error::numerical(format!("Cholesky factorization of {what} failed")))
}

/// Iterate-level failures inside the loop are numerical, whatever the kernel
/// that noticed them calls them.
fn diverged(iter: usize, err: Error) -> Error {
    match err {
        Error::InvalidInput(msg) => Error::numerical(format!("iteration {iter}: {msg}")),
        other => other,
    }
}

fn check_finite_iterate(iter: usize, mats: [&Matrix; 3]) -> Result<()> {
    if mats.iter().any(|m| m.iter().any(|v| !v.is_finite())) {
        return Err(Error::numerical(format!("iterates became non-finite at iteration {iter}")));
    }
    Ok(())
}

/// Solves the LatLRR problem for the data matrix `x`.
///
/// Returns a converged solution once all three constraint residuals drop to
/// `cfg.tol`. If `cfg.max_iter` runs out first, the iterate with the smallest
/// residual is returned with `converged == false`.
pub fn solve_latlrr(x: &Matrix, cfg: &SolverConfig) -> Result<LatLrrSolution> {
    cfg.validate()?;
    let (d, n) = x.shape();
    if d < 2 || n < 2 {
        return Err(Error::invalid(format!("data matrix must be at least 2x2, got {d}x{n}")));
    }
    ensure_finite(x, "data matrix")?;

    let xt = x.transpose();
    // Both systems depend on X only, so factor once.
    let chol_z = spd_factor(Matrix::identity(n, n) + &xt * x, "I + XᵀX")?;
    let chol_l = spd_factor(Matrix::identity(d, d) + x * &xt, "I + XXᵀ")?;

    let mut z = Matrix::zeros(n, n);
    let mut l = Matrix::zeros(d, d);
    let mut e = Matrix::zeros(d, n);
    let mut y1 = Matrix::zeros(d, n);
    let mut y2 = Matrix::zeros(n, n);
    let mut y3 = Matrix::zeros(d, d);
    let mut mu = cfg.mu0;

    let mut best: Option<Iterate> = None;
    let mut history = Vec::new();

    for iter in 1..=cfg.max_iter {
        let inv_mu = 1.0 / mu;

        let j = svt(&(&z + &y2 * inv_mu), inv_mu).map_err(|e| diverged(iter, e))?;
        let s = svt(&(&l + &y3 * inv_mu), inv_mu).map_err(|e| diverged(iter, e))?;

        // Z ← (I + XᵀX)⁻¹ (Xᵀ(X − LX − E + Y1/μ) + J − Y2/μ)
        let lx = &l * x;
        let mut rhs_z = &xt * (x - &lx - &e + &y1 * inv_mu);
        rhs_z += &j;
        rhs_z -= &y2 * inv_mu;
        z = chol_z.solve(&rhs_z);

        // L ← ((X − XZ − E + Y1/μ)Xᵀ + S − Y3/μ)(I + XXᵀ)⁻¹, solved from the
        // transposed system since the factor is symmetric.
        let xz = x * &z;
        let mut rhs_l = (x - &xz - &e + &y1 * inv_mu) * &xt;
        rhs_l += &s;
        rhs_l -= &y3 * inv_mu;
        l = chol_l.solve(&rhs_l.transpose()).transpose();

        let lx = &l * x;
        let data_gap = x - &xz - &lx;
        let thresh = cfg.lambda * inv_mu;
        e = data_gap.zip_map(&y1, |g, y| shrink(g + y * inv_mu, thresh));

        check_finite_iterate(iter, [&z, &l, &e])?;

        let leq1 = data_gap - &e;
        let leq2 = &z - &j;
        let leq3 = &l - &s;
        let primary = max_abs(&leq1);
        let aux = max_abs(&leq2).max(max_abs(&leq3));
        history.push(primary);

        let stop = primary.max(aux);
        if stop <= cfg.tol {
            return Ok(LatLrrSolution {
                z,
                l,
                e,
                iterations: iter,
                final_residual: primary,
                aux_residual: aux,
                converged: true,
                residual_history: history,
            });
        }
        if best.as_ref().map_or(true, |b| stop < b.primary.max(b.aux)) {
            best = Some(Iterate { z: z.clone(), l: l.clone(), e: e.clone(), primary, aux });
        }

        y1 += &leq1 * mu;
        y2 += &leq2 * mu;
        y3 += &leq3 * mu;
        mu = (mu * cfg.rho).min(cfg.mu_max);
    }

    let best = best.expect("max_iter > 0 guarantees one iterate");
    Ok(LatLrrSolution {
        z: best.z,
        l: best.l,
        e: best.e,
        iterations: cfg.max_iter,
        final_residual: best.primary,
        aux_residual: best.aux,
        converged: false,
        residual_history: history,
    })
}
