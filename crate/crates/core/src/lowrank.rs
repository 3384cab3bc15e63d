//! Proximal kernels for the ℓ1 and nuclear norms.

use crate::error::{Error, Result};
use crate::Matrix;

/// Iteration cap handed to the SVD; zero means "until convergence".
const SVD_MAX_SWEEPS: usize = 0;

/// Largest absolute entry, or 0 for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if let Some(pos) = m.iter().position(|v| !v.is_finite()) {
        let (r, c) = (pos % m.nrows(), pos / m.nrows());
        return Err(Error::invalid(format!(
            "{what} has a non-finite entry at ({r}, {c})"
        )));
    }
    Ok(())
}

fn ensure_threshold(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!(
            "threshold must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn shrink(v: f64, tau: f64) -> f64 {
    v.signum() * (v.abs() - tau).max(0.0)
}

/// Entrywise shrinkage `sign(m)·max(|m| − tau, 0)`, the proximal map of `tau·‖·‖₁`.
pub fn soft_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    ensure_threshold(tau)?;
    ensure_finite(m, "soft_threshold input")?;
    Ok(m.map(|v| shrink(v, tau)))
}

/// Singular value thresholding, the proximal map of `tau·‖·‖_*`.
///
/// Computes a thin SVD `M = UΣVᵀ` and returns `U·max(Σ − tau, 0)·Vᵀ`, keeping
/// only the singular triplets that survive the shrinkage.
pub fn svt(m: &Matrix, tau: f64) -> Result<Matrix> {
    ensure_threshold(tau)?;
    ensure_finite(m, "svt input")?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(m.clone());
    }

    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| {
            Error::numerical(format!("SVD of a {rows}x{cols} matrix failed to converge"))
        })?;
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("Vᵀ requested");

    let mut out = Matrix::zeros(rows, cols);
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        let s = sigma - tau;
        if s <= 0.0 {
            continue;
        }
        // rank-one update out += s · u_k · v_kᵀ
        out.ger(s, &u.column(k), &v_t.row(k).transpose(), 1.0);
    }
    Ok(out)
}
