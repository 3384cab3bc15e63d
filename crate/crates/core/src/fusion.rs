//! Fusion rules: weighted average of the low-rank parts, weighted sum of the
//! saliency parts, and reconstruction as their sum.

use serde::{Deserialize, Serialize};

use crate::decomposition::{decompose, ImageDecomposition};
use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, ImageMatrix};
use crate::solver::SolverConfig;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    /// Infrared low-rank weight.
    pub w1: f64,
    /// Visible low-rank weight.
    pub w2: f64,
    /// Infrared saliency weight.
    pub s1: f64,
    /// Visible saliency weight.
    pub s2: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self { w1: 0.5, w2: 0.5, s1: 1.0, s2: 1.0 }
    }
}

impl FusionWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w1", self.w1), ("w2", self.w2), ("s1", self.s1), ("s2", self.s2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        for (name, v) in [("w1", self.w1), ("w2", self.w2)] {
            if v > 1.0 {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

fn weighted_sum(a: &Matrix, b: &Matrix, wa: f64, wb: f64, what: &str) -> Result<Matrix> {
    ensure_same_dims(a, b, what)?;
    Ok(a.zip_map(b, |x, y| wa * x + wb * y))
}

/// `w1·a + w2·b`, elementwise.
pub fn fuse_low_rank(a: &Matrix, b: &Matrix, w: &FusionWeights) -> Result<Matrix> {
    weighted_sum(a, b, w.w1, w.w2, "fuse_low_rank")
}

/// `s1·a + s2·b`, elementwise.
pub fn fuse_saliency(a: &Matrix, b: &Matrix, w: &FusionWeights) -> Result<Matrix> {
    weighted_sum(a, b, w.s1, w.s2, "fuse_saliency")
}

#[derive(Debug, Clone)]
pub struct FusedResult {
    /// `fused_raw` clamped to `[0, 1]`.
    pub fused: ImageMatrix,
    pub fused_raw: Matrix,
    pub fused_low_rank: Matrix,
    pub fused_saliency: Matrix,
}

/// Adds the fused parts. Clamping happens here and nowhere earlier.
pub fn reconstruct(f_lrr: &Matrix, f_s: &Matrix) -> Result<FusedResult> {
    ensure_same_dims(f_lrr, f_s, "reconstruct")?;
    let fused_raw = f_lrr + f_s;
    let fused = ImageMatrix::from_clamped(&fused_raw)?;
    Ok(FusedResult {
        fused,
        fused_raw,
        fused_low_rank: f_lrr.clone(),
        fused_saliency: f_s.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct FusionOutput {
    pub result: FusedResult,
    pub ir: ImageDecomposition,
    pub vis: ImageDecomposition,
}

impl FusionOutput {
    /// Both source decompositions reached the solver tolerance.
    pub fn converged(&self) -> bool {
        self.ir.converged && self.vis.converged
    }
}

/// Decomposes both sources (concurrently), fuses each stream and reconstructs.
pub fn fuse_pipeline(
    ir: &ImageMatrix,
    vis: &ImageMatrix,
    cfg: &SolverConfig,
    w: &FusionWeights,
) -> Result<FusionOutput> {
    if ir.dims() != vis.dims() {
        return Err(Error::invalid(format!(
            "source images must be registered and equal-sized, got {:?} and {:?}",
            ir.dims(),
            vis.dims()
        )));
    }
    w.validate()?;
    cfg.validate()?;

    let (dec_ir, dec_vis) = rayon::join(|| decompose(ir, cfg), || decompose(vis, cfg));
    let (dec_ir, dec_vis) = (dec_ir?, dec_vis?);

    let f_lrr = fuse_low_rank(&dec_ir.low_rank, &dec_vis.low_rank, w)?;
    let f_s = fuse_saliency(&dec_ir.saliency, &dec_vis.saliency, w)?;
    let result = reconstruct(&f_lrr, &f_s)?;
    Ok(FusionOutput { result, ir: dec_ir, vis: dec_vis })
}
