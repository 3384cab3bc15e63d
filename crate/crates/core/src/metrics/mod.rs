//! Objective fusion quality metrics.
//!
//! All metrics take the fused image first, followed by the two sources, and
//! should be fed the clamped fused image (the pixels that get written out).

mod gradient;
mod scd;
mod ssim;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageMatrix;

pub use gradient::{nabf, qabf, EdgePreservation, SigmoidConstants, GRADIENT_EPS, QABF_CONSTANTS};
pub use scd::{pearson, scd};
pub use ssim::{ssim, ssim_a, SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Edge preservation, higher is better.
    pub qabf: f64,
    /// Sum of correlations of differences, higher is better.
    pub scd: f64,
    /// Mean SSIM against both sources, higher is better.
    pub ssim_a: f64,
    /// Fusion artifacts, lower is better.
    pub nabf: f64,
}

pub(crate) fn ensure_triplet(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<()> {
    if f.dims() != i1.dims() || f.dims() != i2.dims() {
        return Err(Error::invalid(format!(
            "metric inputs must share dimensions, got {:?}, {:?}, {:?}",
            f.dims(),
            i1.dims(),
            i2.dims()
        )));
    }
    Ok(())
}

/// Computes all four scores for one fused image.
pub fn evaluate(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<MetricsReport> {
    ensure_triplet(f, i1, i2)?;
    let edges = EdgePreservation::new(f, i1, i2)?;
    Ok(MetricsReport {
        qabf: edges.qabf(),
        scd: scd(f, i1, i2)?,
        ssim_a: ssim_a(f, i1, i2)?,
        nabf: edges.nabf(),
    })
}
