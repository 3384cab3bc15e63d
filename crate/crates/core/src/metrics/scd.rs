use crate::error::Result;
use crate::image::ImageMatrix;
use crate::Matrix;

use super::ensure_triplet;

/// Pearson correlation over all entries. Defined as 0 when either argument is
/// constant.
pub fn pearson(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let is_constant = |m: &Matrix| m.iter().all(|&v| v == m[0]);
    if a.is_empty() || is_constant(a) || is_constant(b) {
        return 0.0;
    }
    let n = a.len() as f64;
    let mean_a = a.sum() / n;
    let mean_b = b.sum() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b.iter()) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let denom = (saa * sbb).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (sab / denom).clamp(-1.0, 1.0)
}

/// Sum of correlations of differences: `r(F − I2, I1) + r(F − I1, I2)`.
pub fn scd(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<f64> {
    ensure_triplet(f, i1, i2)?;
    let (f, a, b) = (f.as_matrix(), i1.as_matrix(), i2.as_matrix());
    Ok(pearson(&(f - b), a) + pearson(&(f - a), b))
}
