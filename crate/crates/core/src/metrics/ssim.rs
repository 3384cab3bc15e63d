//! Mean structural similarity with an 11×11 Gaussian window (σ = 1.5),
//! evaluated at every window position that fits inside the image.

use crate::error::{Error, Result};
use crate::image::ImageMatrix;
use crate::Matrix;

use super::ensure_triplet;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
/// Dynamic range of normalized pixels.
const DYNAMIC_RANGE: f64 = 1.0;

/// Odd window size that fits in a `h × w` image.
fn window_size(h: usize, w: usize) -> usize {
    let size = SSIM_WINDOW.min(h).min(w);
    if size % 2 == 0 {
        size - 1
    } else {
        size
    }
}

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
fn gaussian_taps(size: usize) -> Vec<f64> {
    let center = (size / 2) as f64;
    let taps: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - center;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

/// Separable "valid" filtering.
fn filter_valid(m: &Matrix, taps: &[f64]) -> Matrix {
    let k = taps.len();
    let (h, w) = m.shape();
    let (oh, ow) = (h + 1 - k, w + 1 - k);
    let horizontal = Matrix::from_fn(h, ow, |r, c| (0..k).map(|t| taps[t] * m[(r, c + t)]).sum());
    Matrix::from_fn(oh, ow, |r, c| (0..k).map(|t| taps[t] * horizontal[(r + t, c)]).sum())
}

/// Local SSIM map over all valid window positions.
pub fn ssim_map(x: &Matrix, y: &Matrix) -> Matrix {
    let taps = gaussian_taps(window_size(x.nrows(), x.ncols()));
    let c1 = (SSIM_K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (SSIM_K2 * DYNAMIC_RANGE).powi(2);

    let mu_x = filter_valid(x, &taps);
    let mu_y = filter_valid(y, &taps);
    let xx = filter_valid(&x.component_mul(x), &taps);
    let yy = filter_valid(&y.component_mul(y), &taps);
    let xy = filter_valid(&x.component_mul(y), &taps);

    Matrix::from_fn(mu_x.nrows(), mu_x.ncols(), |r, c| {
        let (mx, my) = (mu_x[(r, c)], mu_y[(r, c)]);
        let var_x = xx[(r, c)] - mx * mx;
        let var_y = yy[(r, c)] - my * my;
        let cov = xy[(r, c)] - mx * my;
        ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (var_x + var_y + c2))
    })
}

/// Mean of the local SSIM map.
pub fn ssim(x: &ImageMatrix, y: &ImageMatrix) -> Result<f64> {
    if x.dims() != y.dims() {
        return Err(Error::invalid(format!(
            "ssim: dimension mismatch {:?} vs {:?}",
            x.dims(),
            y.dims()
        )));
    }
    let map = ssim_map(x.as_matrix(), y.as_matrix());
    Ok(map.mean())
}

/// `(SSIM(F, I1) + SSIM(F, I2)) / 2`.
pub fn ssim_a(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<f64> {
    ensure_triplet(f, i1, i2)?;
    Ok((ssim(f, i1)? + ssim(f, i2)?) * 0.5)
}
