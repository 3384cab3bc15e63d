//! Splitting an image into low-rank and saliency parts.

use crate::error::{Error, Result};
use crate::image::ImageMatrix;
use crate::solver::{solve_latlrr, SolverConfig};
use crate::Matrix;

#[derive(Debug, Clone)]
pub struct ImageDecomposition {
    /// Global structure `XZ`.
    pub low_rank: Matrix,
    /// Local structure `LX`.
    pub saliency: Matrix,
    /// Everything the two parts do not explain, `X − XZ − LX`. This is the
    /// solver's sparse term plus the (≤ tol) constraint slack, so the three
    /// parts reconstruct the image up to rounding.
    pub residual: Matrix,
    /// The solver's sparse term `E`.
    pub sparse: Matrix,
    /// `‖X − XZ − LX − E‖_max` reported by the solver.
    pub constraint_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ImageDecomposition {
    pub fn dims(&self) -> (usize, usize) {
        self.low_rank.shape()
    }
}

/// Decomposes the whole image, using the pixel matrix itself as the data
/// matrix `X`.
pub fn decompose(image: &ImageMatrix, cfg: &SolverConfig) -> Result<ImageDecomposition> {
    let x = image.as_matrix();
    let sol = solve_latlrr(x, cfg)?;
    let low_rank = sol.low_rank(x);
    let saliency = sol.saliency(x);
    let residual = x - &low_rank - &saliency;
    Ok(ImageDecomposition {
        low_rank,
        saliency,
        residual,
        sparse: sol.e,
        constraint_residual: sol.final_residual,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

/// Values of one row of a part, in column order.
pub fn row_profile(part: &Matrix, row: usize) -> Result<Vec<f64>> {
    if row >= part.nrows() {
        return Err(Error::invalid(format!(
            "row {row} out of range for a matrix with {} rows",
            part.nrows()
        )));
    }
    Ok(part.row(row).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_image_decomposes_to_zeros() {
        let img = ImageMatrix::filled(6, 8, 0.0).unwrap();
        let dec = decompose(&img, &SolverConfig::default()).unwrap();
        for part in [&dec.low_rank, &dec.saliency, &dec.residual, &dec.sparse] {
            assert_eq!(part, &Matrix::zeros(6, 8));
        }
        assert!(dec.converged);
    }

    #[test]
    fn row_profile_reads_the_row() {
        let m = Matrix::from_fn(4, 5, |r, c| (10 * r + c) as f64);
        assert_eq!(row_profile(&m, 2).unwrap(), vec![20.0, 21.0, 22.0, 23.0, 24.0]);
        assert_eq!(row_profile(&Matrix::zeros(3, 4), 1).unwrap(), vec![0.0; 4]);
        assert!(matches!(row_profile(&m, 4), Err(Error::InvalidInput(_))));
    }
}
