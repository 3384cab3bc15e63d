use crate::error::{Error, Result};
use crate::Matrix;

/// Grayscale image with intensities in `[0, 1]`, stored as an `H × W` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatrix(Matrix);

impl ImageMatrix {
    pub fn new(pixels: Matrix) -> Result<Self> {
        let (h, w) = pixels.shape();
        if h < 2 || w < 2 {
            return Err(Error::invalid(format!("image must be at least 2x2, got {h}x{w}")));
        }
        if let Some(pos) = pixels.iter().position(|v| !(0.0..=1.0).contains(v)) {
            let (r, c) = (pos % h, pos / h);
            return Err(Error::invalid(format!(
                "pixel ({r}, {c}) = {} is outside [0, 1]",
                pixels[(r, c)]
            )));
        }
        Ok(Self(pixels))
    }

    /// Clamps every entry into `[0, 1]`; NaN maps to 0.
    pub fn from_clamped(pixels: &Matrix) -> Result<Self> {
        Self::new(pixels.map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) }))
    }

    pub fn from_fn(height: usize, width: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(Matrix::from_fn(height, width, f))
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(Matrix::from_element(height, width, value))
    }

    pub fn height(&self) -> usize {
        self.0.nrows()
    }

    pub fn width(&self) -> usize {
        self.0.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl AsRef<Matrix> for ImageMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

pub(crate) fn ensure_same_dims(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::invalid(format!(
            "{what}: dimension mismatch {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}
