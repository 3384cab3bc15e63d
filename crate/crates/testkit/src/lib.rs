//! Test-only reference code. Nothing here calls into `latfuse-core`: every
//! routine is a plain, slow, loop-based restatement of the formula it checks,
//! so agreement with the library is evidence rather than tautology.

pub mod oracle;
pub mod synth;

pub type Matrix = nalgebra::DMatrix<f64>;

use std::path::PathBuf;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// Loads a bundled 8-bit grayscale photograph as values in `[0, 1]`.
pub fn photo(name: &str) -> Matrix {
    let path = data_dir().join(format!("{name}.png"));
    let img = image::open(&path)
        .unwrap_or_else(|e| panic!("fixture {}: {e}", path.display()))
        .into_luma8();
    let (w, h) = img.dimensions();
    Matrix::from_fn(h as usize, w as usize, |r, c| img.get_pixel(c as u32, r as u32)[0] as f64 / 255.0)
}

/// Names of the bundled 64×64 photographs.
pub const PHOTOS_64: [&str; 18] = [
    "camera64", "moon64", "coins64", "astronaut64", "coffee64", "chelsea64", "brick64", "grass64",
    "gravel64", "text64", "page64", "cell64", "clock64", "horse64", "rocket64", "hubble64",
    "retina64", "phantom64",
];
