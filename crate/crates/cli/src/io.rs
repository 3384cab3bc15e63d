//! Raster and matrix file I/O.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::imageops::FilterType;
use image::{DynamicImage, ExtendedColorType, GrayImage, ImageBuffer, ImageEncoder, ImageFormat, Luma};
use latfuse::{ImageMatrix, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// 8-bit grayscale PNG
    #[default]
    Png8,
    /// Binary PGM (P5, maxval 255)
    Pgm8,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Png8 => "png",
            OutputFormat::Pgm8 => "pgm",
        }
    }

    /// Guesses from the file extension; anything but `.pgm` is PNG.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pgm") => OutputFormat::Pgm8,
            _ => OutputFormat::Png8,
        }
    }
}

fn luminance(r: u8, g: u8, b: u8) -> f64 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0
}

/// Converts a decoded raster to `[0, 1]` grayscale. Color inputs go through
/// Rec.601 luma; 16-bit inputs are reduced to 8 bits first.
pub fn to_image_matrix(img: &DynamicImage) -> latfuse::Result<ImageMatrix> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if img.color().has_color() {
        let rgb = img.to_rgb8();
        ImageMatrix::from_fn(h, w, |r, c| {
            let p = rgb.get_pixel(c as u32, r as u32);
            // luma of 8-bit values can exceed 1 by an ulp
            luminance(p[0], p[1], p[2]).min(1.0)
        })
    } else {
        let gray = img.to_luma8();
        ImageMatrix::from_fn(h, w, |r, c| gray.get_pixel(c as u32, r as u32)[0] as f64 / 255.0)
    }
}

pub fn load_image(path: &Path) -> Result<ImageMatrix> {
    if !path.exists() {
        return Err(CliError::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "file not found")));
    }
    let img = image::open(path).map_err(|source| CliError::Image { path: path.into(), source })?;
    if img.width() == 0 || img.height() == 0 {
        return Err(CliError::Input(format!("{}: zero-sized image", path.display())));
    }
    Ok(to_image_matrix(&img)?)
}

/// Round-half-away-from-zero quantization to 8 bits.
pub fn quantize(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn to_gray8(img: &ImageMatrix) -> GrayImage {
    let (h, w) = img.dims();
    GrayImage::from_fn(w as u32, h as u32, |x, y| Luma([quantize(img.get(y as usize, x as usize))]))
}

pub fn save_image(img: &ImageMatrix, path: &Path, fmt: OutputFormat) -> Result<()> {
    let gray = to_gray8(img);
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let encoded = match fmt {
        OutputFormat::Png8 => gray.write_to(&mut out, ImageFormat::Png),
        OutputFormat::Pgm8 => PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(gray.as_raw(), gray.width(), gray.height(), ExtendedColorType::L8),
    };
    encoded.map_err(|source| CliError::Image { path: path.into(), source })?;
    out.flush().map_err(|e| CliError::io(path, e))
}

/// Bilinear downscale so that neither side exceeds `max_dim`. Images already
/// within the cap are returned unchanged.
pub fn downscale(img: &ImageMatrix, max_dim: usize) -> latfuse::Result<ImageMatrix> {
    let (h, w) = img.dims();
    let longest = h.max(w);
    if longest <= max_dim {
        return Ok(img.clone());
    }
    let scale = max_dim as f64 / longest as f64;
    let nh = ((h as f64 * scale).round() as u32).max(2);
    let nw = ((w as f64 * scale).round() as u32).max(2);
    let buf: ImageBuffer<Luma<f32>, Vec<f32>> =
        ImageBuffer::from_fn(w as u32, h as u32, |x, y| Luma([img.get(y as usize, x as usize) as f32]));
    let small = image::imageops::resize(&buf, nw, nh, FilterType::Triangle);
    ImageMatrix::from_fn(nh as usize, nw as usize, |r, c| {
        (small.get_pixel(c as u32, r as u32)[0] as f64).clamp(0.0, 1.0)
    })
}

/// Min-max stretch to `[0, 1]` for viewing; a constant matrix maps to zeros.
pub fn display_normalize(m: &Matrix) -> latfuse::Result<ImageMatrix> {
    let lo = m.min();
    let hi = m.max();
    let span = hi - lo;
    if !(span > 0.0) {
        return ImageMatrix::new(Matrix::zeros(m.nrows(), m.ncols()));
    }
    ImageMatrix::from_clamped(&m.map(|v| (v - lo) / span))
}

/// Writes one CSV record per matrix row with round-trip precision.
pub fn write_matrix_csv(m: &Matrix, path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    for r in 0..m.nrows() {
        wtr.write_record(m.row(r).iter().map(|v| v.to_string()))?;
    }
    wtr.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| CliError::Input(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(Matrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}
