//! Gradient-based edge preservation (Qabf) and the fusion-artifact measure
//! (Nabf) built on the same per-pixel scores.
//!
//! Edge strength and orientation come from 3×3 Sobel responses with
//! replicated borders. For each source `A` the per-pixel preservation is
//! `Q^AF = Q_g(G^AF) · Q_α(A^AF)`, where both factors are sigmoids of the
//! relative strength and orientation agreement between `A` and the fused
//! image `F`.

use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::image::ImageMatrix;
use crate::Matrix;

use super::ensure_triplet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidConstants {
    pub gamma_g: f64,
    pub kappa_g: f64,
    pub sigma_g: f64,
    pub gamma_a: f64,
    pub kappa_a: f64,
    pub sigma_a: f64,
}

pub const QABF_CONSTANTS: SigmoidConstants = SigmoidConstants {
    gamma_g: 0.9994,
    kappa_g: -15.0,
    sigma_g: 0.5,
    gamma_a: 0.9879,
    kappa_a: -22.0,
    sigma_a: 0.8,
};

impl SigmoidConstants {
    pub fn strength(&self, g: f64) -> f64 {
        self.gamma_g / (1.0 + (self.kappa_g * (g - self.sigma_g)).exp())
    }

    pub fn orientation(&self, a: f64) -> f64 {
        self.gamma_a / (1.0 + (self.kappa_a * (a - self.sigma_a)).exp())
    }
}

/// Sobel components at or below this magnitude are rounding noise (pixel
/// values are O(1)) and are snapped to zero.
pub const GRADIENT_EPS: f64 = 1e-12;

#[inline]
fn snap(v: f64) -> f64 {
    if v.abs() <= GRADIENT_EPS {
        0.0
    } else {
        v
    }
}

struct Gradients {
    strength: Matrix,
    angle: Matrix,
}

fn sobel(img: &Matrix) -> Gradients {
    let (h, w) = img.shape();
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, h as isize - 1) as usize;
        let c = c.clamp(0, w as isize - 1) as usize;
        img[(r, c)]
    };
    let mut strength = Matrix::zeros(h, w);
    let mut angle = Matrix::zeros(h, w);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let sx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
            let sy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
            let (sx, sy) = (snap(sx), snap(sy));
            let idx = (r as usize, c as usize);
            strength[idx] = (sx * sx + sy * sy).sqrt();
            // orientation in (-π/2, π/2]; vertical gradients map to π/2
            angle[idx] = if sx == 0.0 { FRAC_PI_2 } else { (sy / sx).atan() };
        }
    }
    Gradients { strength, angle }
}

fn relative_strength(g_src: f64, g_fused: f64) -> f64 {
    if g_src == 0.0 && g_fused == 0.0 {
        0.0
    } else {
        g_src.min(g_fused) / g_src.max(g_fused)
    }
}

/// Orientation agreement in `[0, 1]`. Orientations are lines, so angle
/// differences are folded modulo π before normalizing.
fn orientation_agreement(a_src: f64, a_fused: f64) -> f64 {
    let d = (a_src - a_fused).abs();
    let d = d.min(std::f64::consts::PI - d);
    1.0 - d / FRAC_PI_2
}

/// Per-pixel edge preservation of both sources in one fused image.
#[derive(Debug, Clone)]
pub struct EdgePreservation {
    pub q_af: Matrix,
    pub q_bf: Matrix,
    pub g_a: Matrix,
    pub g_b: Matrix,
    pub g_f: Matrix,
}

impl EdgePreservation {
    pub fn new(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<Self> {
        ensure_triplet(f, i1, i2)?;
        Ok(Self::with_constants(f.as_matrix(), i1.as_matrix(), i2.as_matrix(), &QABF_CONSTANTS))
    }

    pub fn with_constants(f: &Matrix, a: &Matrix, b: &Matrix, k: &SigmoidConstants) -> Self {
        let gf = sobel(f);
        let ga = sobel(a);
        let gb = sobel(b);
        let preservation = |src: &Gradients| {
            Matrix::from_fn(f.nrows(), f.ncols(), |r, c| {
                let g = relative_strength(src.strength[(r, c)], gf.strength[(r, c)]);
                let o = orientation_agreement(src.angle[(r, c)], gf.angle[(r, c)]);
                k.strength(g) * k.orientation(o)
            })
        };
        Self {
            q_af: preservation(&ga),
            q_bf: preservation(&gb),
            g_a: ga.strength,
            g_b: gb.strength,
            g_f: gf.strength,
        }
    }

    fn total_weight(&self) -> f64 {
        self.g_a.sum() + self.g_b.sum()
    }

    /// Strength-weighted mean preservation; 0 when neither source has edges.
    pub fn qabf(&self) -> f64 {
        let denom = self.total_weight();
        if denom == 0.0 {
            return 0.0;
        }
        let num: f64 = (0..self.q_af.len())
            .map(|i| self.q_af[i] * self.g_a[i] + self.q_bf[i] * self.g_b[i])
            .sum();
        num / denom + 0.0
    }

    /// Preservation loss summed over pixels where the fused edge is stronger
    /// than both source edges (by more than [`GRADIENT_EPS`], so rounding
    /// does not break exact ties).
    pub fn nabf(&self) -> f64 {
        let denom = self.total_weight();
        if denom == 0.0 {
            return 0.0;
        }
        let num: f64 = (0..self.q_af.len())
            .filter(|&i| self.g_f[i] - self.g_a[i].max(self.g_b[i]) > GRADIENT_EPS)
            .map(|i| (1.0 - self.q_af[i]) * self.g_a[i] + (1.0 - self.q_bf[i]) * self.g_b[i])
            .sum();
        num / denom + 0.0
    }
}

pub fn qabf(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<f64> {
    Ok(EdgePreservation::new(f, i1, i2)?.qabf())
}

pub fn nabf(f: &ImageMatrix, i1: &ImageMatrix, i2: &ImageMatrix) -> Result<f64> {
    Ok(EdgePreservation::new(f, i1, i2)?.nabf())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(seed: usize) -> ImageMatrix {
        ImageMatrix::from_fn(16, 16, |r, c| ((r * 13 + c * 7 + seed * 5) % 17) as f64 / 16.0).unwrap()
    }

    #[test]
    fn perfect_preservation_hits_the_sigmoid_ceiling() {
        let k = QABF_CONSTANTS;
        let ceiling = k.gamma_g / (1.0 + (-7.5_f64).exp()) * k.gamma_a / (1.0 + (-4.4_f64).exp());
        let x = textured(0);
        let q = qabf(&x, &x, &x).unwrap();
        assert!((q - ceiling).abs() < 1e-12, "{q} vs {ceiling}");
        assert!(q < 1.0);
    }

    #[test]
    fn flat_everything_is_defined_as_zero() {
        let flat = ImageMatrix::filled(8, 8, 0.3).unwrap();
        assert_eq!(qabf(&flat, &flat, &flat).unwrap(), 0.0);
        assert_eq!(nabf(&flat, &flat, &flat).unwrap(), 0.0);
    }

    #[test]
    fn flat_fused_image_preserves_almost_nothing() {
        let flat = ImageMatrix::filled(16, 16, 0.5).unwrap();
        let q = qabf(&flat, &textured(1), &textured(2)).unwrap();
        // G = 0 everywhere: Q_g(0) bounds the score from above
        assert!(q <= QABF_CONSTANTS.strength(0.0));
        assert!(q >= 0.0);
    }

    #[test]
    fn no_artifacts_when_fused_equals_sources() {
        let x = textured(3);
        assert_eq!(nabf(&x, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn orientation_folds_modulo_pi() {
        let near_vertical = orientation_agreement(FRAC_PI_2 - 0.01, -FRAC_PI_2 + 0.01);
        assert!((near_vertical - (1.0 - 0.02 / FRAC_PI_2)).abs() < 1e-12);
        assert_eq!(orientation_agreement(0.3, 0.3), 1.0);
        assert!(orientation_agreement(0.0, FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn relative_strength_convention() {
        assert_eq!(relative_strength(0.0, 0.0), 0.0);
        assert_eq!(relative_strength(2.0, 0.0), 0.0);
        assert_eq!(relative_strength(1.0, 4.0), 0.25);
        assert_eq!(relative_strength(4.0, 1.0), 0.25);
    }
}
