use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(lo..hi))
}

/// Low-rank structure plus sparse spikes with a known support.
pub struct SparseCorruption {
    pub data: Matrix,
    pub low_rank: Matrix,
    pub spikes: Matrix,
    /// Linear (column-major) indices of the spikes.
    pub support: Vec<usize>,
}

/// `n × n` rank-`rank` matrix with entries in about `[0, rank/2]`, plus
/// `density·n²` spikes of magnitude in `[0.5, 1)` and random sign.
pub fn rank_plus_spikes(seed: u64, n: usize, rank: usize, density: f64) -> SparseCorruption {
    let mut rng = rng(seed);
    let u = uniform(&mut rng, n, rank, 0.0, 1.0);
    let v = uniform(&mut rng, rank, n, 0.0, 1.0);
    let low_rank = &u * &v / 2.0;
    let mut idx: Vec<usize> = (0..n * n).collect();
    idx.shuffle(&mut rng);
    let count = ((n * n) as f64 * density).round() as usize;
    let support = idx[..count].to_vec();
    let mut spikes = Matrix::zeros(n, n);
    for &i in &support {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        spikes[i] = sign * rng.gen_range(0.5..1.0);
    }
    SparseCorruption { data: &low_rank + &spikes, low_rank, spikes, support }
}

/// Square region `[r0, r0+size) × [c0, c0+size)`.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub r0: usize,
    pub c0: usize,
    pub size: usize,
}

impl Region {
    pub fn contains(&self, r: usize, c: usize) -> bool {
        (self.r0..self.r0 + self.size).contains(&r) && (self.c0..self.c0 + self.size).contains(&c)
    }
}

/// A registered pair: the infrared frame is a dim smooth background with one
/// hot square; the visible frame is a mid-gray sinusoidal texture with no hot
/// object.
pub struct SyntheticPair {
    pub ir: Matrix,
    pub vis: Matrix,
    pub hot: Region,
}

pub fn hot_blob_texture_pair(size: usize, hot: Region) -> SyntheticPair {
    let n = size as f64;
    let ir = Matrix::from_fn(size, size, |r, c| {
        if hot.contains(r, c) {
            0.95
        } else {
            0.15 + 0.1 * (r as f64 / n) + 0.05 * (c as f64 / n)
        }
    });
    let vis = Matrix::from_fn(size, size, |r, c| {
        let (x, y) = (c as f64, r as f64);
        0.45 + 0.2 * (x * 0.9).sin() * (y * 0.7).cos() + 0.1 * (y / n)
    });
    SyntheticPair { ir, vis, hot }
}

/// Smooth rank-one ramp with bright 3×3 blobs at random positions. Returns the
/// image and a mask of blob pixels.
pub fn ramp_with_blobs(seed: u64, size: usize, blobs: usize) -> (Matrix, Vec<Vec<bool>>) {
    let mut rng = rng(seed);
    let n = size as f64;
    let mut img = Matrix::from_fn(size, size, |r, c| 0.1 + 0.3 * (r as f64 / n) * (0.5 + 0.5 * c as f64 / n));
    let mut mask = vec![vec![false; size]; size];
    for _ in 0..blobs {
        let r0 = rng.gen_range(1..size - 4);
        let c0 = rng.gen_range(1..size - 4);
        for r in r0..r0 + 3 {
            for c in c0..c0 + 3 {
                img[(r, c)] = 0.95;
                mask[r][c] = true;
            }
        }
    }
    (img, mask)
}

/// ±`amplitude` checkerboard with `block × block` squares. A 1-pixel
/// checkerboard has zero 3×3 Sobel response, so artifact tests use `block ≥ 2`.
pub fn checkerboard(rows: usize, cols: usize, block: usize, amplitude: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |r, c| if (r / block + c / block) % 2 == 0 { amplitude } else { -amplitude })
}
