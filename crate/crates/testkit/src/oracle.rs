use std::f64::consts::{FRAC_PI_2, PI};

use crate::Matrix;

/// Singular values and vectors from one-sided Jacobi rotations.
/// Returns `(A·V, V)` where the columns of `A·V` are mutually orthogonal;
/// their norms are the singular values.
fn one_sided_jacobi(m: &Matrix) -> (Matrix, Matrix) {
    let mut a = m.clone();
    let n = a.ncols();
    let mut v = Matrix::identity(n, n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..a.nrows() {
                    alpha += a[(i, p)] * a[(i, p)];
                    beta += a[(i, q)] * a[(i, q)];
                    gamma += a[(i, p)] * a[(i, q)];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..a.nrows() {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = c * x - s * y;
                    a[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let tall = if m.nrows() >= m.ncols() { m.clone() } else { m.transpose() };
    let (av, _) = one_sided_jacobi(&tall);
    let mut s: Vec<f64> = (0..av.ncols()).map(|j| av.column(j).norm()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Closed-form nuclear-norm proximal map via a Jacobi SVD.
pub fn svt_reference(m: &Matrix, tau: f64) -> Matrix {
    let transposed = m.nrows() < m.ncols();
    let tall = if transposed { m.transpose() } else { m.clone() };
    let (av, v) = one_sided_jacobi(&tall);
    let mut out = Matrix::zeros(tall.nrows(), tall.ncols());
    for j in 0..av.ncols() {
        let sigma = av.column(j).norm();
        if sigma <= tau || sigma == 0.0 {
            continue;
        }
        // (σ − τ) · u_j · v_jᵀ with u_j = (AV)_j / σ
        let scale = (sigma - tau) / sigma;
        for r in 0..out.nrows() {
            for c in 0..out.ncols() {
                out[(r, c)] += scale * av[(r, j)] * v[(c, j)];
            }
        }
    }
    if transposed {
        out.transpose()
    } else {
        out
    }
}

pub fn nuclear_norm(m: &Matrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Straight sliding-window SSIM: explicit 2-D Gaussian weights, statistics
/// accumulated per window position.
pub fn ssim_reference(x: &Matrix, y: &Matrix) -> f64 {
    let (h, w) = x.shape();
    let mut k = 11.min(h).min(w);
    if k % 2 == 0 {
        k -= 1;
    }
    let half = (k / 2) as f64;
    let mut weights = vec![vec![0.0; k]; k];
    let mut total = 0.0;
    for (i, row) in weights.iter_mut().enumerate() {
        for (j, wt) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - half, j as f64 - half);
            *wt = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *wt;
        }
    }
    let c1 = 0.01f64.powi(2);
    let c2 = 0.03f64.powi(2);
    let mut acc = 0.0;
    let mut count = 0usize;
    for r0 in 0..=h - k {
        for c0 in 0..=w - k {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    let wt = weights[i][j] / total;
                    mx += wt * x[(r0 + i, c0 + j)];
                    my += wt * y[(r0 + i, c0 + j)];
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    let wt = weights[i][j] / total;
                    let dx = x[(r0 + i, c0 + j)] - mx;
                    let dy = y[(r0 + i, c0 + j)] - my;
                    vx += wt * dx * dx;
                    vy += wt * dy * dy;
                    cxy += wt * dx * dy;
                }
            }
            acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    acc / count as f64
}

pub fn pearson_reference(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.len() as f64;
    let ma: f64 = a.iter().sum::<f64>() / n;
    let mb: f64 = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

pub fn scd_reference(f: &Matrix, a: &Matrix, b: &Matrix) -> f64 {
    pearson_reference(&(f - b), a) + pearson_reference(&(f - a), b)
}

const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// Per-pixel `(strength, orientation)` from Sobel kernels applied by explicit
/// correlation over an edge-replicated image.
fn gradient_field(m: &Matrix) -> Vec<(f64, f64)> {
    let (h, w) = m.shape();
    let mut out = Vec::with_capacity(h * w);
    // column-major to match nalgebra's linear indexing
    for c in 0..w {
        for r in 0..h {
            let (mut gx, mut gy) = (0.0, 0.0);
            for (i, (kx, ky)) in SOBEL_X.iter().zip(SOBEL_Y.iter()).enumerate() {
                for j in 0..3 {
                    let rr = (r as i64 + i as i64 - 1).clamp(0, h as i64 - 1) as usize;
                    let cc = (c as i64 + j as i64 - 1).clamp(0, w as i64 - 1) as usize;
                    gx += kx[j] * m[(rr, cc)];
                    gy += ky[j] * m[(rr, cc)];
                }
            }
            if gx.abs() <= 1e-12 {
                gx = 0.0;
            }
            if gy.abs() <= 1e-12 {
                gy = 0.0;
            }
            let g = gx.hypot(gy);
            let angle = if gx == 0.0 { FRAC_PI_2 } else { (gy / gx).atan() };
            out.push((g, angle));
        }
    }
    out
}

fn preservation(src: (f64, f64), fused: (f64, f64)) -> f64 {
    let (gs, as_) = src;
    let (gf, af) = fused;
    let g = if gs == 0.0 && gf == 0.0 {
        0.0
    } else if gs > gf {
        gf / gs
    } else {
        gs / gf
    };
    let mut d = (as_ - af).abs();
    if d > FRAC_PI_2 {
        d = PI - d;
    }
    let a = 1.0 - 2.0 * d / PI;
    let qg = 0.9994 / (1.0 + (-15.0 * (g - 0.5)).exp());
    let qa = 0.9879 / (1.0 + (-22.0 * (a - 0.8)).exp());
    qg * qa
}

/// Returns `(qabf, nabf)`.
pub fn edge_metrics_reference(f: &Matrix, a: &Matrix, b: &Matrix) -> (f64, f64) {
    let gf = gradient_field(f);
    let ga = gradient_field(a);
    let gb = gradient_field(b);
    let (mut num_q, mut num_n, mut den) = (0.0, 0.0, 0.0);
    for i in 0..gf.len() {
        let qa = preservation(ga[i], gf[i]);
        let qb = preservation(gb[i], gf[i]);
        num_q += qa * ga[i].0 + qb * gb[i].0;
        if gf[i].0 > ga[i].0 + 1e-12 && gf[i].0 > gb[i].0 + 1e-12 {
            num_n += (1.0 - qa) * ga[i].0 + (1.0 - qb) * gb[i].0;
        }
        den += ga[i].0 + gb[i].0;
    }
    if den == 0.0 {
        (0.0, 0.0)
    } else {
        (num_q / den, num_n / den)
    }
}
