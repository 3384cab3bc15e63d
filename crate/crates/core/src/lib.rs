//! Infrared/visible image fusion on top of a Latent Low-Rank Representation
//! (LatLRR) decomposition.
//!
//! Each source image `X` is split as `X = XZ + LX + E` by an inexact
//! augmented Lagrangian solver ([`solver`]). The low-rank parts `XZ` are
//! averaged, the saliency parts `LX` are summed and the two fused streams are
//! added back together ([`fusion`]). [`metrics`] implements the objective
//! scores used to grade a fused image: Qabf, SCD, SSIM_a and Nabf.

pub mod decomposition;
pub mod error;
pub mod fusion;
pub mod image;
pub mod lowrank;
pub mod metrics;
pub mod solver;

pub use decomposition::{decompose, row_profile, ImageDecomposition};
pub use error::{Error, Result};
pub use fusion::{
    fuse_low_rank, fuse_pipeline, fuse_saliency, reconstruct, FusedResult, FusionOutput,
    FusionWeights,
};
pub use image::ImageMatrix;
pub use lowrank::{max_abs, soft_threshold, svt};
pub use metrics::{evaluate, nabf, qabf, scd, ssim, ssim_a, MetricsReport};
pub use solver::{solve_latlrr, LatLrrSolution, SolverConfig};

/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
