//! The operations behind each CLI subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use latfuse::{decompose, evaluate, fuse_pipeline, fuse_saliency, row_profile, ImageMatrix, MetricsReport};
use log::warn;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{display_normalize, downscale, load_image, save_image, write_matrix_csv};
use crate::report::{BenchReport, BenchRow};

/// Environment variable capping bench concurrency.
pub const THREADS_ENV: &str = "LATFUSE_THREADS";

const IMAGE_EXTENSIONS: [&str; 7] = ["png", "pgm", "pnm", "bmp", "jpg", "jpeg", "tif"];

fn load_scaled(path: &Path, cfg: &RunConfig) -> Result<ImageMatrix> {
    let img = load_image(path)?;
    Ok(match cfg.max_dim {
        Some(cap) => downscale(&img, cap)?,
        None => img,
    })
}

fn load_pair(ir_path: &Path, vis_path: &Path, cfg: &RunConfig) -> Result<(ImageMatrix, ImageMatrix)> {
    let ir = load_image(ir_path)?;
    let vis = load_image(vis_path)?;
    // Registration is assumed; compare native sizes so that downscaling never
    // hides a mismatch.
    if ir.dims() != vis.dims() {
        return Err(CliError::Input(format!(
            "{} is {}x{} but {} is {}x{}; the pair must be registered",
            ir_path.display(),
            ir.height(),
            ir.width(),
            vis_path.display(),
            vis.height(),
            vis.width()
        )));
    }
    match cfg.max_dim {
        Some(cap) => Ok((downscale(&ir, cap)?, downscale(&vis, cap)?)),
        None => Ok((ir, vis)),
    }
}

#[derive(Debug, Clone)]
pub struct FuseOutcome {
    pub metrics: MetricsReport,
    pub converged: bool,
    pub iterations_ir: usize,
    pub iterations_vis: usize,
}

fn fuse_loaded(ir: &ImageMatrix, vis: &ImageMatrix, cfg: &RunConfig) -> Result<(ImageMatrix, FuseOutcome)> {
    let out = fuse_pipeline(ir, vis, &cfg.solver, &cfg.weights)?;
    let metrics = evaluate(&out.result.fused, ir, vis)?;
    let outcome = FuseOutcome {
        metrics,
        converged: out.converged(),
        iterations_ir: out.ir.iterations,
        iterations_vis: out.vis.iterations,
    };
    Ok((out.result.fused, outcome))
}

/// Fuses one pair, writes the fused image and scores it against the (possibly
/// downscaled) sources.
pub fn cmd_fuse(ir_path: &Path, vis_path: &Path, out_path: &Path, cfg: &RunConfig) -> Result<FuseOutcome> {
    cfg.validate()?;
    let (ir, vis) = load_pair(ir_path, vis_path, cfg)?;
    let (fused, outcome) = fuse_loaded(&ir, &vis, cfg)?;
    if !outcome.converged {
        warn!(
            "solver stopped at max_iter={} before reaching tol={}; the fused image uses the best iterate",
            cfg.solver.max_iter, cfg.solver.tol
        );
    }
    save_image(&fused, out_path, cfg.output_format)?;
    Ok(outcome)
}

/// Writes `low_rank`, `saliency` and `residual` both as display-normalized
/// images and as raw CSV matrices.
pub fn cmd_decompose(img_path: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let img = load_scaled(img_path, cfg)?;
    let dec = decompose(&img, &cfg.solver)?;
    if !dec.converged {
        warn!("decomposition stopped at max_iter={} (residual {:e})", cfg.solver.max_iter, dec.constraint_residual);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let ext = cfg.output_format.extension();
    for (name, part) in [("low_rank", &dec.low_rank), ("saliency", &dec.saliency), ("residual", &dec.residual)] {
        save_image(&display_normalize(part)?, &out_dir.join(format!("{name}.{ext}")), cfg.output_format)?;
        write_matrix_csv(part, &out_dir.join(format!("{name}.csv")))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub column: usize,
    pub ir: f64,
    pub vis: f64,
    pub fused: f64,
}

/// One row of both saliency parts and of their fusion.
pub fn cmd_profile(ir_path: &Path, vis_path: &Path, row: usize, out_csv: &Path, cfg: &RunConfig) -> Result<Vec<ProfileRow>> {
    cfg.validate()?;
    let (ir, vis) = load_pair(ir_path, vis_path, cfg)?;
    if row >= ir.height() {
        return Err(CliError::Input(format!("row {row} out of range for height {}", ir.height())));
    }
    let (dec_ir, dec_vis) = rayon::join(|| decompose(&ir, &cfg.solver), || decompose(&vis, &cfg.solver));
    let (dec_ir, dec_vis) = (dec_ir?, dec_vis?);
    let fused = fuse_saliency(&dec_ir.saliency, &dec_vis.saliency, &cfg.weights)?;

    let ir_row = row_profile(&dec_ir.saliency, row)?;
    let vis_row = row_profile(&dec_vis.saliency, row)?;
    let fused_row = row_profile(&fused, row)?;
    let rows: Vec<ProfileRow> = (0..ir_row.len())
        .map(|c| ProfileRow { column: c, ir: ir_row[c], vis: vis_row[c], fused: fused_row[c] })
        .collect();

    let mut wtr = csv::Writer::from_path(out_csv)?;
    wtr.write_record(["column", "ir_saliency", "vis_saliency", "fused_saliency"])?;
    for r in &rows {
        wtr.write_record([r.column.to_string(), r.ir.to_string(), r.vis.to_string(), r.fused.to_string()])?;
    }
    wtr.flush().map_err(|e| CliError::io(out_csv, e))?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePair {
    pub id: String,
    pub ir: PathBuf,
    pub vis: PathBuf,
}

#[derive(Debug, Default)]
pub struct PairScan {
    /// Sorted by id.
    pub pairs: Vec<ImagePair>,
    pub unmatched: Vec<PathBuf>,
}

fn split_prefix(stem: &str) -> Option<(bool, &str)> {
    let lower = stem.to_ascii_lowercase();
    if lower.starts_with("vis") {
        Some((false, &stem[3..]))
    } else if lower.starts_with("ir") {
        Some((true, &stem[2..]))
    } else {
        None
    }
}

/// Pairs `IR<name>.<ext>` with `VIS<name>.<ext>` (prefixes and names compared
/// case-insensitively). Anything else with an image extension is reported as
/// unmatched.
pub fn discover_pairs(dir: &Path) -> Result<PairScan> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if path.is_file() && is_image {
            files.push(path);
        }
    }
    files.sort();

    let mut slots: BTreeMap<String, (String, Vec<PathBuf>, Vec<PathBuf>)> = BTreeMap::new();
    let mut unmatched = Vec::new();
    for path in files {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match split_prefix(&stem) {
            Some((is_ir, name)) if !name.is_empty() => {
                let slot = slots.entry(name.to_lowercase()).or_insert_with(|| (name.to_string(), vec![], vec![]));
                if is_ir {
                    slot.0 = name.to_string();
                    slot.1.push(path);
                } else {
                    slot.2.push(path);
                }
            }
            _ => unmatched.push(path),
        }
    }

    let mut pairs = Vec::new();
    for (_, (id, mut irs, mut viss)) in slots {
        if irs.len() == 1 && viss.len() == 1 {
            pairs.push(ImagePair { id, ir: irs.remove(0), vis: viss.remove(0) });
        } else {
            unmatched.append(&mut irs);
            unmatched.append(&mut viss);
        }
    }
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    unmatched.sort();
    Ok(PairScan { pairs, unmatched })
}

#[derive(Debug, Clone, Default)]
pub struct BenchOptions {
    /// Where to write fused images (`<pair id>.<ext>`), if anywhere.
    pub fused_dir: Option<PathBuf>,
    /// Record per-pair wall-clock time in the report.
    pub timings: bool,
    /// Worker threads; `None` reads `LATFUSE_THREADS`, then falls back to
    /// the machine's parallelism.
    pub threads: Option<usize>,
}

fn thread_count(opts: &BenchOptions) -> Result<usize> {
    if let Some(n) = opts.threads {
        return Ok(n.max(1));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Fuses and scores every pair in `pairs_dir` and writes the report.
pub fn cmd_bench(pairs_dir: &Path, out_report: &Path, cfg: &RunConfig, opts: &BenchOptions) -> Result<BenchReport> {
    cfg.validate()?;
    let scan = discover_pairs(pairs_dir)?;
    for path in &scan.unmatched {
        warn!("skipping unmatched file {}", path.display());
    }
    if scan.pairs.is_empty() {
        return Err(CliError::Input(format!(
            "no IR*/VIS* image pairs found in {}",
            pairs_dir.display()
        )));
    }
    if let Some(dir) = &opts.fused_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(opts)?)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;

    let rows: Vec<BenchRow> = pool.install(|| {
        scan.pairs
            .par_iter()
            .map(|pair| {
                let start = Instant::now();
                let (ir, vis) = load_pair(&pair.ir, &pair.vis, cfg)?;
                let (fused, outcome) = fuse_loaded(&ir, &vis, cfg)?;
                if !outcome.converged {
                    warn!("pair {}: solver hit max_iter before tol", pair.id);
                }
                if let Some(dir) = &opts.fused_dir {
                    let path = dir.join(format!("{}.{}", pair.id, cfg.output_format.extension()));
                    save_image(&fused, &path, cfg.output_format)?;
                }
                let m = outcome.metrics;
                Ok(BenchRow {
                    pair: pair.id.clone(),
                    qabf: m.qabf,
                    scd: m.scd,
                    ssim_a: m.ssim_a,
                    nabf: m.nabf,
                    iterations_ir: outcome.iterations_ir,
                    iterations_vis: outcome.iterations_vis,
                    converged: outcome.converged,
                    runtime_s: opts.timings.then(|| start.elapsed().as_secs_f64()),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let report = BenchReport::new(*cfg, rows);
    report.write_to(out_report, matches!(cfg.report_format, crate::config::ReportFormat::Json))?;
    Ok(report)
}
