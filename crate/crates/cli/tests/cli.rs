use std::path::{Path, PathBuf};
use std::process::Command;

use latfuse::{ImageMatrix, Matrix};
use latfuse_cli::io::{downscale, read_matrix_csv};
use latfuse_cli::{
    cmd_bench, cmd_decompose, cmd_fuse, cmd_profile, discover_pairs, load_image, save_image, BenchOptions,
    CliError, OutputFormat, ReportFormat, RunConfig,
};
use latfuse_testkit::synth::{self, Region};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, m: &Matrix) -> PathBuf {
    let path = dir.join(name);
    save_image(&ImageMatrix::from_clamped(m).unwrap(), &path, OutputFormat::from_path(&path)).unwrap();
    path
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latfuse"))
}

#[test]
fn save_load_round_trip_is_within_half_a_level() {
    let dir = TempDir::new().unwrap();
    let mut rng = synth::rng(1);
    let img = ImageMatrix::new(synth::uniform(&mut rng, 13, 17, 0.0, 1.0)).unwrap();
    for fmt in [OutputFormat::Png8, OutputFormat::Pgm8] {
        let path = dir.path().join(format!("rt.{}", fmt.extension()));
        save_image(&img, &path, fmt).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.dims(), (13, 17));
        let err = (back.as_matrix() - img.as_matrix()).amax();
        assert!(err <= 1.0 / 510.0 + 1e-15, "{fmt:?}: {err}");
    }
}

#[test]
fn pgm_output_is_binary_p5() {
    let dir = TempDir::new().unwrap();
    let img = ImageMatrix::from_fn(3, 4, |r, c| if (r + c) % 2 == 0 { 1.0 } else { 0.5 }).unwrap();
    let path = dir.path().join("x.pgm");
    save_image(&img, &path, OutputFormat::Pgm8).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    // header is four whitespace-separated tokens followed by one whitespace byte
    let mut tokens = Vec::new();
    let mut pos = 0;
    while tokens.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).unwrap().to_owned());
    }
    assert_eq!(tokens, ["P5", "4", "3", "255"]);
    assert_eq!(&bytes[pos + 1..], &[255, 128, 255, 128, 128, 255, 128, 255, 255, 128, 255, 128]);
}

#[test]
fn load_errors() {
    let dir = TempDir::new().unwrap();
    assert!(matches!(load_image(&dir.path().join("missing.png")), Err(CliError::Io { .. })));
    let junk = dir.path().join("junk.png");
    std::fs::write(&junk, b"not an image").unwrap();
    assert!(matches!(load_image(&junk), Err(CliError::Image { .. })));
}

#[test]
fn downscale_caps_the_longest_side() {
    let img = ImageMatrix::from_fn(90, 60, |r, c| ((r + c) % 10) as f64 / 10.0).unwrap();
    let small = downscale(&img, 30).unwrap();
    assert_eq!(small.dims(), (30, 20));
    assert!(small.as_matrix().iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(downscale(&img, 100).unwrap(), img);
}

#[test]
fn fuse_identical_pair_smoke() {
    let dir = TempDir::new().unwrap();
    let pair = synth::hot_blob_texture_pair(64, Region { r0: 10, c0: 30, size: 12 });
    let a = write(dir.path(), "a.png", &pair.vis);
    let out = dir.path().join("fused.png");
    let outcome = cmd_fuse(&a, &a, &out, &RunConfig::default()).unwrap();
    assert!(out.exists());
    assert!(outcome.converged);
    let m = outcome.metrics;
    assert!(m.qabf.is_finite() && m.scd.is_finite() && m.nabf.is_finite());
    // scored on the clamped, written pixels
    let fused = load_image(&out).unwrap();
    let src = load_image(&a).unwrap();
    let again = latfuse::ssim_a(&fused, &src, &src).unwrap();
    assert!((again - m.ssim_a).abs() < 0.01);
}

#[test]
fn fused_file_keeps_hot_object_and_texture() {
    let dir = TempDir::new().unwrap();
    let hot = Region { r0: 36, c0: 8, size: 14 };
    let pair = synth::hot_blob_texture_pair(64, hot);
    let ir = write(dir.path(), "ir.png", &pair.ir);
    let vis = write(dir.path(), "vis.png", &pair.vis);
    let out = dir.path().join("fused.pgm");
    cmd_fuse(&ir, &vis, &out, &RunConfig { output_format: OutputFormat::Pgm8, ..RunConfig::default() }).unwrap();
    let fused = load_image(&out).unwrap().into_matrix();

    let hot_mean = fused.view((hot.r0, hot.c0), (hot.size, hot.size)).mean();
    let bg_mean = fused.view((hot.r0, 30), (hot.size, 14)).mean();
    // same thresholds as the in-memory fusion check, minus quantization slack
    assert!(hot_mean - bg_mean >= 0.42975 * 0.99 - 2.0 / 255.0);
    let tex = fused.view((4, 30), (20, 30)).into_owned();
    let vis_tex = pair.vis.view((4, 30), (20, 30)).into_owned();
    let std = |m: &Matrix| (m.map(|v| (v - m.mean()).powi(2)).mean()).sqrt();
    assert!(std(&tex) / std(&vis_tex) >= 0.75651 * 0.99 - 0.02);
}

#[test]
fn decompose_zero_image_gives_zero_parts() {
    let dir = TempDir::new().unwrap();
    let src = write(dir.path(), "zero.png", &Matrix::zeros(8, 10));
    let out = dir.path().join("parts");
    cmd_decompose(&src, &out, &RunConfig::default()).unwrap();
    for name in ["low_rank", "saliency", "residual"] {
        let img = load_image(&out.join(format!("{name}.png"))).unwrap();
        assert!(img.as_matrix().iter().all(|&v| v == 0.0), "{name}");
        let raw = read_matrix_csv(&out.join(format!("{name}.csv"))).unwrap();
        assert_eq!(raw, Matrix::zeros(8, 10));
    }
}

#[test]
fn decompose_csv_parts_sum_to_source() {
    let dir = TempDir::new().unwrap();
    let src = write(dir.path(), "cam.png", &latfuse_testkit::photo("camera64"));
    let out = dir.path().join("parts");
    let cfg = RunConfig::default();
    cmd_decompose(&src, &out, &cfg).unwrap();
    let sum = read_matrix_csv(&out.join("low_rank.csv")).unwrap()
        + read_matrix_csv(&out.join("saliency.csv")).unwrap()
        + read_matrix_csv(&out.join("residual.csv")).unwrap();
    let x = load_image(&src).unwrap();
    assert!((sum - x.as_matrix()).amax() <= cfg.solver.tol);
    assert!(out.join("saliency.png").exists());
}

#[test]
fn profile_contract() {
    let dir = TempDir::new().unwrap();
    let hot = Region { r0: 12, c0: 10, size: 11 };
    let pair = synth::hot_blob_texture_pair(40, hot);
    let ir = write(dir.path(), "ir.png", &pair.ir);
    let vis = write(dir.path(), "vis.png", &pair.vis);
    let csv_path = dir.path().join("row.csv");
    let row = hot.r0 + 5;
    let rows = cmd_profile(&ir, &vis, row, &csv_path, &RunConfig::default()).unwrap();
    assert_eq!(rows.len(), 40);
    for c in hot.c0..hot.c0 + hot.size {
        assert!(rows[c].ir > rows[c].vis, "column {c}");
    }

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["column", "ir_saliency", "vis_saliency", "fused_saliency"]);
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|f| f.parse().unwrap()).collect();
        assert_eq!(v[0] as usize, i);
        assert!((v[3] - (v[1] + v[2])).abs() <= 1e-12);
        n += 1;
    }
    assert_eq!(n, 40);

    let err = cmd_profile(&ir, &vis, 40, &csv_path, &RunConfig::default());
    assert!(matches!(err, Err(CliError::Input(_))));

    let zero = write(dir.path(), "zero.png", &Matrix::zeros(40, 40));
    let rows = cmd_profile(&zero, &zero, 3, &csv_path, &RunConfig::default()).unwrap();
    assert!(rows.iter().all(|r| r.ir == 0.0 && r.vis == 0.0 && r.fused == 0.0));
}

fn synthetic_pairs(dir: &Path, n: usize, size: usize) {
    for k in 0..n {
        let hot = Region { r0: 2 + 3 * k, c0: size / 2 - k, size: size / 4 };
        let pair = synth::hot_blob_texture_pair(size, hot);
        write(dir, &format!("IR{:02}.png", k + 1), &pair.ir);
        write(dir, &format!("VIS{:02}.png", k + 1), &pair.vis);
    }
}

#[test]
fn pair_discovery() {
    let dir = TempDir::new().unwrap();
    synthetic_pairs(dir.path(), 2, 16);
    write(dir.path(), "irLonely.png", &Matrix::zeros(4, 4));
    write(dir.path(), "notes.png", &Matrix::zeros(4, 4));
    write(dir.path(), "vis_x.pgm", &Matrix::zeros(4, 4));
    write(dir.path(), "Ir_X.png", &Matrix::zeros(4, 4));
    std::fs::write(dir.path().join("README.txt"), "hi").unwrap();
    let scan = discover_pairs(dir.path()).unwrap();
    let ids: Vec<&str> = scan.pairs.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, vec!["01", "02", "_X"]);
    let unmatched: Vec<String> =
        scan.unmatched.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(unmatched, vec!["irLonely.png", "notes.png"]);
}

#[test]
fn bench_report_rows_and_means() {
    let dir = TempDir::new().unwrap();
    let pairs = dir.path().join("pairs");
    std::fs::create_dir(&pairs).unwrap();
    synthetic_pairs(&pairs, 3, 24);
    write(&pairs, "VISorphan.png", &Matrix::zeros(24, 24));
    let out = dir.path().join("report.csv");
    let opts = BenchOptions { threads: Some(2), ..Default::default() };
    let report = cmd_bench(&pairs, &out, &RunConfig::default(), &opts).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.rows.iter().map(|r| r.pair.as_str()).collect::<Vec<_>>(), vec!["01", "02", "03"]);
    let mean = |f: fn(&latfuse_cli::BenchRow) -> f64| report.rows.iter().map(f).sum::<f64>() / 3.0;
    assert!((report.summary.qabf - mean(|r| r.qabf)).abs() < 1e-12);
    assert!((report.summary.scd - mean(|r| r.scd)).abs() < 1e-12);
    assert!((report.summary.ssim_a - mean(|r| r.ssim_a)).abs() < 1e-12);
    assert!((report.summary.nabf - mean(|r| r.nabf)).abs() < 1e-12);

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("mean,"));
    assert!(lines[1].contains(",0.8,0.5,0.5,1,1,0.000001,1.1,10000000000,0.0000001,2000,"));

    let json_out = dir.path().join("report.json");
    let cfg = RunConfig { report_format: ReportFormat::Json, ..RunConfig::default() };
    let again = cmd_bench(&pairs, &json_out, &cfg, &opts).unwrap();
    let parsed: latfuse_cli::BenchReport = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(parsed.rows, again.rows);
    assert_eq!(parsed.config, cfg);
}

#[test]
fn bench_on_empty_directory_fails() {
    let dir = TempDir::new().unwrap();
    let err = cmd_bench(dir.path(), &dir.path().join("r.csv"), &RunConfig::default(), &BenchOptions::default());
    assert!(matches!(err, Err(CliError::Input(_))));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.png", &synth::hot_blob_texture_pair(16, Region { r0: 2, c0: 2, size: 4 }).ir);
    let b = write(dir.path(), "b.png", &Matrix::from_element(16, 17, 0.5));
    let out = dir.path().join("f.png");

    let status = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    let (a, b, out) = (a.to_str().unwrap(), b.to_str().unwrap(), out.to_str().unwrap());

    assert_eq!(status(&["fuse", "--ir", a, "--vis", a, "-o", out]), Some(0));
    assert_eq!(status(&["fuse", "--ir", a, "--vis", b, "-o", out]), Some(1));
    assert_eq!(status(&["fuse", "--ir", a, "--vis", "/nonexistent.png", "-o", out]), Some(1));
    assert_eq!(status(&["fuse", "--ir", a]), Some(1));
    assert_eq!(status(&["fuse", "--ir", a, "--vis", a, "-o", out, "--lambda", "-1"]), Some(1));
    assert_eq!(status(&["fuse", "--ir", a, "--vis", a, "-o", out, "--mu0", "1e-320"]), Some(2));
    assert_eq!(status(&["--help"]), Some(0));

    let stalled = bin().args(["fuse", "--ir", a, "--vis", a, "-o", out, "--max-iter", "3"]).output().unwrap();
    assert_eq!(stalled.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&stalled.stderr).contains("max_iter"));
}

#[test]
fn bench_help_documents_pair_naming() {
    let out = bin().args(["bench", "--help"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("IR<name>.<ext>") && text.contains("VIS<name>.<ext>"));
    assert!(text.contains("LATFUSE_THREADS"));
}
