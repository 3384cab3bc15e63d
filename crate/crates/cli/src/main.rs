use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latfuse::{FusionWeights, SolverConfig};
use latfuse_cli::{
    cmd_bench, cmd_decompose, cmd_fuse, cmd_profile, BenchOptions, CliError, OutputFormat, ReportFormat, RunConfig,
};

const AFTER_HELP: &str = "\
Exit status: 0 on success, 1 on usage or input errors, 2 when the solver diverges.
A solver that stops at --max-iter before reaching --tol only prints a warning.";

const BENCH_HELP: &str = "\
Pairs are matched by file name: IR<name>.<ext> and VIS<name>.<ext> (prefixes are
case-insensitive) form the pair <name>. Files that do not pair up are skipped
with a warning. Rows are ordered by pair name. LATFUSE_THREADS caps the number
of pairs fused concurrently (default: all cores).";

/// Infrared/visible image fusion with latent low-rank decomposition.
#[derive(Debug, Parser)]
#[command(name = "latfuse", version, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse a registered infrared/visible pair and print its quality metrics.
    Fuse {
        #[arg(long)]
        ir: PathBuf,
        #[arg(long)]
        vis: PathBuf,
        /// Output image; `.pgm` selects binary PGM unless --format is given.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Write the low-rank, saliency and residual parts of one image.
    Decompose {
        image: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "png8")]
        format: OutputFormat,
        #[command(flatten)]
        settings: Settings,
    },
    /// Export one row of both saliency parts and their fusion as CSV.
    Profile {
        #[arg(long)]
        ir: PathBuf,
        #[arg(long)]
        vis: PathBuf,
        #[arg(long)]
        row: usize,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Fuse and score every pair in a directory.
    #[command(after_help = BENCH_HELP)]
    Bench {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write a JSON report instead of CSV.
        #[arg(long)]
        json: bool,
        /// Also write each fused image into this directory.
        #[arg(long)]
        fused_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "png8")]
        format: OutputFormat,
        /// Add per-pair wall-clock seconds (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Debug, Args)]
struct Settings {
    /// Weight of the sparse term.
    #[arg(long, default_value_t = 0.8)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    w1: f64,
    #[arg(long, default_value_t = 0.5)]
    w2: f64,
    #[arg(long, default_value_t = 1.0)]
    s1: f64,
    #[arg(long, default_value_t = 1.0)]
    s2: f64,
    /// Downscale inputs so the longest side is at most N pixels.
    #[arg(long, value_name = "N")]
    max_dim: Option<usize>,
    /// Max-abs constraint tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    mu0: f64,
    #[arg(long, default_value_t = 1.1)]
    rho: f64,
    #[arg(long, default_value_t = 1e10)]
    mu_max: f64,
}

impl Settings {
    fn run_config(&self, output_format: OutputFormat, report_format: ReportFormat) -> RunConfig {
        RunConfig {
            solver: SolverConfig {
                lambda: self.lambda,
                mu0: self.mu0,
                rho: self.rho,
                mu_max: self.mu_max,
                tol: self.tol,
                max_iter: self.max_iter,
            },
            weights: FusionWeights { w1: self.w1, w2: self.w2, s1: self.s1, s2: self.s2 },
            max_dim: self.max_dim,
            output_format,
            report_format,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fuse { ir, vis, output, format, settings } => {
            let fmt = format.unwrap_or_else(|| OutputFormat::from_path(&output));
            let cfg = settings.run_config(fmt, ReportFormat::Csv);
            let outcome = cmd_fuse(&ir, &vis, &output, &cfg)?;
            let m = outcome.metrics;
            println!("qabf,scd,ssim_a,nabf");
            println!("{:.5},{:.5},{:.5},{:.5}", m.qabf, m.scd, m.ssim_a, m.nabf);
        }
        Command::Decompose { image, output, format, settings } => {
            cmd_decompose(&image, &output, &settings.run_config(format, ReportFormat::Csv))?;
        }
        Command::Profile { ir, vis, row, output, settings } => {
            cmd_profile(&ir, &vis, row, &output, &settings.run_config(OutputFormat::Png8, ReportFormat::Csv))?;
        }
        Command::Bench { pairs, output, json, fused_dir, format, timings, settings } => {
            let report_format = if json { ReportFormat::Json } else { ReportFormat::Csv };
            let cfg = settings.run_config(format, report_format);
            let opts = BenchOptions { fused_dir, timings, threads: None };
            let report = cmd_bench(&pairs, &output, &cfg, &opts)?;
            let s = &report.summary;
            println!(
                "{} pairs: qabf {:.5}  scd {:.5}  ssim_a {:.5}  nabf {:.5}",
                s.pairs, s.qabf, s.scd, s.ssim_a, s.nabf
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
