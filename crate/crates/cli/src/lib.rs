//! Image I/O, run configuration, reports and the command implementations
//! behind the `latfuse` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use commands::{
    cmd_bench, cmd_decompose, cmd_fuse, cmd_profile, discover_pairs, BenchOptions, FuseOutcome,
    ImagePair, PairScan, ProfileRow, THREADS_ENV,
};
pub use config::{ReportFormat, RunConfig};
pub use error::{CliError, Result};
pub use io::{load_image, save_image, OutputFormat};
pub use report::{BenchReport, BenchRow, BenchSummary};
