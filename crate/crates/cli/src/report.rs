//! Benchmark reports. Metric columns are printed with 5 decimals; every row
//! also carries the effective configuration so a report is self-describing.

use std::io::Write;
use std::path::Path;

use latfuse::MetricsReport;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub pair: String,
    pub qabf: f64,
    pub scd: f64,
    pub ssim_a: f64,
    pub nabf: f64,
    pub iterations_ir: usize,
    pub iterations_vis: usize,
    pub converged: bool,
    /// Wall-clock seconds; only recorded on request since it breaks
    /// byte-for-byte reproducibility of the report.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub pairs: usize,
    pub qabf: f64,
    pub scd: f64,
    pub ssim_a: f64,
    pub nabf: f64,
    pub iterations_ir: f64,
    pub iterations_vis: f64,
    /// Fraction of pairs whose decompositions both converged.
    pub converged: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: RunConfig,
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl BenchReport {
    pub fn new(config: RunConfig, rows: Vec<BenchRow>) -> Self {
        let timed = !rows.is_empty() && rows.iter().all(|r| r.runtime_s.is_some());
        let summary = BenchSummary {
            pairs: rows.len(),
            qabf: mean(rows.iter().map(|r| r.qabf)),
            scd: mean(rows.iter().map(|r| r.scd)),
            ssim_a: mean(rows.iter().map(|r| r.ssim_a)),
            nabf: mean(rows.iter().map(|r| r.nabf)),
            iterations_ir: mean(rows.iter().map(|r| r.iterations_ir as f64)),
            iterations_vis: mean(rows.iter().map(|r| r.iterations_vis as f64)),
            converged: mean(rows.iter().map(|r| if r.converged { 1.0 } else { 0.0 })),
            runtime_s: timed.then(|| mean(rows.iter().filter_map(|r| r.runtime_s))),
        };
        Self { config, rows, summary }
    }

    pub fn mean_metrics(&self) -> MetricsReport {
        MetricsReport {
            qabf: self.summary.qabf,
            scd: self.summary.scd,
            ssim_a: self.summary.ssim_a,
            nabf: self.summary.nabf,
        }
    }

    fn timed(&self) -> bool {
        self.summary.runtime_s.is_some()
    }

    fn config_header() -> [&'static str; 11] {
        ["lambda", "w1", "w2", "s1", "s2", "mu0", "rho", "mu_max", "tol", "max_iter", "max_dim"]
    }

    fn config_fields(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            c.solver.lambda.to_string(),
            c.weights.w1.to_string(),
            c.weights.w2.to_string(),
            c.weights.s1.to_string(),
            c.weights.s2.to_string(),
            c.solver.mu0.to_string(),
            c.solver.rho.to_string(),
            c.solver.mu_max.to_string(),
            c.solver.tol.to_string(),
            c.solver.max_iter.to_string(),
            c.max_dim.map_or_else(String::new, |d| d.to_string()),
        ]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["pair", "qabf", "scd", "ssim_a", "nabf", "iterations_ir", "iterations_vis", "converged"];
        if self.timed() {
            header.push("runtime_s");
        }
        header.extend(Self::config_header());
        wtr.write_record(&header)?;

        let cfg = self.config_fields();
        for row in &self.rows {
            let mut rec = vec![
                row.pair.clone(),
                format!("{:.5}", row.qabf),
                format!("{:.5}", row.scd),
                format!("{:.5}", row.ssim_a),
                format!("{:.5}", row.nabf),
                row.iterations_ir.to_string(),
                row.iterations_vis.to_string(),
                u8::from(row.converged).to_string(),
            ];
            if self.timed() {
                rec.push(format!("{:.3}", row.runtime_s.unwrap_or_default()));
            }
            rec.extend(cfg.iter().cloned());
            wtr.write_record(&rec)?;
        }

        let s = &self.summary;
        let mut rec = vec![
            "mean".to_string(),
            format!("{:.5}", s.qabf),
            format!("{:.5}", s.scd),
            format!("{:.5}", s.ssim_a),
            format!("{:.5}", s.nabf),
            format!("{:.5}", s.iterations_ir),
            format!("{:.5}", s.iterations_vis),
            format!("{:.5}", s.converged),
        ];
        if let Some(t) = s.runtime_s {
            rec.push(format!("{t:.3}"));
        }
        rec.extend(cfg);
        wtr.write_record(&rec)?;
        wtr.flush().map_err(|e| CliError::io("<report>", e))
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out).map_err(|e| CliError::io("<report>", e))
    }

    pub fn write_to(&self, path: &Path, json: bool) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let out = std::io::BufWriter::new(file);
        if json {
            self.write_json(out)
        } else {
            self.write_csv(out)
        }
    }
}
