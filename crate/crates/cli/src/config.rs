use latfuse::{FusionWeights, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::io::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

/// Everything that determines a run. Defaults are λ = 0.8, w1 = w2 = 0.5 and
/// s1 = s2 = 1 at native resolution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub weights: FusionWeights,
    /// Longest image side after loading; larger inputs are downscaled.
    pub max_dim: Option<usize>,
    pub output_format: OutputFormat,
    pub report_format: ReportFormat,
}

impl RunConfig {
    pub fn lambda(&self) -> f64 {
        self.solver.lambda
    }

    pub fn validate(&self) -> latfuse::Result<()> {
        self.solver.validate()?;
        self.weights.validate()?;
        if self.max_dim.is_some_and(|d| d < 2) {
            return Err(latfuse::Error::InvalidInput("max_dim must be at least 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_settings() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.lambda(), 0.8);
        assert_eq!(cfg.weights, FusionWeights { w1: 0.5, w2: 0.5, s1: 1.0, s2: 1.0 });
        assert_eq!(cfg.max_dim, None);
        assert_eq!(cfg.output_format, OutputFormat::Png8);
        assert_eq!(cfg.report_format, ReportFormat::Csv);
        cfg.validate().unwrap();
    }

    #[test]
    fn tiny_max_dim_is_rejected() {
        let cfg = RunConfig { max_dim: Some(1), ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
