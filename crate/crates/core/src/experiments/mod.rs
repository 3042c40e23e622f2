//! Synthetic recovery experiments: signal synthesis, lambda sweeps over seeded
//! trials, reports and plots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub mod benchmark;
pub mod config;
pub mod plot;
pub mod report;
pub mod settings;
pub mod signal;

pub use benchmark::{
    run_benchmark, synthesize_instance, Artifacts, CellResult, CellTiming, ExperimentReport,
    Instance, LambdaSummary, ModelSummary, Recovery, TimingSummary,
};
pub use config::{
    default_lambda_grid, log_grid, parse_experiment_config, ExperimentConfig, GraphSource,
};
pub use plot::emit_plots;
pub use report::{emit_report, parse_report_csv, report_csv, summarize};
pub use settings::{parse_run_settings, RunSettings};
pub use signal::{
    apply_mask, generate_sparse_signal, recovery_error, spectral_noise, synthesize_measurements,
    RecoveryError, SignalModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `||x||_1`
    Standard,
    /// `||x||_1 / ||x||_2`
    Ratio,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Standard => "standard",
            Model::Ratio => "ratio",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which models a run covers. Spelled `l1`, `l1l2` or `both` in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModelSelection {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "l1l2")]
    L1L2,
    #[default]
    #[serde(rename = "both")]
    Both,
}

impl ModelSelection {
    pub fn models(self) -> Vec<Model> {
        match self {
            ModelSelection::L1 => vec![Model::Standard],
            ModelSelection::L1L2 => vec![Model::Ratio],
            ModelSelection::Both => vec![Model::Standard, Model::Ratio],
        }
    }
}

impl FromStr for ModelSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "l1" => Ok(ModelSelection::L1),
            "l1l2" => Ok(ModelSelection::L1L2),
            "both" => Ok(ModelSelection::Both),
            other => Err(Error::InvalidConfig(format!(
                "unknown model {other:?}, expected l1, l1l2 or both"
            ))),
        }
    }
}
