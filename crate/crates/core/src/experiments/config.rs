use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::signal::SignalModel;
use super::{Model, ModelSelection};
use crate::error::{Error, Result};
use crate::graph::{generate_community_graph, load_edge_list, CommunityGraphConfig, WeightedGraph};
use crate::solvers::SolverConfig;

/// Where the benchmark graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    Community(CommunityGraphConfig),
    EdgeList { path: PathBuf },
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Community(CommunityGraphConfig::default())
    }
}

impl GraphSource {
    pub fn load(&self) -> Result<WeightedGraph> {
        match self {
            GraphSource::Community(cfg) => generate_community_graph(cfg),
            GraphSource::EdgeList { path } => load_edge_list(path),
        }
    }
}

/// `count` log-spaced points from `low` to `high` inclusive.
pub fn log_grid(low: f64, high: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![low],
        _ => {
            let (a, b) = (low.log10(), high.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

/// 15 points over `[1e-2, 1e3]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-2, 1e3, 15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub signal: SignalModel,
    pub lambda_grid: Vec<f64>,
    /// Fraction of measurements removed; 0 runs the plain Lasso models.
    pub mask_fraction: f64,
    /// Seeded instances per (model, lambda) cell. Trial `t` uses signal seed
    /// `signal.seed + t`.
    pub trials: usize,
    pub models: ModelSelection,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::default(),
            signal: SignalModel::default(),
            lambda_grid: default_lambda_grid(),
            mask_fraction: 0.0,
            trials: 10,
            models: ModelSelection::Both,
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidConfig("lambda_grid must not be empty".into()));
        }
        if let Some(bad) = self
            .lambda_grid
            .iter()
            .find(|l| !(**l > 0.0 && l.is_finite()))
        {
            return Err(Error::InvalidConfig(format!(
                "lambda values must be positive and finite, got {bad}"
            )));
        }
        let mut sorted = self.lambda_grid.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(
                "lambda_grid has repeated values".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.mask_fraction) {
            return Err(Error::InvalidConfig(format!(
                "mask_fraction must be in [0, 1), got {}",
                self.mask_fraction
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if let GraphSource::Community(cfg) = &self.graph {
            cfg.validate()?;
        }
        self.signal.validate()?;
        self.solver.validate()
    }

    pub fn models(&self) -> Vec<Model> {
        self.models.models()
    }
}

/// Parses and validates a JSON experiment config. Missing fields take defaults.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}
