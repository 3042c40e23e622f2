//! Flat run settings, one field per command-line flag. A JSON settings file
//! uses the same names; values given on the command line win.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GraphSource};
use super::signal::SignalModel;
use super::ModelSelection;
use crate::error::{Error, Result};
use crate::graph::CommunityGraphConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSettings {
    /// Edge-list file; when absent a community graph is generated.
    pub graph: Option<PathBuf>,
    pub nodes: Option<usize>,
    pub communities: Option<usize>,
    pub mixing: Option<f64>,
    pub mean_degree: Option<f64>,
    pub sparsity: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub mask_fraction: Option<f64>,
    pub trials: Option<usize>,
    /// Seeds the graph generator and the first trial's signal.
    pub seed: Option<u64>,
    pub model: Option<ModelSelection>,
    pub out_dir: Option<PathBuf>,
    pub max_outer: Option<usize>,
    pub max_inner: Option<usize>,
    /// Relative energy change that ends the ratio solver's outer loop.
    pub tol: Option<f64>,
}

pub fn parse_run_settings(text: &str) -> Result<RunSettings> {
    Ok(serde_json::from_str(text)?)
}

macro_rules! take_over {
    ($base:ident, $over:ident, $($field:ident),*) => {
        RunSettings { $($field: $over.$field.or($base.$field)),* }
    };
}

impl RunSettings {
    /// Fields set in `over` replace those in `self`. A `lambda` in `over`
    /// also replaces a `lambda_grid` in `self`, and the other way round.
    pub fn overridden_by(self, over: RunSettings) -> RunSettings {
        let mut base = self;
        if over.lambda.is_some() || over.lambda_grid.is_some() {
            base.lambda = None;
            base.lambda_grid = None;
        }
        take_over!(
            base,
            over,
            graph,
            nodes,
            communities,
            mixing,
            mean_degree,
            sparsity,
            sigma,
            lambda,
            lambda_grid,
            mask_fraction,
            trials,
            seed,
            model,
            out_dir,
            max_outer,
            max_inner,
            tol
        )
    }

    pub fn graph_source(&self) -> GraphSource {
        match &self.graph {
            Some(path) => GraphSource::EdgeList { path: path.clone() },
            None => {
                let d = CommunityGraphConfig::default();
                GraphSource::Community(CommunityGraphConfig {
                    node_count: self.nodes.unwrap_or(d.node_count),
                    community_count: self.communities.unwrap_or(d.community_count),
                    mixing: self.mixing.unwrap_or(d.mixing),
                    mean_degree: self.mean_degree.unwrap_or(d.mean_degree),
                    seed: self.seed.unwrap_or(d.seed),
                })
            }
        }
    }

    /// Experiment config with defaults for every unset field. `lambda` alone
    /// gives a one-point grid; giving both `lambda` and `lambda_grid` is an error.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let lambda_grid = match (&self.lambda, &self.lambda_grid) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "give either lambda or lambda-grid, not both".into(),
                ))
            }
            (Some(l), None) => vec![*l],
            (None, Some(g)) => g.clone(),
            (None, None) => d.lambda_grid,
        };
        let mut solver = d.solver;
        if let Some(v) = self.max_outer {
            solver.max_outer = v;
        }
        if let Some(v) = self.max_inner {
            solver.max_inner = v;
        }
        if let Some(v) = self.tol {
            solver.outer_tolerance = v;
        }
        let ds = SignalModel::default();
        let cfg = ExperimentConfig {
            graph: self.graph_source(),
            signal: SignalModel {
                sparsity_fraction: self.sparsity.unwrap_or(ds.sparsity_fraction),
                noise_sigma: self.sigma.unwrap_or(ds.noise_sigma),
                seed: self.seed.unwrap_or(ds.seed),
                ..ds
            },
            lambda_grid,
            mask_fraction: self.mask_fraction.unwrap_or(d.mask_fraction),
            trials: self.trials.unwrap_or(d.trials),
            models: self.model.unwrap_or(d.models),
            solver,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
