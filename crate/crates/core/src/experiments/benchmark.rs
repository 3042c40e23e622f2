use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::report::summarize;
use super::signal::{
    apply_mask, generate_sparse_signal, recovery_error, synthesize_measurements, SignalModel,
};
use super::Model;
use crate::error::Result;
use crate::graph::build_laplacian;
use crate::solvers::{solve, RecoveryProblem, TraceEntry};
use crate::spectral::{eigendecompose, FourierBasis};

/// One seeded recovery instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub truth: DVector<f64>,
    /// Measurements with unobserved entries set to 0.
    pub measurements: DVector<f64>,
    /// `None` when every measurement is observed.
    pub mask: Option<DVector<f64>>,
}

impl Instance {
    pub fn problem<'a>(&self, basis: &'a FourierBasis, lambda: f64) -> Result<RecoveryProblem<'a>> {
        RecoveryProblem::new(basis, self.mask.clone(), self.measurements.clone(), lambda)
    }
}

/// Draws `x0`, the noisy measurements `U (x0 + eps)` and, for a positive
/// `mask_fraction`, the observation mask. Everything derives from `signal.seed`.
pub fn synthesize_instance(
    basis: &FourierBasis,
    signal: &SignalModel,
    mask_fraction: f64,
) -> Result<Instance> {
    let truth = generate_sparse_signal(signal, basis.dim())?;
    let f0 = synthesize_measurements(&truth, basis, signal)?;
    let (measurements, mask) = if mask_fraction > 0.0 {
        let (masked, mask) = apply_mask(&f0, mask_fraction, signal.seed)?;
        (masked, Some(mask))
    } else {
        (f0, None)
    };
    Ok(Instance {
        truth,
        measurements,
        mask,
    })
}

/// Outcome of one (model, lambda, trial) cell. Contains no timing, so a report
/// built from cells is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub model: Model,
    pub lambda: f64,
    pub trial: usize,
    /// `||x - x0|| / ||x||`; empty when the cell failed.
    pub error: Option<f64>,
    /// `||x - x0|| / ||x0||`
    pub error_over_truth: Option<f64>,
    pub converged: bool,
    pub outer_iterations: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTiming {
    pub model: Model,
    pub lambda: f64,
    pub trial: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSummary {
    pub lambda: f64,
    /// Mean over trials; `None` if any trial failed.
    pub mean_error: Option<f64>,
    pub mean_error_over_truth: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: Model,
    /// Lambda with the lowest mean error; ties go to the
    /// smaller lambda.
    pub best_lambda: Option<f64>,
    pub best_error: Option<f64>,
    pub best_error_over_truth: Option<f64>,
    pub per_lambda: Vec<LambdaSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub standard_mean_seconds: Option<f64>,
    pub ratio_mean_seconds: Option<f64>,
    /// Mean ratio-model wall time over mean standard-model wall time.
    pub runtime_ratio: Option<f64>,
    pub cells: Vec<CellTiming>,
}

impl TimingSummary {
    pub fn from_cells(cells: Vec<CellTiming>) -> Self {
        let mean = |m: Model| {
            let v: Vec<f64> = cells
                .iter()
                .filter(|c| c.model == m)
                .map(|c| c.seconds)
                .collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        let standard = mean(Model::Standard);
        let ratio = mean(Model::Ratio);
        let runtime_ratio = match (standard, ratio) {
            (Some(s), Some(r)) if s > 0.0 => Some(r / s),
            _ => None,
        };
        TimingSummary {
            standard_mean_seconds: standard,
            ratio_mean_seconds: ratio,
            runtime_ratio,
            cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub model: Model,
    pub lambda: f64,
    pub solution: DVector<f64>,
    pub trace: Vec<TraceEntry>,
}

/// Inputs for the plots: the graph spectrum and, for trial 0, the truth and
/// each model's recovery at its best lambda.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub spectrum: Vec<f64>,
    pub truth: DVector<f64>,
    pub recoveries: Vec<Recovery>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub mask_fraction: f64,
    pub trials: usize,
    pub lambda_grid: Vec<f64>,
    pub models: Vec<Model>,
    /// Ordered by model, then lambda, then trial.
    pub cells: Vec<CellResult>,
    pub summaries: Vec<ModelSummary>,
    /// Wall-clock data; kept out of the serialized report.
    #[serde(skip)]
    pub timing: Option<TimingSummary>,
    #[serde(skip)]
    pub artifacts: Option<Artifacts>,
}

impl ExperimentReport {
    pub fn summary(&self, model: Model) -> Option<&ModelSummary> {
        self.summaries.iter().find(|s| s.model == model)
    }

    /// `(standard - ratio) / standard` at each model's best lambda.
    pub fn relative_improvement(&self) -> Option<f64> {
        let s = self.summary(Model::Standard)?.best_error?;
        let r = self.summary(Model::Ratio)?.best_error?;
        (s > 0.0).then(|| (s - r) / s)
    }
}

struct CellOutcome {
    result: CellResult,
    seconds: f64,
    recovery: Option<Recovery>,
}

fn run_cell(
    model: Model,
    lambda: f64,
    trial: usize,
    instance: &Instance,
    basis: &FourierBasis,
    cfg: &ExperimentConfig,
) -> CellOutcome {
    let failed = |msg: String, seconds: f64| CellOutcome {
        result: CellResult {
            model,
            lambda,
            trial,
            error: None,
            error_over_truth: None,
            converged: false,
            outer_iterations: 0,
            failure: Some(msg),
        },
        seconds,
        recovery: None,
    };
    let solved = instance
        .problem(basis, lambda)
        .and_then(|p| solve(model, &p, &cfg.solver));
    let r = match solved {
        Ok(r) => r,
        Err(e) => return failed(e.to_string(), 0.0),
    };
    let seconds = r.wall_time.as_secs_f64();
    let err = match recovery_error(&r.solution, &instance.truth) {
        Ok(err) => err,
        Err(e) => return failed(e.to_string(), seconds),
    };
    CellOutcome {
        result: CellResult {
            model,
            lambda,
            trial,
            error: Some(err.over_estimate),
            error_over_truth: Some(err.over_truth),
            converged: r.converged,
            outer_iterations: r.trace.len().saturating_sub(1),
            failure: None,
        },
        seconds,
        recovery: (trial == 0).then_some(Recovery {
            model,
            lambda,
            solution: r.solution,
            trace: r.trace,
        }),
    }
}

/// Runs every (model, lambda, trial) cell of the sweep on one graph.
///
/// Trial `t` uses signal seed `cfg.signal.seed + t`. Cells run in parallel and
/// are merged in a fixed order, so the report does not depend on scheduling.
/// A failing cell is recorded with its error message and excluded from the
/// means.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let graph = cfg.graph.load()?;
    let basis = eigendecompose(&build_laplacian(&graph))?;
    let instances = (0..cfg.trials)
        .map(|t| {
            let signal = cfg.signal.with_seed(cfg.signal.seed.wrapping_add(t as u64));
            synthesize_instance(&basis, &signal, cfg.mask_fraction)
        })
        .collect::<Result<Vec<_>>>()?;

    let models = cfg.models();
    let jobs: Vec<(Model, f64, usize)> = models
        .iter()
        .flat_map(|&m| {
            cfg.lambda_grid
                .iter()
                .flat_map(move |&l| (0..cfg.trials).map(move |t| (m, l, t)))
        })
        .collect();
    let outcomes: Vec<CellOutcome> = jobs
        .par_iter()
        .map(|&(m, l, t)| run_cell(m, l, t, &instances[t], &basis, cfg))
        .collect();

    let mut cells = Vec::with_capacity(outcomes.len());
    let mut timings = Vec::with_capacity(outcomes.len());
    let mut recoveries = Vec::new();
    for o in outcomes {
        timings.push(CellTiming {
            model: o.result.model,
            lambda: o.result.lambda,
            trial: o.result.trial,
            seconds: o.seconds,
        });
        cells.push(o.result);
        recoveries.extend(o.recovery);
    }

    let summaries = summarize(&cells);
    let best: Vec<Recovery> = summaries
        .iter()
        .filter_map(|s| {
            let lambda = s.best_lambda?;
            recoveries
                .iter()
                .find(|r| r.model == s.model && r.lambda == lambda)
                .cloned()
        })
        .collect();

    Ok(ExperimentReport {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        mask_fraction: cfg.mask_fraction,
        trials: cfg.trials,
        lambda_grid: cfg.lambda_grid.clone(),
        models,
        cells,
        summaries,
        timing: Some(TimingSummary::from_cells(timings)),
        artifacts: Some(Artifacts {
            spectrum: basis.spectrum().iter().copied().collect(),
            truth: instances[0].truth.clone(),
            recoveries: best,
        }),
    })
}
