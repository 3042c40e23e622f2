//! Report serialization. `report.csv` and `report.json` hold only reproducible
//! numbers; wall times go to `timing.csv` and `timing.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::benchmark::{CellResult, ExperimentReport, LambdaSummary, ModelSummary};
use super::Model;
use crate::error::{Error, Result};

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
}

/// One row per cell: `model,lambda,trial,error,error_over_truth,converged,outer_iterations,failure`.
pub fn report_csv(report: &ExperimentReport) -> Result<String> {
    to_csv(&report.cells)
}

pub fn parse_report_csv(text: &str) -> Result<Vec<CellResult>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let cells = r
        .deserialize()
        .collect::<std::result::Result<Vec<CellResult>, _>>()?;
    for c in &cells {
        if !(c.lambda > 0.0 && c.lambda.is_finite()) {
            return Err(Error::Report(format!("invalid lambda {}", c.lambda)));
        }
        let bad = |v: Option<f64>| v.is_some_and(|e| e.is_nan() || e < 0.0);
        if bad(c.error) || bad(c.error_over_truth) {
            return Err(Error::Report(format!(
                "negative or NaN error in cell ({}, {}, {})",
                c.model, c.lambda, c.trial
            )));
        }
    }
    Ok(cells)
}

/// Per-model, per-lambda means over trials and the best lambda per model.
/// Models and lambdas keep their order of first appearance in `cells`.
pub fn summarize(cells: &[CellResult]) -> Vec<ModelSummary> {
    let mut models: Vec<Model> = Vec::new();
    for c in cells {
        if !models.contains(&c.model) {
            models.push(c.model);
        }
    }
    models
        .into_iter()
        .map(|model| {
            let mine: Vec<&CellResult> = cells.iter().filter(|c| c.model == model).collect();
            let mut lambdas: Vec<f64> = Vec::new();
            for c in &mine {
                if !lambdas.contains(&c.lambda) {
                    lambdas.push(c.lambda);
                }
            }
            let per_lambda: Vec<LambdaSummary> = lambdas
                .into_iter()
                .map(|lambda| {
                    let group: Vec<&&CellResult> =
                        mine.iter().filter(|c| c.lambda == lambda).collect();
                    let failures = group
                        .iter()
                        .filter(|c| c.error.is_none() || c.error_over_truth.is_none())
                        .count();
                    let mean = |f: fn(&CellResult) -> Option<f64>| {
                        (failures == 0 && !group.is_empty()).then(|| {
                            group.iter().map(|c| f(c).unwrap_or(0.0)).sum::<f64>()
                                / group.len() as f64
                        })
                    };
                    LambdaSummary {
                        lambda,
                        mean_error: mean(|c| c.error),
                        mean_error_over_truth: mean(|c| c.error_over_truth),
                        failures,
                    }
                })
                .collect();
            let best = per_lambda.iter().filter(|s| s.mean_error.is_some()).fold(
                None::<&LambdaSummary>,
                |best, s| match best {
                    Some(b) if b.mean_error <= s.mean_error => Some(b),
                    _ => Some(s),
                },
            );
            ModelSummary {
                model,
                best_lambda: best.map(|b| b.lambda),
                best_error: best.and_then(|b| b.mean_error),
                best_error_over_truth: best.and_then(|b| b.mean_error_over_truth),
                per_lambda,
            }
        })
        .collect()
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `report.csv`, `report.json` and, when timings are present,
/// `timing.csv` and `timing.json` into `dir`. Returns the written paths.
pub fn emit_report(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write(dir.join("report.csv"), &report_csv(report)?)?,
        write(
            dir.join("report.json"),
            &(serde_json::to_string_pretty(report)? + "\n"),
        )?,
    ];
    if let Some(timing) = &report.timing {
        written.push(write(dir.join("timing.csv"), &to_csv(&timing.cells)?)?);
        written.push(write(
            dir.join("timing.json"),
            &(serde_json::to_string_pretty(timing)? + "\n"),
        )?);
    }
    Ok(written)
}
