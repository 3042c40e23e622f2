use std::time::Instant;

use nalgebra::DVector;

use super::energy::{check_monotonicity, OuterIterate};
use super::primal_dual::{inner_primal_dual_step, InnerState};
use super::prox::{soft_threshold, QuadraticCoupling};
use super::{RecoveryProblem, SolveResult, SolverConfig, StopReason, TraceEntry};
use crate::error::{Error, Result};
use crate::experiments::Model;

/// `min_x ||x||_1 + (lambda/2) ||U x - f0||^2`
pub fn solve_standard_lasso(p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    if p.mask().is_some() {
        return Err(Error::MaskNotAllowed);
    }
    run_standard(p, cfg)
}

/// `min_x ||x||_1 + (lambda/2) ||R U x - f0||^2`
pub fn solve_standard_inpainting(
    p: &RecoveryProblem<'_>,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    if p.mask().is_none() {
        return Err(Error::MaskRequired);
    }
    run_standard(p, cfg)
}

/// `min_x ||x||_1 / ||x||_2 + (lambda/2) ||U x - f0||^2`
pub fn solve_ratio_lasso(p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    if p.mask().is_some() {
        return Err(Error::MaskNotAllowed);
    }
    run_ratio(p, cfg)
}

/// `min_x ||x||_1 / ||x||_2 + (lambda/2) ||R U x - f0||^2`
pub fn solve_ratio_inpainting(p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    if p.mask().is_none() {
        return Err(Error::MaskRequired);
    }
    run_ratio(p, cfg)
}

/// Dispatches on the model and on whether the problem carries a mask.
pub fn solve(model: Model, p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    match model {
        Model::Standard => run_standard(p, cfg),
        Model::Ratio => run_ratio(p, cfg),
    }
}

fn standard_entry(
    outer: usize,
    x: &DVector<f64>,
    p: &RecoveryProblem<'_>,
    inner: usize,
) -> TraceEntry {
    let l1 = x.lp_norm(1);
    let fidelity = p.fidelity(x);
    TraceEntry {
        outer,
        sparsity: l1,
        fidelity,
        total: l1 + fidelity,
        inner_iterations: inner,
        gap: None,
    }
}

/// Primal-dual iterations from `x0 = U^T R f0`, grouped into rounds of
/// `max_inner` iterations for the trace, until the optimality residual drops
/// below `inner_tolerance`.
fn run_standard(p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let coupling = QuadraticCoupling::lasso(p);
    let gamma = cfg.lasso_gamma.min(coupling.strong_convexity(p));
    let (sigma, eta) = cfg.initial_steps;
    let balance = p.fidelity_weight().sqrt();
    let (sigma, eta) = (sigma * balance, eta / balance);
    let x0 = p.spectral_data().clone();

    let mut trace = vec![standard_entry(0, &x0, p, 0)];
    let mut iterates = Vec::new();
    if cfg.keep_iterates {
        iterates.push(x0.clone());
    }
    let mut state = InnerState::cold(x0, sigma, eta, gamma);
    let mut stop_reason = StopReason::MaxIterations;

    for k in 1..=cfg.max_outer {
        let mut used = 0;
        let mut done = false;
        while used < cfg.max_inner {
            state = inner_primal_dual_step(state, &coupling, p)?;
            used += 1;
            if used % cfg.residual_check_interval == 0
                && state.kkt_residual(&coupling, p) <= cfg.inner_tolerance
            {
                done = true;
                break;
            }
        }
        trace.push(standard_entry(k, &state.primal, p, used));
        if cfg.keep_iterates {
            iterates.push(state.primal.clone());
        }
        if done {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    // At a saddle point x = soft(x + p, 1); the thresholded form carries exact zeros.
    let solution = soft_threshold(&(&state.primal + &state.dual), 1.0);
    Ok(SolveResult {
        solution,
        trace,
        converged: stop_reason == StopReason::Tolerance,
        stop_reason,
        wall_time: start.elapsed(),
        iterates,
    })
}

/// Proximal forward-backward outer loop for the ratio model.
///
/// Each outer step sets `tau_k` (default `||x_k||_2`), takes the explicit step
/// `y_k = x_k + (tau_k E_k / B_k) x_k / ||x_k||_2`, then runs the primal-dual
/// loop on `||x||_1 + w [(lambda / 2)||R U x - f0||^2 + (1 / 2 tau_k)||x - y_k||^2]`
/// (`w` from [`ProxScaling`](super::ProxScaling))
/// from a cold start at `x_k`. The first inner iterate past `min_inner` that
/// moved and satisfies the quasi-monotonicity inequality becomes `x_{k+1}`.
fn run_ratio(p: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let (sigma, eta) = cfg.initial_steps;
    let x0 = p.spectral_data().clone();
    if x0.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }

    let mut iter = OuterIterate::new(x0, p, cfg.time_step, cfg.prox_scaling)?;
    let mut trace = vec![TraceEntry {
        outer: 0,
        sparsity: iter.energy.ratio,
        fidelity: iter.energy.fidelity,
        total: iter.energy.total,
        inner_iterations: 0,
        gap: None,
    }];
    let mut iterates = Vec::new();
    if cfg.keep_iterates {
        iterates.push(iter.x.clone());
    }
    let mut stop_reason = StopReason::MaxIterations;

    for k in 1..=cfg.max_outer {
        let coupling = QuadraticCoupling::ratio(&iter, p);
        let mut state = InnerState::cold(iter.x.clone(), sigma, eta, cfg.gamma);
        let mut accepted = None;
        for n in 1..=cfg.max_inner {
            state = inner_primal_dual_step(state, &coupling, p)?;
            if n < cfg.min_inner {
                continue;
            }
            let shrunk = cfg
                .sparse_candidates
                .then(|| soft_threshold(&(&state.primal + &state.dual), 1.0));
            for candidate in shrunk.iter().chain([&state.primal]) {
                if *candidate == iter.x {
                    continue;
                }
                match check_monotonicity(&iter, candidate, p) {
                    Ok(check) if check.satisfied => {
                        accepted = Some((candidate.clone(), check, n));
                        break;
                    }
                    Ok(_) | Err(Error::ZeroVector) => {}
                    Err(e) => return Err(e),
                }
            }
            if accepted.is_some() {
                break;
            }
        }

        let Some((next, check, used)) = accepted else {
            stop_reason = StopReason::NoDescentStep;
            break;
        };
        let previous_total = iter.energy.total;
        iter = OuterIterate::new(next, p, cfg.time_step, cfg.prox_scaling)?;
        debug_assert_eq!(iter.energy, check.candidate_energy);
        trace.push(TraceEntry {
            outer: k,
            sparsity: iter.energy.ratio,
            fidelity: iter.energy.fidelity,
            total: iter.energy.total,
            inner_iterations: used,
            gap: Some(check.gap),
        });
        if cfg.keep_iterates {
            iterates.push(iter.x.clone());
        }
        let change = (previous_total - iter.energy.total).abs()
            / previous_total.abs().max(f64::MIN_POSITIVE);
        if change < cfg.outer_tolerance {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    Ok(SolveResult {
        solution: iter.x,
        trace,
        // A stall means no iterate nearby improves the energy enough to pass
        // the test, which is the ratio model's notion of a stationary point.
        converged: stop_reason != StopReason::MaxIterations,
        stop_reason,
        wall_time: start.elapsed(),
        iterates,
    })
}
