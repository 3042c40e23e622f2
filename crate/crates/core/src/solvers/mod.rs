//! Standard and l1/l2-ratio Lasso solvers on a graph Fourier basis, with and
//! without an observation mask.
//!
//! Both models share the same accelerated primal-dual machinery. The ratio
//! model wraps it in a proximal forward-backward outer loop: an explicit step
//! along the gradient of `||x||_2` followed by an implicit step on `||x||_1`
//! plus the data term, solved approximately by the inner primal-dual loop and
//! accepted once the quasi-monotonicity inequality holds.

use std::fmt::Write as _;
use std::time::Duration;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FourierBasis;

pub mod energy;
mod lasso;
pub mod primal_dual;
pub mod prox;

pub use energy::{
    check_monotonicity, energy, forward_step, EnergyBreakdown, MonotonicityCheck, OuterIterate,
    ProxScaling, TimeStep, MONOTONICITY_SLACK,
};
pub use lasso::{
    solve, solve_ratio_inpainting, solve_ratio_lasso, solve_standard_inpainting,
    solve_standard_lasso,
};
pub use primal_dual::{inner_primal_dual_step, InnerState};
pub use prox::{
    prox_linf_ball, prox_quadratic_full, prox_quadratic_masked, soft_threshold, QuadraticCoupling,
};

/// Sensing basis, optional 0/1 selector mask, measurements and fidelity weight.
///
/// With a mask, unobserved measurements are stored as 0, so `R f0 = f0`.
#[derive(Debug, Clone)]
pub struct RecoveryProblem<'a> {
    basis: &'a FourierBasis,
    mask: Option<DVector<f64>>,
    measurements: DVector<f64>,
    fidelity_weight: f64,
    /// `U^T R f0`
    spectral_data: DVector<f64>,
}

impl<'a> RecoveryProblem<'a> {
    pub fn new(
        basis: &'a FourierBasis,
        mask: Option<DVector<f64>>,
        measurements: DVector<f64>,
        fidelity_weight: f64,
    ) -> Result<Self> {
        basis.check_len(&measurements)?;
        if !(fidelity_weight > 0.0 && fidelity_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fidelity weight must be positive and finite, got {fidelity_weight}"
            )));
        }
        if measurements.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("measurements must be finite".into()));
        }
        let mut measurements = measurements;
        if let Some(mask) = &mask {
            basis.check_len(mask)?;
            if mask.iter().any(|&m| m != 0.0 && m != 1.0) {
                return Err(Error::InvalidConfig("mask entries must be 0 or 1".into()));
            }
            measurements.component_mul_assign(mask);
        }
        let spectral_data = basis.modes().tr_mul(&measurements);
        Ok(RecoveryProblem {
            basis,
            mask,
            measurements,
            fidelity_weight,
            spectral_data,
        })
    }

    /// Same data under another fidelity weight.
    pub fn with_fidelity_weight(&self, fidelity_weight: f64) -> Result<Self> {
        if !(fidelity_weight > 0.0 && fidelity_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fidelity weight must be positive and finite, got {fidelity_weight}"
            )));
        }
        Ok(RecoveryProblem {
            fidelity_weight,
            ..self.clone()
        })
    }

    pub fn basis(&self) -> &'a FourierBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn mask(&self) -> Option<&DVector<f64>> {
        self.mask.as_ref()
    }

    pub fn measurements(&self) -> &DVector<f64> {
        &self.measurements
    }

    pub fn fidelity_weight(&self) -> f64 {
        self.fidelity_weight
    }

    pub fn spectral_data(&self) -> &DVector<f64> {
        &self.spectral_data
    }

    pub fn fully_observed(&self) -> bool {
        self.mask
            .as_ref()
            .is_none_or(|m| m.iter().all(|&v| v == 1.0))
    }

    /// `||R U x - f0||^2`. Without a mask this is `||x - U^T f0||^2`, equal by
    /// orthogonality of `U` and free of matrix products.
    pub fn residual_norm_squared(&self, x: &DVector<f64>) -> f64 {
        match &self.mask {
            None => (x - &self.spectral_data).norm_squared(),
            Some(mask) => {
                let mut r = self.basis.modes() * x - &self.measurements;
                r.component_mul_assign(mask);
                r.norm_squared()
            }
        }
    }

    /// Gradient of `||R U x - f0||^2 / 2`, i.e. `U^T R (U x - f0)`.
    pub fn residual_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.mask {
            None => x - &self.spectral_data,
            Some(mask) => {
                let mut r = self.basis.modes() * x - &self.measurements;
                r.component_mul_assign(mask);
                self.basis.modes().tr_mul(&r)
            }
        }
    }

    /// `(lambda / 2) ||R U x - f0||^2`
    pub fn fidelity(&self, x: &DVector<f64>) -> f64 {
        self.fidelity_weight * self.residual_norm_squared(x) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_outer: usize,
    pub max_inner: usize,
    /// Inner iterations the ratio solver runs before it may accept a candidate.
    pub min_inner: usize,
    /// Relative change of the total energy that ends the outer loop.
    pub outer_tolerance: f64,
    /// Primal-dual optimality residual that ends the standard Lasso.
    pub inner_tolerance: f64,
    /// Iterations between optimality-residual checks of the standard Lasso.
    pub residual_check_interval: usize,
    /// Acceleration parameter of the ratio model's inner loop.
    pub gamma: f64,
    /// Acceleration parameter of the standard Lasso; 0 keeps the steps constant,
    /// which converges linearly once the support settles. Capped at the strong
    /// convexity modulus of the data term.
    pub lasso_gamma: f64,
    /// `(sigma_0, eta_0)`. The standard Lasso rescales them to
    /// `(sigma_0 sqrt(lambda), eta_0 / sqrt(lambda))`.
    pub initial_steps: (f64, f64),
    pub time_step: TimeStep,
    pub prox_scaling: ProxScaling,
    /// Also offer the ratio model's test the shrunk point `soft(x + p, 1)` of
    /// each inner iterate, tried before `x` itself. It has exact zeros and
    /// equals `x` at a saddle point.
    pub sparse_candidates: bool,
    /// Keep every accepted outer iterate in [`SolveResult::iterates`].
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_outer: 100,
            max_inner: 200,
            min_inner: 5,
            outer_tolerance: 1e-6,
            inner_tolerance: 1e-9,
            residual_check_interval: 10,
            gamma: 1.0,
            lasso_gamma: 0.0,
            initial_steps: (1.0, 1.0),
            time_step: TimeStep::Norm,
            prox_scaling: ProxScaling::Norm,
            sparse_candidates: true,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.max_outer == 0 || self.max_inner == 0 {
            return bad("max_outer and max_inner must be positive");
        }
        if self.residual_check_interval == 0 {
            return bad("residual_check_interval must be positive");
        }
        if self.min_inner == 0 || self.min_inner > self.max_inner {
            return bad("min_inner must be in 1..=max_inner");
        }
        if !(self.outer_tolerance > 0.0 && self.inner_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite())
            || !(self.lasso_gamma >= 0.0 && self.lasso_gamma.is_finite())
        {
            return bad("gamma must be a finite non-negative number");
        }
        let (sigma, eta) = self.initial_steps;
        if !(sigma > 0.0 && eta > 0.0 && sigma * eta <= 1.0) {
            return bad("initial steps must be positive with sigma * eta <= 1");
        }
        if let TimeStep::Fixed(tau) = self.time_step {
            if !(tau > 0.0 && tau.is_finite()) {
                return bad("fixed time step must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Relative energy change (ratio) or optimality residual (standard) below tolerance.
    Tolerance,
    /// No inner iterate within `max_inner` passed the quasi-monotonicity test;
    /// the last accepted iterate is returned.
    NoDescentStep,
    MaxIterations,
}

/// One accepted outer step. For the standard Lasso `sparsity` is `||x||_1`
/// and `gap` is absent; for the ratio model `sparsity` is `||x||_1 / ||x||_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub outer: usize,
    pub sparsity: f64,
    pub fidelity: f64,
    pub total: f64,
    pub inner_iterations: usize,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub solution: DVector<f64>,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub wall_time: Duration,
    /// Accepted outer iterates, starting with the initializer. Empty unless
    /// [`SolverConfig::keep_iterates`] is set.
    pub iterates: Vec<DVector<f64>>,
}

/// `k,E,F,total,inner_iters,gap` rows; the gap column is empty where undefined.
pub fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut out = String::from("k,E,F,total,inner_iters,gap\n");
    for t in trace {
        let gap = t.gap.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            t.outer, t.sparsity, t.fidelity, t.total, t.inner_iterations, gap
        );
    }
    out
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn problem_validation() {
        let (basis, f0) = identity_problem(&[1.0, 2.0]);
        assert!(RecoveryProblem::new(&basis, None, f0.clone(), 0.0).is_err());
        assert!(RecoveryProblem::new(&basis, None, DVector::zeros(3), 1.0).is_err());
        let bad_mask = DVector::from_vec(vec![1.0, 0.5]);
        assert!(RecoveryProblem::new(&basis, Some(bad_mask), f0.clone(), 1.0).is_err());
        let mask = DVector::from_vec(vec![0.0, 1.0]);
        let p = RecoveryProblem::new(&basis, Some(mask), f0, 1.0).unwrap();
        assert_eq!(p.measurements().as_slice(), &[0.0, 2.0]);
        assert!(!p.fully_observed());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let c = SolverConfig {
            min_inner: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            initial_steps: (2.0, 1.0),
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let trace = [
            TraceEntry {
                outer: 0,
                sparsity: 1.5,
                fidelity: 0.25,
                total: 1.75,
                inner_iterations: 0,
                gap: None,
            },
            TraceEntry {
                outer: 1,
                sparsity: 1.25,
                fidelity: 0.25,
                total: 1.5,
                inner_iterations: 7,
                gap: Some(0.125),
            },
        ];
        assert_eq!(
            trace_csv(&trace),
            "k,E,F,total,inner_iters,gap\n0,1.5,0.25,1.75,0,\n1,1.25,0.25,1.5,7,0.125\n"
        );
    }
}
