use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::RecoveryProblem;
use crate::error::{Error, Result};

/// Accepted transitions may undershoot zero by this much (round-off).
pub const MONOTONICITY_SLACK: f64 = 1e-12;

/// Terms of the ratio objective at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `||x||_1`
    pub l1: f64,
    /// `||x||_2`
    pub l2: f64,
    /// `l1 / l2`
    pub ratio: f64,
    /// `(lambda / 2) ||R U x - f0||^2`
    pub fidelity: f64,
    /// `ratio + fidelity`
    pub total: f64,
}

pub fn energy(x: &DVector<f64>, p: &RecoveryProblem<'_>) -> Result<EnergyBreakdown> {
    p.basis().check_len(x)?;
    let l2 = x.norm();
    if l2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let l1 = x.lp_norm(1);
    let ratio = l1 / l2;
    let fidelity = p.fidelity(x);
    Ok(EnergyBreakdown {
        l1,
        l2,
        ratio,
        fidelity,
        total: ratio + fidelity,
    })
}

/// Outer time step rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStep {
    /// `tau_k = ||x_k||_2`
    Norm,
    Fixed(f64),
}

impl TimeStep {
    pub fn at(&self, energy: &EnergyBreakdown) -> f64 {
        match *self {
            TimeStep::Norm => energy.l2,
            TimeStep::Fixed(tau) => tau,
        }
    }
}

/// Weight `w` on the smooth part of the implicit step
/// `argmin ||x||_1 + w [(lambda/2)||R U x - f0||^2 + (1/2 tau_k)||x - y_k||^2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxScaling {
    /// `w = B_k`: the implicit step is `prox_{c1 T + tau F}(y_k)` with `c1 = tau_k / B_k`,
    /// whose fixed points are stationary points of `E + F` and which the
    /// quasi-monotonicity inequality is derived for.
    Norm,
    /// `w = E_k`, i.e. `c1 = tau_k / E_k`.
    Energy,
}

/// State of the outer proximal forward-backward loop at step k.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterIterate {
    pub x: DVector<f64>,
    pub energy: EnergyBreakdown,
    pub time_step: f64,
    /// `y_k`, filled by the forward step.
    pub target: DVector<f64>,
    pub scaling: ProxScaling,
}

impl OuterIterate {
    /// Evaluates the energy at `x` and runs the forward step.
    pub fn new(
        x: DVector<f64>,
        p: &RecoveryProblem<'_>,
        rule: TimeStep,
        scaling: ProxScaling,
    ) -> Result<Self> {
        let energy = energy(&x, p)?;
        let time_step = rule.at(&energy);
        if !(time_step > 0.0 && time_step.is_finite()) {
            return Err(Error::NonPositiveStep(time_step));
        }
        let mut iter = OuterIterate {
            target: x.clone(),
            x,
            energy,
            time_step,
            scaling,
        };
        iter.target = forward_step(&iter)?;
        Ok(iter)
    }

    /// `c0 = tau E / B`, the explicit step length on `d||x||_2`.
    pub fn explicit_coefficient(&self) -> f64 {
        self.time_step * self.energy.ratio / self.energy.l2
    }

    /// `c1 = tau / B`, the weight on `||x||_1` in the implicit step.
    pub fn implicit_coefficient(&self) -> f64 {
        self.time_step / self.energy.l2
    }

    pub fn prox_weight(&self) -> f64 {
        match self.scaling {
            ProxScaling::Norm => self.energy.l2,
            ProxScaling::Energy => self.energy.ratio,
        }
    }
}

/// `y = x + c0 x / ||x||_2`: explicit ascent along the gradient of the l2 norm.
pub fn forward_step(iter: &OuterIterate) -> Result<DVector<f64>> {
    let norm = iter.x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let scale = iter.explicit_coefficient() / norm;
    Ok(&iter.x + &iter.x * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityCheck {
    pub satisfied: bool,
    /// Left-hand side minus right-hand side of the quasi-monotonicity inequality.
    pub gap: f64,
    pub candidate_energy: EnergyBreakdown,
}

/// Quasi-monotonicity test for moving from `prev` to `candidate`:
///
/// `(B_n / B_k)(E_k - E_n) + (F_k - F_n) >= ||x_k - x_n||^2 / tau_k`
pub fn check_monotonicity(
    prev: &OuterIterate,
    candidate: &DVector<f64>,
    p: &RecoveryProblem<'_>,
) -> Result<MonotonicityCheck> {
    let next = energy(candidate, p)?;
    let cur = &prev.energy;
    let lhs = next.l2 / cur.l2 * (cur.ratio - next.ratio) + (cur.fidelity - next.fidelity);
    let rhs = (&prev.x - candidate).norm_squared() / prev.time_step;
    let gap = lhs - rhs;
    Ok(MonotonicityCheck {
        satisfied: gap >= -MONOTONICITY_SLACK,
        gap,
        candidate_energy: next,
    })
}
