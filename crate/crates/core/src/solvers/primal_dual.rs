//! Accelerated primal-dual iteration for `min_x ||x||_1 + G(x)`, written as the
//! saddle point `min_x max_p <p, x> - F*(p) + G(x)` with `F*` the indicator of
//! the unit l-infinity ball.

use nalgebra::DVector;

use super::prox::{prox_linf_ball, soft_threshold, QuadraticCoupling};
use super::RecoveryProblem;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct InnerState {
    /// `x^n`
    pub primal: DVector<f64>,
    /// `p^n`
    pub dual: DVector<f64>,
    /// `x_bar^n`
    pub extrapolated: DVector<f64>,
    /// `eta^n`
    pub primal_step: f64,
    /// `sigma^n`
    pub dual_step: f64,
    /// `theta^n`
    pub acceleration: f64,
    /// `gamma`
    pub convexity_modulus: f64,
}

impl InnerState {
    /// Cold start at `x`: zero dual, `x_bar = x`.
    pub fn cold(x: DVector<f64>, dual_step: f64, primal_step: f64, gamma: f64) -> Self {
        InnerState {
            dual: DVector::zeros(x.len()),
            extrapolated: x.clone(),
            primal: x,
            primal_step,
            dual_step,
            acceleration: 1.0,
            convexity_modulus: gamma,
        }
    }

    /// Optimality residual for `min ||x||_1 + G(x)` at the current primal-dual
    /// pair: `max(|p + grad G(x)|_inf, |x - soft(x + p, 1)|_inf)`. Zero exactly
    /// at a saddle point.
    pub fn kkt_residual(&self, coupling: &QuadraticCoupling<'_>, p: &RecoveryProblem<'_>) -> f64 {
        let stationarity = (&self.dual + coupling.gradient(&self.primal, p)).amax();
        let subgradient = (&self.primal - soft_threshold(&(&self.primal + &self.dual), 1.0)).amax();
        stationarity.max(subgradient)
    }
}

/// One accelerated primal-dual update:
///
/// ```text
/// p+    = proj_inf(p + sigma x_bar)
/// x+    = prox_{eta G}(x - eta p+)
/// theta = 1 / sqrt(1 + 2 gamma eta);  eta+ = theta eta;  sigma+ = sigma / theta
/// x_bar = x+ + theta (x+ - x)
/// ```
pub fn inner_primal_dual_step(
    s: InnerState,
    coupling: &QuadraticCoupling<'_>,
    p: &RecoveryProblem<'_>,
) -> Result<InnerState> {
    let InnerState {
        primal,
        dual,
        extrapolated,
        primal_step: eta,
        dual_step: sigma,
        convexity_modulus: gamma,
        ..
    } = s;

    let dual = prox_linf_ball(&(dual + extrapolated * sigma));
    let next = coupling.prox(&(&primal - &dual * eta), eta, p)?;
    let theta = 1.0 / (1.0 + 2.0 * gamma * eta).sqrt();
    let extrapolated = &next + (&next - &primal) * theta;
    Ok(InnerState {
        primal: next,
        dual,
        extrapolated,
        primal_step: theta * eta,
        dual_step: sigma / theta,
        acceleration: theta,
        convexity_modulus: gamma,
    })
}
