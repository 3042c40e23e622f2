//! Closed-form proximal maps used by the primal-dual inner loop.

use nalgebra::DVector;

use super::energy::OuterIterate;
use super::RecoveryProblem;
use crate::error::{Error, Result};

/// Projection onto the unit l-infinity ball, `z_i / max(1, |z_i|)`. This is the
/// prox of the ball's indicator, i.e. of the conjugate of `||.||_1`.
pub fn prox_linf_ball(z: &DVector<f64>) -> DVector<f64> {
    z.map(|v| v / v.abs().max(1.0))
}

/// Soft thresholding `sign(v) max(|v| - t, 0)`.
pub fn soft_threshold(v: &DVector<f64>, t: f64) -> DVector<f64> {
    v.map(|x| x.signum() * (x.abs() - t).max(0.0))
}

/// Smooth part of the inner problem,
///
/// `G(x) = (a/2) ||R U x - f0||^2 + (b/2) ||x - y||^2`.
///
/// The standard Lasso has `a = lambda, b = 0`; the ratio model's implicit step
/// has `a = w lambda, b = w / tau_k, y = y_k` with `w` from
/// [`OuterIterate::prox_weight`].
#[derive(Debug, Clone, Copy)]
pub struct QuadraticCoupling<'a> {
    pub data_weight: f64,
    pub anchor_weight: f64,
    pub anchor: Option<&'a DVector<f64>>,
}

impl<'a> QuadraticCoupling<'a> {
    pub fn lasso(p: &RecoveryProblem<'_>) -> Self {
        QuadraticCoupling {
            data_weight: p.fidelity_weight(),
            anchor_weight: 0.0,
            anchor: None,
        }
    }

    pub fn ratio(iter: &'a OuterIterate, p: &RecoveryProblem<'_>) -> Self {
        let w = iter.prox_weight();
        QuadraticCoupling {
            data_weight: w * p.fidelity_weight(),
            anchor_weight: w / iter.time_step,
            anchor: Some(&iter.target),
        }
    }

    /// Modulus of strong convexity of `G`. The data term only contributes when
    /// every measurement is observed.
    pub fn strong_convexity(&self, p: &RecoveryProblem<'_>) -> f64 {
        let data = if p.fully_observed() {
            self.data_weight
        } else {
            0.0
        };
        data + self.anchor_weight
    }

    pub fn value(&self, x: &DVector<f64>, p: &RecoveryProblem<'_>) -> f64 {
        let mut v = self.data_weight * p.residual_norm_squared(x) / 2.0;
        if let Some(y) = self.anchor {
            v += self.anchor_weight * (x - y).norm_squared() / 2.0;
        }
        v
    }

    pub fn gradient(&self, x: &DVector<f64>, p: &RecoveryProblem<'_>) -> DVector<f64> {
        let mut g = p.residual_gradient(x) * self.data_weight;
        if let Some(y) = self.anchor {
            g += (x - y) * self.anchor_weight;
        }
        g
    }

    /// `argmin_x step G(x) + ||x - z||^2 / 2`, using the masked form when the
    /// problem carries a mask.
    pub fn prox(
        &self,
        z: &DVector<f64>,
        step: f64,
        p: &RecoveryProblem<'_>,
    ) -> Result<DVector<f64>> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::NonPositiveStep(step));
        }
        p.basis().check_len(z)?;
        let rhs = self.right_hand_side(z, step, p);
        match p.mask() {
            None => Ok(rhs / (1.0 + step * (self.data_weight + self.anchor_weight))),
            Some(mask) => {
                // U^T R U is not diagonal, but R + c I is diagonal in the node domain.
                let base = 1.0 + step * self.anchor_weight;
                let data = step * self.data_weight;
                let mut nodes = p.basis().modes() * rhs;
                for (v, &r) in nodes.iter_mut().zip(mask.iter()) {
                    *v /= base + data * r;
                }
                Ok(p.basis().modes().tr_mul(&nodes))
            }
        }
    }

    /// `z + step a U^T R f0 + step b y`
    fn right_hand_side(
        &self,
        z: &DVector<f64>,
        step: f64,
        p: &RecoveryProblem<'_>,
    ) -> DVector<f64> {
        let mut rhs = z + p.spectral_data() * (step * self.data_weight);
        if let Some(y) = self.anchor {
            rhs.axpy(step * self.anchor_weight, y, 1.0);
        }
        rhs
    }
}

/// Prox of `step G` for the ratio model's implicit step, fully observed data:
///
/// `(z + w lambda step U^T f0 + w step y_k / tau_k) / (1 + w lambda step + w step / tau_k)`
pub fn prox_quadratic_full(
    z: &DVector<f64>,
    iter: &OuterIterate,
    step: f64,
    p: &RecoveryProblem<'_>,
) -> Result<DVector<f64>> {
    if p.mask().is_some() {
        return Err(Error::MaskNotAllowed);
    }
    QuadraticCoupling::ratio(iter, p).prox(z, step, p)
}

/// Prox of `step G` for the ratio model's implicit step with a selector mask:
/// `U^T (U b / K)` with `b = z + w lambda step U^T R f0 + w step y_k / tau_k` and
/// the diagonal `K = (1 + w step / tau_k) I + w lambda step R`.
pub fn prox_quadratic_masked(
    z: &DVector<f64>,
    iter: &OuterIterate,
    step: f64,
    p: &RecoveryProblem<'_>,
) -> Result<DVector<f64>> {
    if p.mask().is_none() {
        return Err(Error::MaskRequired);
    }
    QuadraticCoupling::ratio(iter, p).prox(z, step, p)
}
