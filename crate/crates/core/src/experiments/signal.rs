//! Synthetic sparse spectra, noisy measurements, measurement masks and the
//! recovery error metric.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FourierBasis;

// Independent ChaCha streams under one seed.
const SIGNAL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const MASK_STREAM: u64 = 3;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalModel {
    pub sparsity_fraction: f64,
    pub amplitude_low: f64,
    pub amplitude_high: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SignalModel {
    fn default() -> Self {
        SignalModel {
            sparsity_fraction: 0.05,
            amplitude_low: -1.0,
            amplitude_high: 1.0,
            noise_sigma: 0.1,
            seed: 0,
        }
    }
}

impl SignalModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.sparsity_fraction > 0.0 && self.sparsity_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sparsity_fraction must be in (0, 1], got {}",
                self.sparsity_fraction
            )));
        }
        if !(self.amplitude_low < self.amplitude_high
            && self.amplitude_low.is_finite()
            && self.amplitude_high.is_finite())
        {
            return Err(Error::InvalidConfig(
                "amplitude_low must be below amplitude_high".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// `round(sparsity_fraction * n)`
    pub fn support_size(&self, n: usize) -> usize {
        (self.sparsity_fraction * n as f64).round() as usize
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SignalModel {
            seed,
            ..self.clone()
        }
    }
}

/// Exactly `round(sparsity_fraction * n)` nonzero coefficients on a uniformly
/// drawn support, amplitudes uniform on `[amplitude_low, amplitude_high)`.
pub fn generate_sparse_signal(model: &SignalModel, n: usize) -> Result<DVector<f64>> {
    model.validate()?;
    let k = model.support_size(n);
    if n == 0 || k == 0 {
        return Err(Error::InvalidConfig(format!(
            "sparsity {} of {n} entries rounds to an empty support",
            model.sparsity_fraction
        )));
    }
    let mut rng = rng_for(model.seed, SIGNAL_STREAM);
    let support = rand::seq::index::sample(&mut rng, n, k.min(n));
    let mut x = DVector::zeros(n);
    for i in support {
        // a draw of exactly 0 would break the support count
        let mut v = 0.0;
        while v == 0.0 {
            v = rng.random_range(model.amplitude_low..model.amplitude_high);
        }
        x[i] = v;
    }
    Ok(x)
}

/// Spectral-domain noise `eps ~ N(0, sigma^2)` drawn from the model's noise stream.
pub fn spectral_noise(model: &SignalModel, n: usize) -> DVector<f64> {
    if model.noise_sigma == 0.0 {
        return DVector::zeros(n);
    }
    let normal = Normal::new(0.0, model.noise_sigma).expect("validated sigma");
    let mut rng = rng_for(model.seed, NOISE_STREAM);
    DVector::from_fn(n, |_, _| normal.sample(&mut rng))
}

/// `f0 = U (x0 + eps)`: the noise sits on the spectral coefficients.
pub fn synthesize_measurements(
    x0: &DVector<f64>,
    basis: &FourierBasis,
    model: &SignalModel,
) -> Result<DVector<f64>> {
    model.validate()?;
    basis.check_len(x0)?;
    let noisy = x0 + spectral_noise(model, x0.len());
    Ok(basis.modes() * noisy)
}

/// Zeroes exactly `round(fraction * n)` uniformly chosen measurements. Returns
/// the masked measurements and the 0/1 mask of kept entries.
pub fn apply_mask(
    f0: &DVector<f64>,
    fraction: f64,
    seed: u64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!(
            "mask fraction must be in [0, 1), got {fraction}"
        )));
    }
    let n = f0.len();
    let removed = ((fraction * n as f64).round() as usize).min(n);
    let mut mask = DVector::from_element(n, 1.0);
    if removed > 0 {
        let mut rng = rng_for(seed, MASK_STREAM);
        for i in rand::seq::index::sample(&mut rng, n, removed) {
            mask[i] = 0.0;
        }
    }
    Ok((f0.component_mul(&mask), mask))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryError {
    /// `||x - x0|| / ||x||`
    pub over_estimate: f64,
    /// `||x - x0|| / ||x0||`
    pub over_truth: f64,
}

pub fn recovery_error(x: &DVector<f64>, x0: &DVector<f64>) -> Result<RecoveryError> {
    if x.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            actual: x.len(),
        });
    }
    let (nx, nx0) = (x.norm(), x0.norm());
    if nx == 0.0 || nx0 == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let diff = (x - x0).norm();
    Ok(RecoveryError {
        over_estimate: diff / nx,
        over_truth: diff / nx0,
    })
}
