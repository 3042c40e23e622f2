//! Graph Fourier basis: eigendecomposition of the Laplacian and the forward and
//! inverse graph Fourier transforms.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

/// Eigenvalues above `-NEGATIVE_CLAMP * max(1, lambda_max)` are round-off and get clamped to 0.
pub const NEGATIVE_CLAMP: f64 = 1e-8;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Orthonormal eigenvectors of `L` (as columns) with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasis {
    modes: DMatrix<f64>,
    spectrum: DVector<f64>,
}

impl FourierBasis {
    /// Wraps an already orthogonal basis. Only dimensions are checked; use
    /// [`eigendecompose`] for bases derived from a graph.
    pub fn from_parts(modes: DMatrix<f64>, spectrum: DVector<f64>) -> Result<Self> {
        let n = modes.nrows();
        if modes.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: modes.ncols(),
            });
        }
        if spectrum.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: spectrum.len(),
            });
        }
        Ok(FourierBasis { modes, spectrum })
    }

    pub fn dim(&self) -> usize {
        self.modes.nrows()
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn spectrum(&self) -> &DVector<f64> {
        &self.spectrum
    }

    pub fn mode(&self, index: usize) -> DVector<f64> {
        self.modes.column(index).into_owned()
    }

    /// `max |U^T U - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.modes.tr_mul(&self.modes);
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `||L u_i - lambda_i u_i||_2` for every mode.
    pub fn eigen_residuals(&self, laplacian: &LaplacianMatrix) -> Vec<f64> {
        let lu = laplacian.entries() * &self.modes;
        (0..self.dim())
            .map(|i| (lu.column(i) - self.modes.column(i) * self.spectrum[i]).norm())
            .collect()
    }

    pub(crate) fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        Ok(())
    }
}

/// Full dense symmetric eigendecomposition of `L`.
///
/// Eigenpairs come back sorted by ascending eigenvalue. Each eigenvector is
/// signed so that its largest-magnitude entry is positive, the lowest index
/// winning ties. Inside a repeated eigenvalue the basis of the eigenspace is
/// whatever the solver produced.
pub fn eigendecompose(laplacian: &LaplacianMatrix) -> Result<FourierBasis> {
    let n = laplacian.dim();
    let eigen = SymmetricEigen::try_new(
        laplacian.entries().clone(),
        f64::EPSILON,
        EIGEN_MAX_ITERATIONS,
    )
    .ok_or(Error::EigenNonConvergence(n))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

    let largest = order
        .last()
        .map(|&i| eigen.eigenvalues[i].abs())
        .unwrap_or(0.0);
    let clamp = NEGATIVE_CLAMP * largest.max(1.0);

    let mut modes = DMatrix::zeros(n, n);
    let mut spectrum = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let value = eigen.eigenvalues[src];
        if value < -clamp {
            return Err(Error::NotPositiveSemidefinite(value));
        }
        spectrum[dst] = value.max(0.0);

        let mut column = eigen.eigenvectors.column(src).into_owned();
        let norm = column.norm();
        if norm > 0.0 {
            column /= norm;
        }
        if column[sign_anchor(&column)] < 0.0 {
            column.neg_mut();
        }
        modes.set_column(dst, &column);
    }
    Ok(FourierBasis { modes, spectrum })
}

/// Index of the largest-magnitude entry; near-ties (relative 1e-12) resolve to the lowest index.
fn sign_anchor(v: &DVector<f64>) -> usize {
    let max = v.amax();
    v.iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

/// `f_hat = U^T f`.
pub fn forward_transform(f: &DVector<f64>, basis: &FourierBasis) -> Result<DVector<f64>> {
    basis.check_len(f)?;
    Ok(basis.modes.tr_mul(f))
}

/// `f = U f_hat`.
pub fn inverse_transform(
    coefficients: &DVector<f64>,
    basis: &FourierBasis,
) -> Result<DVector<f64>> {
    basis.check_len(coefficients)?;
    Ok(&basis.modes * coefficients)
}

/// `index,eigenvalue` rows.
pub fn spectrum_csv(basis: &FourierBasis) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, value) in basis.spectrum.iter().enumerate() {
        let _ = writeln!(out, "{i},{value}");
    }
    out
}
