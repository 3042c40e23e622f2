//! Recovery of graph signals that are sparse in the graph Fourier domain.
//!
//! The crate solves two models on the Fourier basis `U` of a graph Laplacian:
//!
//! * the standard Lasso `min ||x||_1 + (lambda/2) ||R U x - f0||^2`, and
//! * the l1/l2 ratio Lasso `min ||x||_1 / ||x||_2 + (lambda/2) ||R U x - f0||^2`,
//!
//! where the diagonal selector `R` is the identity unless some measurements are
//! missing (inpainting). Modules:
//!
//! * [`graph`]: weighted graphs, Laplacians, community generator, edge lists
//! * [`spectral`]: Fourier basis and transforms
//! * [`solvers`]: energies, proximal maps, primal-dual and ratio solvers
//! * [`experiments`]: signal synthesis, lambda sweeps, reports and plots

pub mod error;
pub mod experiments;
pub mod graph;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
