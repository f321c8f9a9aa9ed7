//! Means of positive matrices and of positive functions on finite spaces,
//! with executable checks of the order, orthogonality and reconstruction
//! results built on them.

pub mod cones;
pub mod error;
pub mod harness;
pub mod means;
pub mod sampling;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
pub use means::{arithmetic_mean, geometric_mean, harmonic_mean, matrix_mean, scalar_mean, MeanKind};
pub use spectral::{HermitianMatrix, Interval, SpectralDecomposition};
