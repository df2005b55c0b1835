//! Functions on the unit circle sampled on a uniform midpoint grid.

mod function;
mod grid;
pub mod io;
pub mod quadrature;

pub use function::{
    l1_distance, lp_norm, lp_norm_of_samples, NodeFlags, SampledMatrixFunction,
    SampledScalarFunction,
};
pub use grid::{CircleGrid, MIN_GRID_SIZE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircleError {
    #[error("grid size {0} is not a power of two >= 16")]
    InvalidGridSize(usize),
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid sizes differ ({left} vs {right})")]
    GridMismatch { left: usize, right: usize },
    #[error("matrix dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("sample {index} is not real (imaginary part {imaginary:e})")]
    NotReal { index: usize, imaginary: f64 },
    #[error("exponent {0} is not in [1, inf]")]
    InvalidExponent(f64),
}
