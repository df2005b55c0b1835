//! Parametric pairs used to probe the estimates, and the sweep driver.

pub mod examples;
pub mod random;
pub mod scalar;
pub mod sweep;

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::circle::io::IoError;
use crate::circle::CircleError;
use crate::factorize::FactorError;
use crate::matrix::MatrixError;

pub use examples::{
    auto_grid_size, resolve_grid_size, ExampleKind, ExampleLowerBound, ExamplePair, ExampleParams,
    Normalization, MIN_ARC_NODES,
};
pub use scalar::{
    divergence_from_measurements, gamma_divergence_check, measure_scalar, scalar_family,
    DivergenceReport, DivergenceRow, ScalarFamilyParams, ScalarFamilySamples, ScalarMeasurement,
};
pub use sweep::{
    log_log_fit, run_sweep, CellFailure, DecadeSummary, FamilyId, LogLogFit, SweepConfig,
    SweepResult, SweepRow,
};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "grid of {grid_size} nodes puts {nodes} nodes in [ε, 2ε]; at least {required} are needed"
    )]
    GridTooCoarse {
        grid_size: usize,
        nodes: usize,
        required: usize,
    },
    #[error("quadrature at ε = {eps:e} did not settle (error {error:e}; trace {trace:?})")]
    Quadrature {
        eps: f64,
        error: f64,
        trace: Vec<(usize, f64)>,
    },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Io(#[from] IoError),
}
