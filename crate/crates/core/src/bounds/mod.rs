//! Constants, right-hand-side evaluators and the comparator that checks a
//! sampled pair against them.

pub mod constants;
pub mod rhs;
pub mod verify;

use thiserror::Error;

use crate::circle::CircleError;
use crate::factorize::FactorError;
use crate::matrix::MatrixError;
use crate::orlicz::OrliczError;

pub use constants::{c_constant, k0, kolmogorov_constants, scalar_constant};
pub use rhs::{
    evaluate, rhs_matrix_orlicz, rhs_matrix_power, rhs_scalar, Nu, OrliczSetup, PairStatistics,
    RhsParts, TheoremKind,
};
pub use verify::{
    attach_doubling, measure, report_from_statistics, verify_many_with_doubling, verify_pair,
    verify_pair_many, verify_with_doubling, BoundReport, DoublingCheck, NodeDiagnostics, PairNode,
    PairSource, SampledPair, SourceInfo, VerifyOptions, VIOLATION_TOLERANCE,
};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("{theorem}: precondition failed: {condition}")]
    Precondition {
        theorem: TheoremKind,
        condition: String,
    },
    #[error("{theorem}: missing statistic `{field}`")]
    MissingStatistic {
        theorem: TheoremKind,
        field: &'static str,
    },
    #[error("{theorem} is not a {expected} estimate")]
    WrongFamily {
        theorem: TheoremKind,
        expected: &'static str,
    },
    #[error("invalid ν: {0}")]
    InvalidNu(String),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}
