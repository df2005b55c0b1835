//! The serializable record of an invocation, output locations and the
//! mapping from library errors to exit codes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use specfact::bounds::{BoundsError, TheoremKind, VIOLATION_TOLERANCE};
use specfact::circle::io::IoError;
use specfact::factorize::{FactorError, WilsonConfig};
use specfact::families::FamilyError;

/// Everything needed to rerun a `factor` or `verify` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Builtin generator name, or `file` when densities are read from disk.
    pub family: String,
    pub input: Option<PathBuf>,
    pub input_g: Option<PathBuf>,
    pub output: PathBuf,
    pub grid_n: Option<usize>,
    pub theorems: Vec<TheoremKind>,
    pub eps: f64,
    pub p0: f64,
    pub p1: f64,
    pub alpha: f64,
    pub delta: Option<f64>,
    pub dim: usize,
    pub degree: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub always_double: bool,
    pub summary_only: bool,
    /// Iteration cap of the matrix factorizer.
    pub max_iterations: Option<usize>,
}

impl RunConfig {
    pub fn new(command: &str, family: &str, output: PathBuf) -> Self {
        Self {
            command: command.into(),
            family: family.into(),
            input: None,
            input_g: None,
            output,
            grid_n: None,
            theorems: Vec::new(),
            eps: 1e-2,
            p0: 2.0,
            p1: 2.0,
            alpha: 0.5,
            delta: None,
            dim: 2,
            degree: 4,
            tolerance: VIOLATION_TOLERANCE,
            seed: 0,
            always_double: false,
            summary_only: false,
            max_iterations: None,
        }
    }

    pub fn wilson(&self) -> WilsonConfig {
        let mut config = WilsonConfig::default();
        if let Some(m) = self.max_iterations {
            config.max_iterations = m;
        }
        config
    }
}

/// How a command ended when it ran to completion.
#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Clean,
    Violation,
    /// Reports were written, but an estimate's hypotheses did not hold.
    Precondition(String),
}

/// A command that could not complete.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input or arguments; exit code 2.
    Parse(String),
    /// A stated hypothesis fails; exit code 3.
    Precondition(String),
    /// Anything else, including non-convergence; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Parse(_) => 2,
            Self::Precondition(_) => 3,
            Self::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(m) => write!(f, "parse error: {m}"),
            Self::Precondition(m) => write!(f, "precondition failed: {m}"),
            Self::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse { .. } | IoError::Json(_) => Self::Parse(e.to_string()),
            IoError::Circle(_) => Self::Parse(e.to_string()),
            IoError::Io(_) => Self::Failure(e.to_string()),
        }
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match &e {
            FactorError::NonPositiveNode { index, value } => Self::Precondition(format!(
                "density is not positive definite at node {index} (smallest eigenvalue {value:e})"
            )),
            FactorError::LogNotIntegrable => Self::Precondition(e.to_string()),
            FactorError::NotConverged {
                residual,
                iterations,
                partial,
            } => Self::Failure(format!(
                "factorization did not converge: {iterations} iterations, coefficient residual {residual:e}, L1 residual of last iterate {:e}",
                partial.residual
            )),
            _ => Self::Failure(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Factor(f) => f.into(),
            BoundsError::Precondition { .. } | BoundsError::InvalidNu(_) => {
                Self::Precondition(e.to_string())
            }
            BoundsError::UnknownTheorem(_) | BoundsError::WrongFamily { .. } => {
                Self::Parse(e.to_string())
            }
            _ => Self::Failure(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::InvalidParameter(_) => Self::Parse(e.to_string()),
            FamilyError::GridTooCoarse { .. } => Self::Precondition(e.to_string()),
            FamilyError::Bounds(b) => b.into(),
            FamilyError::Factor(f) => f.into(),
            FamilyError::Io(io) => io.into(),
            _ => Self::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Failure(e.to_string())
    }
}

pub fn json_parse_error(path: &Path, e: &serde_json::Error) -> CliError {
    CliError::Parse(format!(
        "{}: line {}, column {}: {e}",
        path.display(),
        e.line(),
        e.column()
    ))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| json_parse_error(path, &e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failure(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let parse: CliError = IoError::Parse {
            line: 4,
            message: "x".into(),
        }
        .into();
        assert_eq!(parse.code(), 2);
        assert!(parse.to_string().contains("line 4"));
        let pre: CliError = FactorError::NonPositiveNode {
            index: 3,
            value: -1.0,
        }
        .into();
        assert_eq!(pre.code(), 3);
        let unknown: CliError = BoundsError::UnknownTheorem("x".into()).into();
        assert_eq!(unknown.code(), 2);
        let coarse: CliError = FamilyError::GridTooCoarse {
            grid_size: 16,
            nodes: 0,
            required: 64,
        }
        .into();
        assert_eq!(coarse.code(), 3);
    }

    #[test]
    fn run_config_roundtrips() {
        let mut run = RunConfig::new("verify", "ex1", "out".into());
        run.theorems = vec![TheoremKind::Thm13, TheoremKind::Thm14Inf];
        run.delta = Some(0.25);
        let text = serde_json::to_string(&run).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), run);
    }
}
