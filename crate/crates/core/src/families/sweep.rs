//! Sweeps over `ε` for one family: reports per (instance, estimate), ratio
//! ranges per decade and a log-log fit of the distance of the factors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::examples::{
    resolve_grid_size, ExampleKind, ExampleLowerBound, ExamplePair, ExampleParams,
};
use super::scalar::{
    divergence_from_measurements, measure_scalar, DivergenceReport, ScalarFamilyParams,
    ScalarMeasurement,
};
use super::FamilyError;
use crate::bounds::{
    attach_doubling, report_from_statistics, verify_pair_many, BoundReport, NodeDiagnostics,
    PairStatistics, SourceInfo, TheoremKind, VerifyOptions, VIOLATION_TOLERANCE,
};
use crate::circle::io::{format_number, IoError};
use crate::orlicz::PairSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    Ex1,
    Ex2,
    Scalar6,
}

impl FamilyId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ex1 => "ex1",
            Self::Ex2 => "ex2",
            Self::Scalar6 => "scalar6",
        }
    }

    pub fn default_eps(self) -> Vec<f64> {
        match self {
            Self::Ex1 | Self::Ex2 => vec![1e-2, 1e-3, 1e-4],
            Self::Scalar6 => (1..=6).map(|k| 10f64.powi(-k)).collect(),
        }
    }

    pub fn default_theorems(self) -> Vec<TheoremKind> {
        match self {
            Self::Ex1 => vec![TheoremKind::Thm13, TheoremKind::Thm13Inf],
            Self::Ex2 => vec![TheoremKind::Thm14, TheoremKind::Thm14Inf],
            Self::Scalar6 => vec![TheoremKind::Thm12],
        }
    }
}

impl std::str::FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ex1" => Ok(Self::Ex1),
            "ex2" => Ok(Self::Ex2),
            "scalar6" => Ok(Self::Scalar6),
            other => Err(FamilyError::InvalidParameter(format!(
                "unknown family `{other}`"
            ))),
        }
    }
}

fn two() -> f64 {
    2.0
}

fn half() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    0.6
}

fn default_max_grid() -> usize {
    1 << 24
}

/// A family config document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: FamilyId,
    /// Missing means the family's default sequence.
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default = "two")]
    pub p0: f64,
    #[serde(default = "two")]
    pub p1: f64,
    #[serde(default = "half")]
    pub alpha: f64,
    /// Exponent of the scalar family.
    #[serde(default = "two")]
    pub p: f64,
    /// Exponent of the divergence ratio for the scalar family.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Overrides the derived scalar-family parameters.
    #[serde(default)]
    pub scalar: Option<ScalarFamilyParams>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub grid_size: Option<usize>,
    /// Missing means the family's default estimates. An empty list runs
    /// only the family checks.
    #[serde(default)]
    pub theorems: Option<Vec<TheoremKind>>,
    #[serde(default)]
    pub pair0: Option<PairSpec>,
    #[serde(default)]
    pub pair1: Option<PairSpec>,
    #[serde(default)]
    pub always_double: bool,
    #[serde(default = "default_max_grid")]
    pub max_grid: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    VIOLATION_TOLERANCE
}

impl SweepConfig {
    pub fn new(family: FamilyId) -> Self {
        Self {
            family,
            eps: None,
            p0: 2.0,
            p1: 2.0,
            alpha: 0.5,
            p: 2.0,
            gamma: 0.6,
            scalar: None,
            delta: None,
            grid_size: None,
            theorems: None,
            pair0: None,
            pair1: None,
            always_double: false,
            max_grid: default_max_grid(),
            tolerance: VIOLATION_TOLERANCE,
        }
    }

    pub fn eps_values(&self) -> Vec<f64> {
        self.eps
            .clone()
            .unwrap_or_else(|| self.family.default_eps())
    }

    pub fn theorem_list(&self) -> Vec<TheoremKind> {
        self.theorems
            .clone()
            .unwrap_or_else(|| self.family.default_theorems())
    }

    fn options(&self) -> Vec<VerifyOptions> {
        self.theorem_list()
            .into_iter()
            .map(|theorem| VerifyOptions {
                theorem,
                p0: self.p0,
                p1: self.p1,
                alpha: self.alpha,
                pair0: self.pair0.clone(),
                pair1: self.pair1.clone(),
                nu: None,
                always_double: self.always_double,
                max_grid: self.max_grid,
                tolerance: self.tolerance,
            })
            .collect()
    }

    pub fn scalar_params(&self) -> Result<ScalarFamilyParams, FamilyError> {
        match self.scalar {
            Some(params) => {
                params.validate()?;
                Ok(params)
            }
            None => ScalarFamilyParams::defaults(self.p, self.gamma),
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: FamilyId,
    pub theorem: TheoremKind,
    pub eps: f64,
    pub grid_size: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub d1: f64,
    pub violation: bool,
    pub preconditions_hold: bool,
    pub doubled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecadeSummary {
    pub theorem: TheoremKind,
    /// `⌊log₁₀ ε⌋`.
    pub decade: i32,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub count: usize,
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LogLogFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LogLogFit {
        slope,
        intercept: my - slope * mx,
        points: points.to_vec(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub reports: Vec<BoundReport>,
    pub rows: Vec<SweepRow>,
    pub decades: Vec<DecadeSummary>,
    /// Distance of the factors against `‖G − F‖₁` (examples) or
    /// `‖log f − log g‖₁` (scalar family).
    pub fit: Option<LogLogFit>,
    pub lower_bounds: Vec<ExampleLowerBound>,
    pub divergence: Option<DivergenceReport>,
    pub failures: Vec<CellFailure>,
}

/// A cell whose evaluation failed; the rest of the sweep carries on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub eps: f64,
    pub message: String,
}

struct Cell {
    eps: f64,
    reports: Vec<BoundReport>,
    lower: Option<ExampleLowerBound>,
    measurement: Option<ScalarMeasurement>,
}

fn example_cell(config: &SweepConfig, kind: ExampleKind, eps: f64) -> Result<Cell, FamilyError> {
    let params = ExampleParams {
        kind,
        p1: config.p1,
        eps,
        delta: config.delta,
    };
    let size = resolve_grid_size(eps, config.grid_size)?;
    let options = config.options();
    let (mut reports, lower) = {
        let pair = ExamplePair::new(params, Some(size))?;
        (
            verify_pair_many(&pair, &options)?,
            pair.lower_bound_report()?,
        )
    };
    let wanted = config.always_double || reports.iter().any(|r| r.violation);
    if wanted && 2 * size <= config.max_grid {
        let fine = ExamplePair::new(params, Some(2 * size))?;
        for (report, fine) in reports.iter_mut().zip(verify_pair_many(&fine, &options)?) {
            attach_doubling(report, &fine);
        }
    }
    Ok(Cell {
        eps,
        reports,
        lower: Some(lower),
        measurement: None,
    })
}

fn scalar_cell(
    config: &SweepConfig,
    params: &ScalarFamilyParams,
    eps: f64,
) -> Result<Cell, FamilyError> {
    let m = measure_scalar(params, eps)?;
    let fp0 = params.f_lp_norm(config.p0);
    let q0 = config.p0 / (config.p0 - 1.0);
    let mut reports = Vec::new();
    for options in config.options() {
        if !options.theorem.is_scalar() {
            return Err(FamilyError::InvalidParameter(format!(
                "{} is not a scalar estimate",
                options.theorem
            )));
        }
        let f_psi0 = match &options.pair0 {
            None | Some(PairSpec::Power { .. }) => q0.powf(1.0 / q0) * fp0,
            Some(_) => {
                return Err(FamilyError::InvalidParameter(
                    "the scalar family supports power pairs only".into(),
                ))
            }
        };
        let stats = PairStatistics {
            n: 1,
            d1: m.d1,
            dlogdet: m.dlog,
            dlogplus: 0.0,
            p0: Some(config.p0),
            fp0: Some(fp0),
            finf: Some(f64::INFINITY),
            f_psi0: Some(f_psi0),
            ..Default::default()
        };
        let source = SourceInfo {
            label: "scalar6".into(),
            parameters: BTreeMap::from([
                ("eps".to_string(), eps),
                ("p".to_string(), params.p),
                ("beta".to_string(), params.beta),
                ("gamma0".to_string(), params.gamma0),
                ("alpha".to_string(), params.alpha),
                ("tau".to_string(), params.tau),
                ("lhs_error".to_string(), m.lhs_error),
            ]),
            factors: Vec::new(),
        };
        reports.push(report_from_statistics(
            &options,
            m.lhs,
            stats,
            0,
            NodeDiagnostics::default(),
            source,
        )?);
    }
    Ok(Cell {
        eps,
        reports,
        lower: None,
        measurement: Some(m),
    })
}

/// Runs every `(ε, estimate)` cell. Cells run on `jobs` threads (all cores
/// when `None`); the output order follows the config. Each example cell
/// holds two grids of up to `max_grid` nodes, so memory grows with `jobs`.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepResult, FamilyError> {
    let eps = config.eps_values();
    let scalar = match config.family {
        FamilyId::Scalar6 => Some(config.scalar_params()?),
        _ => None,
    };
    let run = |e: &f64| match config.family {
        FamilyId::Ex1 => example_cell(config, ExampleKind::Ex1, *e),
        FamilyId::Ex2 => example_cell(config, ExampleKind::Ex2, *e),
        FamilyId::Scalar6 => scalar_cell(config, scalar.as_ref().expect("set above"), *e),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| FamilyError::InvalidParameter(format!("thread pool: {e}")))?;
    let cells: Vec<Result<Cell, FamilyError>> = pool.install(|| eps.par_iter().map(run).collect());

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut lower_bounds = Vec::new();
    let mut measurements = Vec::new();
    let mut failures = Vec::new();
    for (e, cell) in eps.iter().zip(cells) {
        let cell = match cell {
            Ok(cell) => cell,
            Err(err) => {
                failures.push(CellFailure {
                    eps: *e,
                    message: err.to_string(),
                });
                continue;
            }
        };
        for r in &cell.reports {
            rows.push(SweepRow {
                family: config.family,
                theorem: r.theorem,
                eps: cell.eps,
                grid_size: r.grid_size,
                lhs: r.lhs,
                rhs: r.rhs,
                ratio: r.ratio,
                d1: r.statistics.d1,
                violation: r.violation,
                preconditions_hold: r.preconditions_hold,
                doubled: r.doubling.is_some(),
            });
        }
        reports.extend(cell.reports);
        lower_bounds.extend(cell.lower);
        measurements.extend(cell.measurement);
    }
    let mut decades: BTreeMap<(TheoremKind, i32), DecadeSummary> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.preconditions_hold) {
        let decade = row.eps.log10().floor() as i32;
        let entry = decades
            .entry((row.theorem, decade))
            .or_insert(DecadeSummary {
                theorem: row.theorem,
                decade,
                min_ratio: f64::INFINITY,
                max_ratio: 0.0,
                count: 0,
            });
        entry.min_ratio = entry.min_ratio.min(row.ratio);
        entry.max_ratio = entry.max_ratio.max(row.ratio);
        entry.count += 1;
    }
    let (points, divergence): (Vec<(f64, f64)>, _) = match &scalar {
        Some(params) if !measurements.is_empty() => (
            measurements.iter().map(|m| (m.dlog, m.lhs)).collect(),
            Some(divergence_from_measurements(
                params,
                config.gamma,
                measurements,
            )),
        ),
        _ => (lower_bounds.iter().map(|l| (l.d1, l.lhs)).collect(), None),
    };
    Ok(SweepResult {
        config: config.clone(),
        reports,
        rows,
        decades: decades.into_values().collect(),
        fit: log_log_fit(&points),
        lower_bounds,
        divergence,
        failures,
    })
}

impl SweepResult {
    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "family,theorem,eps,N,lhs,rhs,ratio,d1,violation,preconditions_hold,doubled\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.family.name(),
                r.theorem,
                format_number(r.eps),
                r.grid_size,
                format_number(r.lhs),
                format_number(r.rhs),
                format_number(r.ratio),
                format_number(r.d1),
                r.violation,
                r.preconditions_hold,
                r.doubled
            );
        }
        out
    }

    /// Writes `<family>.csv` and `<family>_summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), IoError> {
        fs::create_dir_all(dir)?;
        let name = self.config.family.name();
        let csv = dir.join(format!("{name}.csv"));
        let json = dir.join(format!("{name}_summary.json"));
        fs::write(&csv, self.to_csv())?;
        fs::write(&json, serde_json::to_string_pretty(self)?)?;
        Ok((csv, json))
    }
}
