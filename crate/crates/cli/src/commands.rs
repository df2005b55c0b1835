use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use specfact::bounds::{
    attach_doubling, kolmogorov_constants, verify_pair_many, BoundReport, PairNode, PairSource,
    VerifyOptions,
};
use specfact::circle::io::{format_number, read_sampled, write_sampled};
use specfact::circle::SampledMatrixFunction;
use specfact::factorize::{
    normalize_factor_at_zero, spectral_factor, FactorSummary, SpectralFactor,
};
use specfact::families::{run_sweep, SweepConfig, SweepResult};
use specfact::matrix::dense;
use specfact::properties::{run_all, run_suite, SuiteOutcome, SUITES};

use crate::run::{read_json, write_json, CliError, RunConfig, Status};
use crate::sources::{
    const_spd, example_densities, example_kind, example_pair, pair_source, random_densities,
    triangular_factor, DEFAULT_GRID,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorRecord {
    pub label: String,
    pub summary: FactorSummary,
    /// `‖F − F⁺(F⁺)*‖_{L_1}/‖F‖_{L_1}`.
    pub relative_residual: f64,
    /// `|log det F⁺(0) − ½·mean log det F|`.
    pub det_identity_defect: f64,
    /// Largest pointwise distance to the known factor, when there is one.
    pub reference_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorOutput {
    pub run: RunConfig,
    pub grid_size: usize,
    pub factors: Vec<FactorRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub run: RunConfig,
    pub reports: Vec<BoundReport>,
}

fn max_distance(a: &SampledMatrixFunction, b: impl Fn(usize, &mut [Complex64])) -> f64 {
    let n = a.dim();
    let mut other = vec![Complex64::new(0.0, 0.0); n * n];
    let mut diff = other.clone();
    let mut worst: f64 = 0.0;
    for (j, m) in a.nodes().enumerate() {
        b(j, &mut other);
        for ((d, x), y) in diff.iter_mut().zip(m).zip(&other) {
            *d = x - y;
        }
        worst = worst.max(dense::operator_norm(&diff, n));
    }
    worst
}

fn record(
    label: &str,
    density: &SampledMatrixFunction,
    factor: &SpectralFactor,
    reference: Option<f64>,
) -> Result<FactorRecord, CliError> {
    let norm =
        specfact::circle::lp_norm(density, 1.0).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(FactorRecord {
        label: label.into(),
        summary: factor.summary(),
        relative_residual: factor.residual / norm,
        det_identity_defect: factor.det_identity_defect(density)?,
        reference_distance: reference,
    })
}

fn print_factor(r: &FactorRecord) {
    let n = (r.summary.at_zero.len() as f64).sqrt() as usize;
    println!(
        "{}: residual ‖F − F⁺(F⁺)*‖₁ = {:e} (relative {:e}), {:?}, {} iterations",
        r.label, r.summary.residual, r.relative_residual, r.summary.algorithm, r.summary.iterations
    );
    for i in 0..n {
        let row: Vec<String> = r.summary.at_zero[i * n..(i + 1) * n]
            .iter()
            .map(|[re, im]| format!("{re:+.12e}{im:+.12e}i"))
            .collect();
        println!("  F⁺(0)[{i}] = [{}]", row.join(", "));
    }
    println!(
        "  det identity |log det F⁺(0) − ½ mean log det F| = {:e}",
        r.det_identity_defect
    );
    if let Some(d) = r.reference_distance {
        println!("  max distance to the known factor = {d:e}");
    }
}

pub fn factor(run: &RunConfig) -> Result<Status, CliError> {
    let wilson = run.wilson();
    let mut outputs: Vec<(String, SampledMatrixFunction, SpectralFactor, Option<f64>)> = Vec::new();
    match run.family.as_str() {
        "file" => {
            let path = run
                .input
                .as_ref()
                .ok_or_else(|| CliError::Parse("factor --family file needs --input".into()))?;
            let f = read_sampled(path)?;
            let factor = normalize_factor_at_zero(&spectral_factor(&f, &wilson)?)?;
            outputs.push(("f".into(), f, factor, None));
        }
        "const-spd" => {
            let f = const_spd(run.grid_n.unwrap_or(64))?;
            let factor = normalize_factor_at_zero(&spectral_factor(&f, &wilson)?)?;
            // The factor of a constant density is its positive square root.
            let root = specfact::matrix::spd_sqrt(f.node(0), 2)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let distance = max_distance(&factor.plus, |_, out| out.copy_from_slice(&root));
            outputs.push(("f".into(), f, factor, Some(distance)));
        }
        "random" => {
            let (f, _) = random_densities(run, run.grid_n.unwrap_or(DEFAULT_GRID), false)?;
            let factor = normalize_factor_at_zero(&spectral_factor(&f, &wilson)?)?;
            outputs.push(("f".into(), f, factor, None));
        }
        name => {
            let kind = example_kind(name).ok_or_else(|| {
                CliError::Parse(format!(
                    "unknown density family `{name}` (expected const-spd, random, ex1, ex2 or file)"
                ))
            })?;
            let pair = example_pair(kind, run, run.grid_n)?;
            let (f, g) = example_densities(&pair);
            let fp = triangular_factor(&f)?;
            let gp = triangular_factor(&g)?;
            let known = |j: usize, out: &mut [Complex64], second: bool| {
                let mut node = PairNode::zeros(2);
                pair.fill(j, &mut node);
                out.copy_from_slice(if second { &node.g_plus } else { &node.f_plus });
            };
            let df = max_distance(&fp.plus, |j, out| known(j, out, false));
            let dg = max_distance(&gp.plus, |j, out| known(j, out, true));
            outputs.push(("f".into(), f, fp, Some(df)));
            outputs.push(("g".into(), g, gp, Some(dg)));
        }
    }
    let grid_size = outputs[0].1.grid().size();
    let mut records = Vec::new();
    for (label, density, factor, reference) in &outputs {
        let r = record(label, density, factor, *reference)?;
        print_factor(&r);
        if !run.summary_only {
            let parameters =
                serde_json::to_value(run).map_err(|e| CliError::Failure(e.to_string()))?;
            write_sampled(
                &run.output,
                &format!("{label}_plus"),
                &factor.plus,
                &run.family,
                parameters,
            )?;
        }
        records.push(r);
    }
    let path = run.output.join("factor.json");
    write_json(
        &path,
        &FactorOutput {
            run: run.clone(),
            grid_size,
            factors: records,
        },
    )?;
    println!("wrote {}", path.display());
    Ok(Status::Clean)
}

fn verify_options(run: &RunConfig) -> Vec<VerifyOptions> {
    run.theorems
        .iter()
        .map(|&theorem| VerifyOptions {
            theorem,
            p0: run.p0,
            p1: run.p1,
            alpha: run.alpha,
            always_double: run.always_double,
            tolerance: run.tolerance,
            ..VerifyOptions::default()
        })
        .collect()
}

/// The CSV row layout shared by `verify` and `sweep`.
pub fn report_csv(label: &str, eps: f64, reports: &[BoundReport]) -> String {
    let mut out = String::from(
        "family,theorem,eps,N,lhs,rhs,ratio,d1,violation,preconditions_hold,doubled\n",
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{label},{},{},{},{},{},{},{},{},{},{}",
            r.theorem,
            format_number(eps),
            r.grid_size,
            format_number(r.lhs),
            format_number(r.rhs),
            format_number(r.ratio),
            format_number(r.statistics.d1),
            r.violation,
            r.preconditions_hold,
            r.doubling.is_some()
        );
    }
    out
}

pub fn verify(run: &RunConfig) -> Result<Status, CliError> {
    if run.theorems.is_empty() {
        return Err(CliError::Parse(
            "verify needs at least one --theorem".into(),
        ));
    }
    let options = verify_options(run);
    let source = pair_source(run, run.grid_n)?;
    let size = source.grid().size();
    let mut reports = verify_pair_many(&source, &options)?;
    drop(source);
    let max_grid = options.iter().map(|o| o.max_grid).min().unwrap_or(0);
    let wanted = reports.iter().any(|r| r.violation) || run.always_double;
    if wanted && run.family != "file" && 2 * size <= max_grid {
        let fine = verify_pair_many(&pair_source(run, Some(2 * size))?, &options)?;
        for (report, fine) in reports.iter_mut().zip(&fine) {
            attach_doubling(report, fine);
        }
    }
    for r in &reports {
        println!(
            "{}: lhs = {:e}, rhs = {:e}, ratio = {:e}, N = {}{}",
            r.theorem,
            r.lhs,
            r.rhs,
            r.ratio,
            r.grid_size,
            if r.violation { ", VIOLATION" } else { "" }
        );
    }
    let json = run.output.join("verify.json");
    write_json(
        &json,
        &VerifyOutput {
            run: run.clone(),
            reports: reports.clone(),
        },
    )?;
    let csv = run.output.join("verify.csv");
    fs::write(&csv, report_csv(&run.family, run.eps, &reports))?;
    println!("wrote {} and {}", json.display(), csv.display());
    if reports.iter().any(|r| r.violation) {
        return Ok(Status::Violation);
    }
    if let Some(r) = reports.iter().find(|r| !r.preconditions_hold) {
        let condition = r.precondition.clone().unwrap_or_default();
        return Ok(Status::Precondition(format!("{}: {condition}", r.theorem)));
    }
    Ok(Status::Clean)
}

fn print_sweep(result: &SweepResult) {
    for r in &result.rows {
        println!(
            "{} eps = {:e}: lhs = {:e}, rhs = {:e}, ratio = {:e}, N = {}{}{}",
            r.theorem,
            r.eps,
            r.lhs,
            r.rhs,
            r.ratio,
            r.grid_size,
            if r.preconditions_hold {
                ""
            } else {
                ", preconditions fail"
            },
            if r.violation { ", VIOLATION" } else { "" }
        );
    }
    for lb in &result.lower_bounds {
        println!(
            "lower bound eps = {:e}: lhs = {:e}, d1 = {:e}, chain {}{}",
            lb.params.eps,
            lb.lhs,
            lb.d1,
            if lb.chain_holds { "holds" } else { "FAILS" },
            match lb.log_bound_holds {
                Some(true) => ", log bound holds",
                Some(false) => ", log bound FAILS",
                None => "",
            }
        );
    }
    if let Some(d) = &result.divergence {
        println!("divergence table, γ = {}:", d.gamma);
        println!("  eps, lhs, dlog, ratio, growth");
        for row in &d.rows {
            let m = &row.measurement;
            let growth = row.growth.map_or("-".to_string(), |g| format!("{g:.4}"));
            println!(
                "  {:e}, {:e}, {:e}, {:e}, {growth}",
                m.eps, m.lhs, m.dlog, row.ratio
            );
        }
        println!(
            "  ratio spread {:.4}, smallest growth {:.4}",
            d.ratio_spread, d.min_growth
        );
    }
    if let Some(fit) = &result.fit {
        println!(
            "log-log exponent {:.6} over {} points",
            fit.slope,
            fit.points.len()
        );
    }
    for f in &result.failures {
        eprintln!("cell eps = {:e} failed: {}", f.eps, f.message);
    }
}

pub fn sweep(config: &SweepConfig, jobs: Option<usize>, out: &Path) -> Result<Status, CliError> {
    let result = run_sweep(config, jobs)?;
    print_sweep(&result);
    let (csv, json) = result.write(out)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(if result.has_violation() {
        Status::Violation
    } else {
        Status::Clean
    })
}

pub fn constants() -> Status {
    let (k, k0) = kolmogorov_constants();
    println!("K  = {k:.12}");
    println!(
        "   reference ≈ 1.347, |K − 1.347| = {:.3e}",
        (k - 1.347).abs()
    );
    println!("K0 = {k0:.12}");
    println!(
        "   reference K0 < 1.25: {}",
        if k0 < 1.25 { "holds" } else { "FAILS" }
    );
    if (k - 1.347).abs() < 1e-3 && k0 < 1.25 {
        Status::Clean
    } else {
        Status::Violation
    }
}

#[derive(Serialize)]
struct SelftestOutput<'a> {
    seed: u64,
    cases: usize,
    suites: &'a [SuiteOutcome],
}

pub fn selftest(
    suites: &[String],
    seed: u64,
    cases: usize,
    out: Option<&Path>,
) -> Result<Status, CliError> {
    let outcomes = if suites.is_empty() {
        run_all(seed, cases)
    } else {
        suites
            .iter()
            .map(|name| {
                run_suite(name, seed, cases).ok_or_else(|| {
                    CliError::Parse(format!(
                        "unknown suite `{name}` (known: {})",
                        SUITES.join(", ")
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };
    for o in &outcomes {
        println!(
            "{} {}: {} cases, {} checks, {} violations, worst {:+.3e}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.checks,
            o.violations,
            o.worst
        );
        if let Some(v) = &o.first_violation {
            println!("    first violation: {v}");
        }
    }
    if let Some(dir) = out {
        write_json(
            &dir.join("selftest.json"),
            &SelftestOutput {
                seed,
                cases,
                suites: &outcomes,
            },
        )?;
    }
    Ok(if outcomes.iter().all(SuiteOutcome::passed) {
        Status::Clean
    } else {
        Status::Violation
    })
}

/// Reruns the invocation recorded in a `factor.json`, `verify.json` or sweep
/// summary.
pub fn replay(path: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<Status, CliError> {
    let value: serde_json::Value = read_json(path)?;
    if let Some(run) = value.get("run") {
        let mut run: RunConfig = serde_json::from_value(run.clone())
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        if let Some(dir) = out {
            run.output = dir.to_path_buf();
        }
        return match run.command.as_str() {
            "factor" => factor(&run),
            "verify" => verify(&run),
            other => Err(CliError::Parse(format!("cannot replay command `{other}`"))),
        };
    }
    if let Some(config) = value.get("config") {
        let config: SweepConfig = serde_json::from_value(config.clone())
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let dir = out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).to_path_buf());
        return sweep(&config, jobs, &dir);
    }
    Err(CliError::Parse(format!(
        "{} has neither a `run` nor a `config` record",
        path.display()
    )))
}
