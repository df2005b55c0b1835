use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn specfact(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specfact"))
        .args(args)
        .env("SPECFACT_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_print_reference_lines() {
    let dir = TempDir::new().unwrap();
    let o = specfact(&["constants"], dir.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("K  = 1.3468852"), "{text}");
    assert!(text.contains("≈ 1.347"));
    assert!(text.contains("K0 < 1.25: holds"));
}

#[test]
fn const_spd_factor_is_exact() {
    let dir = TempDir::new().unwrap();
    let o = specfact(&["factor", "--family", "const-spd"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(&dir.path().join("factor.json"));
    let f = &summary["factors"][0];
    assert!(f["summary"]["residual"].as_f64().unwrap() < 1e-12);
    assert!(f["reference_distance"].as_f64().unwrap() < 1e-12);
    assert!(f["det_identity_defect"].as_f64().unwrap() < 1e-12);
    assert!(dir.path().join("f_plus.csv").exists());
    assert!(dir.path().join("f_plus.json").exists());
    assert!(stdout(&o).contains("F⁺(0)"));
}

#[test]
fn example_factors_match_known_representatives() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "factor",
            "--family",
            "ex1",
            "--eps",
            "1e-2",
            "--p1",
            "2",
            "--summary-only",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(&dir.path().join("factor.json"));
    let factors = summary["factors"].as_array().unwrap();
    assert_eq!(factors.len(), 2);
    for f in factors {
        assert!(f["summary"]["residual"].as_f64().unwrap() < 1e-12);
        assert!(f["det_identity_defect"].as_f64().unwrap() < 1e-12);
        // The sampled value at the origin carries an O(1/N) error.
        assert!(f["reference_distance"].as_f64().unwrap() < 1e-4);
    }
    assert!(!dir.path().join("g_plus.csv").exists());
}

#[test]
fn malformed_csv_reports_line() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "theta,re_0_0,im_0_0\n-3.0,1.0,0.0\n-1.0,oops,0.0\n").unwrap();
    let o = specfact(
        &[
            "factor",
            "--family",
            "file",
            "--input",
            input.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn non_positive_density_is_a_precondition_failure() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("neg.csv");
    let n = 16;
    let mut text = String::from("theta,re_0_0,im_0_0\n");
    for j in 0..n {
        let t = -std::f64::consts::PI + (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / n as f64;
        let v = if j == 5 { -1.0 } else { 1.0 };
        text.push_str(&format!("{t:.17e},{v},0\n"));
    }
    fs::write(&input, text).unwrap();
    let o = specfact(
        &[
            "factor",
            "--family",
            "file",
            "--input",
            input.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("node 5"), "{}", stderr(&o));
}

#[test]
fn non_convergence_exits_one_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "factor",
            "--family",
            "random",
            "--dim",
            "3",
            "--degree",
            "6",
            "--max-iterations",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("did not converge"), "{}", stderr(&o));
}

#[test]
fn identical_pair_has_zero_ratio() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "verify",
            "--family",
            "identical",
            "--theorem",
            "thm1.3,thm1.5",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = json(&dir.path().join("verify.json"));
    for r in out["reports"].as_array().unwrap() {
        assert_eq!(r["ratio"].as_f64(), Some(0.0));
        assert_eq!(r["violation"], Value::Bool(false));
    }
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with(
        "family,theorem,eps,N,lhs,rhs,ratio,d1,violation,preconditions_hold,doubled\n"
    ));
}

#[test]
fn example_pair_satisfies_thm13() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "verify",
            "--family",
            "ex1",
            "--eps",
            "1e-2",
            "--theorem",
            "thm1.3,thm1.3-inf",
            "--always-double",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = json(&dir.path().join("verify.json"));
    for r in out["reports"].as_array().unwrap() {
        assert!(r["lhs"].as_f64().unwrap() <= r["rhs"].as_f64().unwrap());
        assert!(r["doubling"].is_object());
    }
    assert_eq!(out["run"]["command"], "verify");
}

#[test]
fn large_distance_fails_thm13_precondition() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "verify",
            "--family",
            "ex1",
            "--delta",
            "0.9",
            "--theorem",
            "thm1.3",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(
        err.contains("thm1.3") && err.contains("‖G − F‖_L1") && err.contains("exceeds 1"),
        "{err}"
    );
    let out = json(&dir.path().join("verify.json"));
    assert_eq!(out["reports"][0]["rhs"], "nan");
}

#[test]
fn thm14_needs_small_distance() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "verify",
            "--family",
            "random",
            "--eps",
            "0.5",
            "--theorem",
            "thm1.4",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("e^-4"), "{}", stderr(&o));
}

#[test]
fn unknown_theorem_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &["verify", "--family", "identical", "--theorem", "thm9.9"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("thm9.9"));
}

#[test]
fn verify_is_reproducible_and_replayable() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let c = TempDir::new().unwrap();
    let args = [
        "verify",
        "--family",
        "random",
        "--seed",
        "7",
        "--eps",
        "1e-3",
        "--theorem",
        "thm1.5,thm1.3",
    ];
    assert_eq!(code(&specfact(&args, a.path())), 0);
    assert_eq!(code(&specfact(&args, b.path())), 0);
    let csv_a = fs::read(a.path().join("verify.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.path().join("verify.csv")).unwrap());
    let report = a.path().join("verify.json");
    let o = specfact(
        &[
            "replay",
            report.to_str().unwrap(),
            "--out",
            c.path().to_str().unwrap(),
        ],
        c.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv_a, fs::read(c.path().join("verify.csv")).unwrap());
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    specfact(
        &["verify", "--family", "random", "--theorem", "thm1.5"],
        dir.path(),
    );
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let lhs = row[4];
    let mantissa = lhs.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{lhs}");
    let parsed: f64 = lhs.parse().unwrap();
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(parsed, report["reports"][0]["lhs"].as_f64().unwrap());
}

#[test]
fn sweep_without_theorems_reports_family_checks() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("sweep.json");
    fs::write(
        &config,
        r#"{"family": "ex1", "eps": [0.05, 0.02], "theorems": []}"#,
    )
    .unwrap();
    let o = specfact(
        &["sweep", config.to_str().unwrap(), "--jobs", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(&dir.path().join("ex1_summary.json"));
    assert!(summary["rows"].as_array().unwrap().is_empty());
    let bounds = summary["lower_bounds"].as_array().unwrap();
    assert_eq!(bounds.len(), 2);
    assert!(bounds.iter().all(|b| b["chain_holds"] == Value::Bool(true)));
    let csv = fs::read_to_string(dir.path().join("ex1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn scalar_sweep_writes_divergence_table() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &["sweep", "--family", "scalar6", "--eps", "1e-1,1e-2,1e-3"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("divergence table"));
    let summary = json(&dir.path().join("scalar6_summary.json"));
    let rows = summary["divergence"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(summary["fit"]["slope"].as_f64().is_some());
    let csv = fs::read_to_string(dir.path().join("scalar6.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweep_outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "sweep",
        "--family",
        "ex2",
        "--eps",
        "0.05,0.02",
        "--jobs",
        "2",
    ];
    assert_eq!(code(&specfact(&args, a.path())), 0);
    assert_eq!(
        code(&specfact(
            &[
                "sweep",
                "--family",
                "ex2",
                "--eps",
                "0.05,0.02",
                "--jobs",
                "1"
            ],
            b.path()
        )),
        0
    );
    assert_eq!(
        fs::read(a.path().join("ex2.csv")).unwrap(),
        fs::read(b.path().join("ex2.csv")).unwrap()
    );
}

#[test]
fn malformed_sweep_config_reports_line() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(
        &config,
        "{\n  \"family\": \"ex1\",\n  \"eps\": [0.1,,]\n}\n",
    )
    .unwrap();
    let o = specfact(&["sweep", config.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn selftest_runs_named_suites() {
    let dir = TempDir::new().unwrap();
    let o = specfact(
        &[
            "selftest",
            "--suite",
            "young,log-root",
            "--cases",
            "200",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 2);
    let out = json(&dir.path().join("selftest.json"));
    assert_eq!(out["suites"].as_array().unwrap().len(), 2);
    let o = specfact(&["selftest", "--suite", "nope"], dir.path());
    assert_eq!(code(&o), 2);
}
