//! Randomized checks of the inequalities the estimates are built from.
//!
//! Every suite draws its cases from a ChaCha stream derived from one seed and
//! counts how often the inequality fails beyond a relative slack of `10⁻⁹`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{l1_distance, CircleGrid, SampledMatrixFunction};
use crate::factorize::{h2_diff_norm, spectral_factor, WilsonConfig};
use crate::families::random::{polynomial_density, random_hermitian_pd, random_polynomial};
use crate::matrix::{self, dense};
use crate::orlicz::{
    interp_bound_of_samples, lambda_phi, luxemburg_norm_of_samples, orlicz_norm_power_of_samples,
    r_psi, NFunction, OrliczPair,
};
use crate::Complex64;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_CASES: usize = 1000;
const SLACK: f64 = 1e-9;

pub const SUITES: [&str; 13] = [
    "inverse-subadditivity",
    "monotone-ratio",
    "young",
    "indicator-norms",
    "luxemburg-modular-bound",
    "holder",
    "lambda-r-sandwich",
    "interpolation-lemma",
    "matrix-log-chain",
    "elementary",
    "normalization-contraction",
    "log-root",
    "factor-perturbation",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
    pub violations: usize,
    /// Largest `(lhs − rhs)/|rhs|` seen; negative when every check held.
    pub worst: f64,
    pub first_violation: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }
}

struct Tally {
    outcome: SuiteOutcome,
}

impl Tally {
    fn new(name: &str, cases: usize) -> Self {
        Self {
            outcome: SuiteOutcome {
                name: name.to_string(),
                cases,
                checks: 0,
                violations: 0,
                worst: f64::NEG_INFINITY,
                first_violation: None,
            },
        }
    }

    /// Records `lhs ≤ rhs`.
    fn le(&mut self, lhs: f64, rhs: f64, context: impl FnOnce() -> String) {
        self.record(lhs, rhs, lhs <= rhs + SLACK * rhs.abs() + 1e-300, context);
    }

    /// Records `lhs < rhs` (strict up to the slack).
    fn lt(&mut self, lhs: f64, rhs: f64, context: impl FnOnce() -> String) {
        self.record(lhs, rhs, lhs < rhs + SLACK * rhs.abs(), context);
    }

    /// Records `|lhs − rhs| ≤ tolerance·|rhs|`.
    fn close(&mut self, lhs: f64, rhs: f64, tolerance: f64, context: impl FnOnce() -> String) {
        let ok = (lhs - rhs).abs() <= tolerance * rhs.abs();
        self.outcome.checks += 1;
        let excess = (lhs - rhs).abs() / rhs.abs() - tolerance;
        self.outcome.worst = self.outcome.worst.max(excess);
        self.fail_unless(ok, || format!("{} (lhs {lhs:e}, rhs {rhs:e})", context()));
    }

    fn record(&mut self, lhs: f64, rhs: f64, ok: bool, context: impl FnOnce() -> String) {
        self.outcome.checks += 1;
        let excess = if lhs == rhs {
            0.0
        } else {
            (lhs - rhs) / rhs.abs()
        };
        if !excess.is_nan() {
            self.outcome.worst = self.outcome.worst.max(excess);
        }
        self.fail_unless(ok, || format!("{} (lhs {lhs:e}, rhs {rhs:e})", context()));
    }

    fn fail_unless(&mut self, ok: bool, context: impl FnOnce() -> String) {
        if !ok {
            self.outcome.violations += 1;
            if self.outcome.first_violation.is_none() {
                self.outcome.first_violation = Some(context());
            }
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

fn random_pair(rng: &mut ChaCha8Rng) -> OrliczPair {
    match rng.random_range(0..3) {
        0 => OrliczPair::power(rng.random_range(1.2..6.0)).expect("valid exponent"),
        1 => OrliczPair::exp(rng.random_range(0.5..4.0)).expect("valid exponent"),
        _ => {
            let knots = rng.random_range(1..=5);
            let (mut x, mut u) = (0.0, 0.0);
            let samples: Vec<(f64, f64)> = (0..knots)
                .map(|_| {
                    x += rng.random_range(0.1..2.0);
                    u += rng.random_range(0.05..3.0);
                    (x, u)
                })
                .collect();
            OrliczPair::custom(&samples).expect("increasing table")
        }
    }
}

fn pair_label(pair: &OrliczPair) -> String {
    format!("{:?}", pair.spec)
}

fn random_samples(rng: &mut ChaCha8Rng, len: usize, scale: f64, signed: bool) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let x: f64 = rng.random_range(0.0..1.0);
            // Mostly moderate values with an occasional spike or zero.
            let v = match rng.random_range(0..10) {
                0 => 0.0,
                1 => 10.0 * x,
                _ => x,
            } * scale;
            if signed && rng.random_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect()
}

fn inverse_subadditivity(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[0], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let (x1, x2) = (log_uniform(rng, 1e-6, 1e6), log_uniform(rng, 1e-6, 1e6));
        for f in [&pair.phi, &pair.psi] {
            t.le(f.inverse(x1 + x2), f.inverse(x1) + f.inverse(x2), || {
                format!("{} x1 = {x1:e}, x2 = {x2:e}", pair_label(&pair))
            });
        }
    }
    t.outcome
}

fn monotone_ratio(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[1], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let (a, b) = (log_uniform(rng, 1e-3, 50.0), log_uniform(rng, 1e-3, 50.0));
        let (x1, x2) = (a.min(b), a.max(b));
        for f in [&pair.phi, &pair.psi] {
            t.le(f.value(x1) / x1, f.value(x2) / x2, || {
                format!("{} x1 = {x1:e}, x2 = {x2:e}", pair_label(&pair))
            });
        }
    }
    t.outcome
}

fn young(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[2], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let x = log_uniform(rng, 1e-6, 1e6);
        let product = pair.phi.inverse(x) * pair.psi.inverse(x);
        let label = || format!("{} x = {x:e}", pair_label(&pair));
        t.lt(x, product, label);
        t.le(product, 2.0 * x, label);
    }
    t.outcome
}

fn indicator_norms(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    const NODES: usize = 512;
    let mut t = Tally::new(SUITES[3], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let k = rng.random_range(1..=NODES);
        let mu = k as f64 / NODES as f64;
        let chi: Vec<f64> = (0..NODES).map(|j| if j < k { 1.0 } else { 0.0 }).collect();
        let label = || format!("{} m(E) = {mu}", pair_label(&pair));
        // Luxemburg norm of an indicator.
        let lux = luxemburg_norm_of_samples(&chi, &pair.phi);
        t.close(lux, 1.0 / pair.phi.inverse(1.0 / mu), 1e-9, label);
        // Orlicz norm of an indicator: exact for powers, otherwise through
        // the equivalence with the Luxemburg norm.
        let orlicz = mu * pair.phi.inverse(1.0 / mu);
        match pair.psi {
            NFunction::Power { p } => {
                let exact = orlicz_norm_power_of_samples(&chi, p).expect("p > 1");
                t.close(exact, orlicz, 1e-9, label);
            }
            _ => {
                let lux_psi = luxemburg_norm_of_samples(&chi, &pair.psi);
                t.le(lux_psi, orlicz, label);
                t.le(orlicz, 2.0 * lux_psi, label);
            }
        }
    }
    t.outcome
}

fn luxemburg_modular_bound(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[4], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let scale = log_uniform(rng, 1e-2, 5.0);
        let f = random_samples(rng, 64, scale, false);
        for phi in [&pair.phi, &pair.psi] {
            let modular = f.iter().map(|&x| phi.value(x)).sum::<f64>() / f.len() as f64;
            t.le(luxemburg_norm_of_samples(&f, phi), modular.max(1.0), || {
                format!("{} scale = {scale:e}", pair_label(&pair))
            });
        }
    }
    t.outcome
}

fn holder(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[5], cases);
    for _ in 0..cases {
        let p = rng.random_range(1.1..8.0);
        let pair = OrliczPair::power(p).expect("p > 1");
        let (sf, sg) = (log_uniform(rng, 1e-2, 1e2), log_uniform(rng, 1e-2, 1e2));
        let f = random_samples(rng, 64, sf, true);
        let g = random_samples(rng, 64, sg, true);
        let mean = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / f.len() as f64;
        let abs_f: Vec<f64> = f.iter().map(|x| x.abs()).collect();
        let abs_g: Vec<f64> = g.iter().map(|x| x.abs()).collect();
        let bound = orlicz_norm_power_of_samples(&abs_f, p).expect("p > 1")
            * luxemburg_norm_of_samples(&abs_g, &pair.phi);
        t.le(mean.abs(), bound, || format!("p = {p}"));
    }
    t.outcome
}

fn lambda_r_sandwich(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[6], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let tau = log_uniform(rng, 1e-6, 1e6);
        let lambda = lambda_phi(&pair.phi, tau).expect("τ > 0");
        let r = r_psi(&pair.psi, tau).expect("τ > 0");
        let label = || format!("{} τ = {tau:e}", pair_label(&pair));
        t.lt(0.5 * lambda, r, label);
        t.le(r, 8.0 * lambda, label);
        let base = 1.0 / pair.phi.inverse(1.0 / tau);
        t.le(base, lambda, label);
        t.le(lambda, 2.0 * base, label);
    }
    t.outcome
}

fn interpolation_lemma(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[7], cases);
    for _ in 0..cases {
        let pair = random_pair(rng);
        let scale = log_uniform(rng, 1e-3, 1e3);
        let mut u = random_samples(rng, 64, scale, false);
        if u.iter().all(|&x| x == 0.0) {
            u[0] = scale;
        }
        t.le(
            luxemburg_norm_of_samples(&u, &pair.phi),
            interp_bound_of_samples(&u, &pair),
            || format!("{} scale = {scale:e}", pair_label(&pair)),
        );
    }
    t.outcome
}

fn matrix_log_chain(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[8], cases);
    for _ in 0..cases {
        let n = rng.random_range(1..=4);
        let a = random_hermitian_pd(rng, n, -3.0, 3.0);
        let eta = rng.random_range(-3.0f64..3.0).exp();
        let vee = matrix::matrix_vee(&a, n, eta).expect("Hermitian");
        let diff: Vec<Complex64> = vee.iter().zip(&a).map(|(x, y)| x - y).collect();
        let log_vee = matrix::spd_log(&vee, n).expect("positive definite");
        let log_a = matrix::spd_log(&a, n).expect("positive definite");
        let log_diff: Vec<Complex64> = log_vee.iter().zip(&log_a).map(|(x, y)| x - y).collect();
        let first = dense::operator_norm(&diff, n) / eta;
        let second = dense::operator_norm(&log_diff, n);
        let third = dense::cholesky_log_det(&vee, n).expect("positive definite")
            - dense::cholesky_log_det(&a, n).expect("positive definite");
        let label = || format!("n = {n}, η = {eta:e}");
        t.le(first, second + 1e-12, label);
        t.le(second, third + 1e-12, label);
    }
    t.outcome
}

fn elementary(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[9], cases);
    for _ in 0..cases {
        let (a, b) = (log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3));
        let label = || format!("a = {a:e}, b = {b:e}");
        t.le((a.max(1.0) - b.max(1.0)).abs(), (a - b).abs(), label);
        t.le(
            (matrix::log_plus(a) - matrix::log_plus(b)).abs(),
            (a - b).abs(),
            label,
        );
    }
    t.outcome
}

fn random_pointwise_density(
    rng: &mut ChaCha8Rng,
    grid: &CircleGrid,
    n: usize,
) -> SampledMatrixFunction {
    let mut f = SampledMatrixFunction::constant(grid, n, &dense::identity(n));
    for node in f.nodes_mut() {
        node.copy_from_slice(&random_hermitian_pd(rng, n, -2.0, 2.0));
    }
    f
}

fn normalization_contraction(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[10], cases);
    let grid = CircleGrid::new(16).expect("valid size");
    for _ in 0..cases {
        let n = rng.random_range(1..=3);
        let f = random_pointwise_density(rng, &grid, n);
        let g = random_pointwise_density(rng, &grid, n);
        let (_, f1) = matrix::normalize_unit_ball(&f).expect("Hermitian");
        let (_, g1) = matrix::normalize_unit_ball(&g).expect("Hermitian");
        let lhs = l1_distance(&f1, &g1).expect("same grid");
        let rhs = l1_distance(&f, &g).expect("same grid");
        t.le(lhs, 2.0 * rhs, || format!("n = {n}"));
    }
    t.outcome
}

fn log_root(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[11], cases);
    for _ in 0..cases {
        let n = rng.random_range(1..=8);
        let x = log_uniform(rng, 1e-12, 1e3);
        let rhs = -(n as f64) * (x.ln() / n as f64).exp_m1();
        t.le(rhs, -x.ln() + 1e-15, || format!("n = {n}, x = {x:e}"));
    }
    t.outcome
}

/// `‖G⁺ − F⁺‖²_{L₂} ≤ ℛn(‖G − F‖₁/η + 2[1 − (det G⁺(0)/det F⁺(0))^{1/n}])` with
/// `F ⪰ η` and `ℛ = ess sup ‖F‖`, so that the spectral projection is `I`.
fn factor_perturbation(rng: &mut ChaCha8Rng, cases: usize) -> SuiteOutcome {
    let mut t = Tally::new(SUITES[12], cases);
    let grid = CircleGrid::new(32).expect("valid size");
    let config = WilsonConfig::default();
    for _ in 0..cases {
        let n = rng.random_range(2..=3);
        let degree = rng.random_range(0..=3);
        let eta = rng.random_range(0.1..1.0);
        let a = random_polynomial(rng, n, degree);
        let size = log_uniform(rng, 1e-3, 1.0);
        let b: Vec<Vec<Complex64>> = random_polynomial(rng, n, degree)
            .into_iter()
            .zip(&a)
            .map(|(noise, base)| base.iter().zip(noise).map(|(x, y)| x + y * size).collect())
            .collect();
        let f = polynomial_density(&grid, n, &a, eta);
        let g = polynomial_density(&grid, n, &b, eta * rng.random_range(0.5..2.0));
        let label = || format!("n = {n}, degree = {degree}, η = {eta}, size = {size:e}");
        let (fp, gp) = match (spectral_factor(&f, &config), spectral_factor(&g, &config)) {
            (Ok(fp), Ok(gp)) => (fp, gp),
            (Err(e), _) | (_, Err(e)) => {
                t.fail_unless(false, || format!("{}: {e}", label()));
                continue;
            }
        };
        let lhs = h2_diff_norm(&fp.plus, &gp.plus).expect("same grid").powi(2);
        let r = f.operator_norms().into_iter().fold(0.0, f64::max);
        let d1 = l1_distance(&f, &g).expect("same grid");
        let log_ratio =
            gp.log_det_at_zero().unwrap_or(f64::NAN) - fp.log_det_at_zero().unwrap_or(f64::NAN);
        let rhs = r * n as f64 * (d1 / eta - 2.0 * (log_ratio / n as f64).exp_m1());
        t.le(lhs, rhs, label);
    }
    t.outcome
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64, cases: usize) -> Option<SuiteOutcome> {
    let index = SUITES.iter().position(|s| *s == name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
    );
    let rng = &mut rng;
    Some(match index {
        0 => inverse_subadditivity(rng, cases),
        1 => monotone_ratio(rng, cases),
        2 => young(rng, cases),
        3 => indicator_norms(rng, cases),
        4 => luxemburg_modular_bound(rng, cases),
        5 => holder(rng, cases),
        6 => lambda_r_sandwich(rng, cases),
        7 => interpolation_lemma(rng, cases),
        8 => matrix_log_chain(rng, cases),
        9 => elementary(rng, cases),
        10 => normalization_contraction(rng, cases),
        11 => log_root(rng, cases),
        _ => factor_perturbation(rng, cases),
    })
}

pub fn run_all(seed: u64, cases: usize) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|name| run_suite(name, seed, cases).expect("listed suite"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_small_sample() {
        for outcome in run_all(1, 100) {
            assert!(outcome.passed(), "{outcome:?}");
            assert!(outcome.checks >= outcome.cases);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = run_suite("young", 9, 50).unwrap();
        let b = run_suite("young", 9, 50).unwrap();
        assert_eq!(a, b);
        assert!(run_suite("nonexistent", 9, 50).is_none());
    }

    #[test]
    fn tally_counts_violations() {
        let mut t = Tally::new("t", 2);
        t.le(1.0, 2.0, String::new);
        t.le(3.0, 2.0, || "bad".into());
        assert_eq!(t.outcome.violations, 1);
        assert_eq!(
            t.outcome.first_violation.as_deref(),
            Some("bad (lhs 3e0, rhs 2e0)")
        );
        assert!((t.outcome.worst - 0.5).abs() < 1e-15);
    }
}
