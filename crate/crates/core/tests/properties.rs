use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use specfact::bounds::{rhs_matrix_power, PairStatistics, TheoremKind};
use specfact::circle::{lp_norm_of_samples, CircleGrid, SampledScalarFunction};
use specfact::factorize::scalar_spectral_factor;
use specfact::matrix::{self, dense};
use specfact::orlicz::{luxemburg_norm_of_samples, OrliczPair};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        ..ProptestConfig::default()
    }
}

fn hermitian_pd(n: usize, entries: &[f64], floor: f64) -> Vec<Complex64> {
    let a: Vec<Complex64> = (0..n * n)
        .map(|k| Complex64::new(entries[2 * k], entries[2 * k + 1]))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    dense::mul_adjoint(&a, &a, n, &mut out);
    for i in 0..n {
        out[i * n + i] += floor;
    }
    dense::symmetrize(&out, n)
}

fn statistics() -> impl Strategy<Value = PairStatistics> {
    (
        1usize..5,
        -25.0f64..-0.1,
        0.0f64..5.0,
        0.0f64..5.0,
        (1.1f64..5.0, 1.1f64..5.0, 0.05f64..0.95),
        (0.1f64..10.0, 0.1f64..10.0),
        (0.0f64..4.0, 0.0f64..4.0, 1.0f64..20.0),
    )
        .prop_map(
            |(
                n,
                log_d1,
                dlogdet,
                dlogplus,
                (p0, p1, alpha),
                (fp0, finf),
                (ellp1, ellinf, qfp1),
            )| {
                PairStatistics {
                    n,
                    d1: log_d1.exp(),
                    dlogdet,
                    dlogplus,
                    p0: Some(p0),
                    p1: Some(p1),
                    alpha: Some(alpha),
                    fp0: Some(fp0),
                    finf: Some(finf.max(fp0)),
                    ellp1: Some(ellp1),
                    ellinf: Some(ellinf.max(ellp1)),
                    qfp1: Some(qfp1),
                    f_psi0: None,
                    ell_lux1: None,
                    rho1: None,
                    pi1: None,
                }
            },
        )
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn young_inequality_for_power_and_exp_pairs(p in 1.1f64..6.0, a in 0.0f64..20.0, b in 0.0f64..20.0) {
        for pair in [OrliczPair::power(p).unwrap(), OrliczPair::exp(p).unwrap()] {
            let rhs = pair.phi.value(a) + pair.psi.value(b);
            prop_assert!(a * b <= rhs * (1.0 + 1e-9) + 1e-12, "{a} {b} {rhs}");
        }
    }

    #[test]
    fn luxemburg_norm_is_homogeneous_and_matches_lp(
        p in 1.2f64..5.0,
        c in 0.01f64..100.0,
        samples in prop::collection::vec(0.0f64..10.0, 8..64),
    ) {
        prop_assume!(samples.iter().any(|&x| x > 1e-3));
        let pair = OrliczPair::power(p).unwrap();
        let norm = luxemburg_norm_of_samples(&samples, &pair.psi);
        let scaled: Vec<f64> = samples.iter().map(|x| c * x).collect();
        let scaled_norm = luxemburg_norm_of_samples(&scaled, &pair.psi);
        prop_assert!((scaled_norm - c * norm).abs() <= 1e-8 * c * norm);
        let lp = lp_norm_of_samples(&samples, p).unwrap();
        prop_assert!((norm - p.powf(-1.0 / p) * lp).abs() <= 1e-8 * lp);
    }

    #[test]
    fn log_exp_roundtrip_and_trace_identity(n in 1usize..5, entries in prop::collection::vec(-1.5f64..1.5, 32), floor in 0.05f64..2.0) {
        let a = hermitian_pd(n, &entries, floor);
        let log = matrix::spd_log(&a, n).unwrap();
        let back = matrix::spd_exp(&log, n).unwrap();
        let scale = dense::operator_norm(&a, n);
        for (x, y) in a.iter().zip(&back) {
            prop_assert!((x - y).norm() <= 1e-10 * scale);
        }
        let trace: f64 = (0..n).map(|i| log[i * n + i].re).sum();
        let log_det = dense::cholesky_log_det(&a, n).unwrap();
        prop_assert!((trace - log_det).abs() <= 1e-10 * (1.0 + log_det.abs()));
        let (ld, norm) = matrix::node_log_det_and_norm(&a, n).unwrap();
        prop_assert!((ld - log_det).abs() <= 1e-10 * (1.0 + log_det.abs()));
        // log det A ≤ n·log‖A‖, so ℓ_A ≤ 0.
        prop_assert!(ld <= n as f64 * norm.ln() + 1e-10);
    }

    #[test]
    fn polar_factor_is_positive_and_unitary(n in 1usize..5, entries in prop::collection::vec(-1.5f64..1.5, 32)) {
        let a: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(entries[2 * k], entries[2 * k + 1])).collect();
        prop_assume!(dense::inverse(&a, n).is_some());
        let (p, u) = match matrix::polar(&a, n) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let mut uu = vec![Complex64::new(0.0, 0.0); n * n];
        dense::mul_adjoint(&u, &u, n, &mut uu);
        for i in 0..n {
            for k in 0..n {
                let e = if i == k { 1.0 } else { 0.0 };
                prop_assert!((uu[i * n + k] - e).norm() < 1e-8);
            }
        }
        prop_assert!(dense::hermitian_eigenvalues(&dense::symmetrize(&p, n), n)[0] > 0.0);
        let mut pu = vec![Complex64::new(0.0, 0.0); n * n];
        dense::mul(&p, &u, n, &mut pu);
        for (x, y) in pu.iter().zip(&a) {
            prop_assert!((x - y).norm() < 1e-8 * (1.0 + dense::operator_norm(&a, n)));
        }
    }

    #[test]
    fn rhs_grows_with_distances(s in statistics(), t in 1.0f64..3.0) {
        let bigger_log = PairStatistics { dlogdet: s.dlogdet * t + 0.01, dlogplus: s.dlogplus * t + 0.01, ..s.clone() };
        let bigger_d1 = PairStatistics { d1: (s.d1 * t).min(0.999), ..s.clone() };
        for theorem in [TheoremKind::Thm13, TheoremKind::Thm13Inf, TheoremKind::Thm15] {
            let base = rhs_matrix_power(theorem, &s).unwrap().total();
            prop_assert!(rhs_matrix_power(theorem, &bigger_log).unwrap().total() >= base * (1.0 - 1e-12));
            prop_assert!(rhs_matrix_power(theorem, &bigger_d1).unwrap().total() >= base * (1.0 - 1e-12));
        }
        if s.d1 <= (-4f64).exp() {
            for theorem in [TheoremKind::Thm14, TheoremKind::Thm14Inf] {
                let base = rhs_matrix_power(theorem, &s).unwrap().total();
                prop_assert!(rhs_matrix_power(theorem, &bigger_log).unwrap().total() >= base * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn rhs_vanishes_only_at_zero_distance(s in statistics()) {
        let zero = PairStatistics { d1: 0.0, dlogdet: 0.0, dlogplus: 0.0, ..s.clone() };
        for theorem in [TheoremKind::Thm13, TheoremKind::Thm13Inf, TheoremKind::Thm14, TheoremKind::Thm14Inf, TheoremKind::Thm15] {
            prop_assert_eq!(rhs_matrix_power(theorem, &zero).unwrap().total(), 0.0);
        }
        prop_assert!(rhs_matrix_power(TheoremKind::Thm13, &s).unwrap().total() > 0.0);
    }

    #[test]
    fn conjugation_is_linear(
        log2 in 4u32..9,
        a in prop::collection::vec(-1.0f64..1.0, 6),
        b in prop::collection::vec(-1.0f64..1.0, 6),
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
    ) {
        let grid = CircleGrid::with_log2(log2).unwrap();
        let trig = |c: &[f64]| SampledScalarFunction::from_real_fn(&grid, |t| {
            c[0] + c[1] * t.cos() + c[2] * t.sin() + c[3] * (2.0 * t).cos() + c[4] * (3.0 * t).sin() + c[5] * (5.0 * t).cos()
        });
        let (f, g) = (trig(&a), trig(&b));
        let combined = SampledScalarFunction::new(
            grid.clone(),
            f.values().iter().zip(g.values()).map(|(u, v)| u * x + v * y).collect(),
        ).unwrap();
        let (cf, cg, cc) = (f.conjugate().unwrap(), g.conjugate().unwrap(), combined.conjugate().unwrap());
        for j in 0..grid.size() {
            let expected = cf.values()[j] * x + cg.values()[j] * y;
            prop_assert!((cc.values()[j] - expected).norm() < 1e-12);
            // cos kϑ ↦ sin kϑ and sin kϑ ↦ −cos kϑ.
            let t = grid.node(j);
            let exact = a[1] * t.sin() - a[2] * t.cos() + a[3] * (2.0 * t).sin() - a[4] * (3.0 * t).cos() + a[5] * (5.0 * t).sin();
            prop_assert!((cf.values()[j].re - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn outer_factor_of_polynomial_modulus(roots in prop::collection::vec((1.2f64..4.0, -PI..PI), 1..4)) {
        let grid = CircleGrid::new(512).unwrap();
        let poly = |t: f64| {
            let z = Complex64::from_polar(1.0, t);
            roots.iter().fold(Complex64::new(1.0, 0.0), |acc, &(r, phase)| acc * (1.0 - z / Complex64::from_polar(r, phase)))
        };
        let f = SampledScalarFunction::from_real_fn(&grid, |t| poly(t).norm_sqr());
        let factor = scalar_spectral_factor(&f).unwrap();
        prop_assert!((factor.at_zero[0].re - 1.0).abs() < 1e-10);
        for (j, m) in factor.plus.nodes().enumerate() {
            prop_assert!((m[0] - poly(grid.node(j))).norm() < 1e-9);
        }
    }
}
