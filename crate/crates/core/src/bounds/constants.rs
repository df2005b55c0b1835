//! Kolmogorov's weak-type constant `K`, `K₀ = (K/2)·Si(π)` and the derived
//! constants `c(p₀)` and `C(p)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::circle::quadrature::adaptive_gauss_kronrod;

/// Terms summed explicitly before switching to the asymptotic tail.
const HEAD_TERMS: usize = 2000;

/// `Σ_{k≥0} (2k+1)^{-2}` with an Euler-Maclaurin tail.
pub fn odd_square_sum() -> f64 {
    let head: f64 = (0..HEAD_TERMS)
        .rev()
        .map(|k| 1.0 / ((2 * k + 1) as f64).powi(2))
        .sum();
    let a = (2 * HEAD_TERMS + 1) as f64;
    // ∫_M^∞ f + f(M)/2 − f'(M)/12 + f'''(M)/720 for f(x) = (2x+1)^{-2}.
    let tail = 1.0 / (2.0 * a) + 1.0 / (2.0 * a * a) + 1.0 / (3.0 * a.powi(3))
        - 192.0 / (720.0 * a.powi(5));
    head + tail
}

/// Catalan's constant `Σ_{k≥0} (−1)^k (2k+1)^{-2}` with an Euler-Boole tail.
pub fn catalan() -> f64 {
    let head: f64 = (0..HEAD_TERMS)
        .rev()
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / ((2 * k + 1) as f64).powi(2)
        })
        .sum();
    let a = (2 * HEAD_TERMS + 1) as f64;
    // Σ_{j≥0} (−1)^j f(M+j) ≈ f/2 − f'/4 + f'''/48 − f⁽⁵⁾/480.
    let f = a.powi(-2);
    let f1 = -4.0 * a.powi(-3);
    let f3 = -192.0 * a.powi(-5);
    let f5 = -23040.0 * a.powi(-7);
    let sign = if HEAD_TERMS % 2 == 0 { 1.0 } else { -1.0 };
    head + sign * (f / 2.0 - f1 / 4.0 + f3 / 48.0 - f5 / 480.0)
}

/// `Si(π) = ∫₀^π sin λ/λ dλ`.
pub fn sine_integral_pi() -> f64 {
    adaptive_gauss_kronrod(
        |x| if x == 0.0 { 1.0 } else { x.sin() / x },
        0.0,
        PI,
        1e-15,
        1e-15,
        200,
    )
    .value
}

/// `(K, K₀)`.
pub fn kolmogorov_constants() -> (f64, f64) {
    static VALUES: OnceLock<(f64, f64)> = OnceLock::new();
    *VALUES.get_or_init(|| {
        let k = odd_square_sum() / catalan();
        (k, 0.5 * k * sine_integral_pi())
    })
}

pub fn k0() -> f64 {
    kolmogorov_constants().1
}

/// `c(p₀) = 2^{(p₀+1)/p₀}·K₀^{1/q₀}`.
pub fn c_constant(p0: f64) -> f64 {
    let q0 = p0 / (p0 - 1.0);
    2f64.powf((p0 + 1.0) / p0) * k0().powf(1.0 / q0)
}

/// `C(p) = 2^{(p+1)/p}·(5p/(4(p−1)))^{(p−1)/p}`.
pub fn scalar_constant(p: f64) -> f64 {
    2f64.powf((p + 1.0) / p) * (5.0 * p / (4.0 * (p - 1.0))).powf((p - 1.0) / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_sums() {
        assert!((odd_square_sum() - PI * PI / 8.0).abs() < 1e-15);
        // Oracle: partial sums averaged pairwise converge like O(M^{-3}).
        let partial = |m: usize| -> f64 {
            (0..m)
                .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / ((2 * k + 1) as f64).powi(2))
                .sum()
        };
        let m = 200_000;
        let averaged = 0.5 * (partial(m) + partial(m + 1));
        assert!((catalan() - averaged).abs() < 1e-14);
        assert!((catalan() - 0.915_965_594_177_219).abs() < 1e-15);
    }

    #[test]
    fn sine_integral_matches_series() {
        let mut series = 0.0;
        let mut term = PI;
        for k in 0..40 {
            series += term / (2 * k + 1) as f64;
            term *= -PI * PI / (((2 * k + 2) * (2 * k + 3)) as f64);
        }
        assert!((sine_integral_pi() - series).abs() < 1e-14);
    }

    #[test]
    fn published_values() {
        let (k, k0) = kolmogorov_constants();
        assert!((k - 1.347).abs() < 1e-3);
        assert!(k0 < 1.25);
        // Frozen from a 30-digit evaluation of (π²/8)/G·Si(π)/2.
        assert!((k - 1.346_885_251_999_406_6).abs() < 1e-14);
        assert!((k0 - 1.247_173_351_473_221).abs() < 1e-14);
    }

    #[test]
    fn c_constant_values() {
        let k0 = k0();
        assert!((c_constant(2.0) - 2f64.powf(1.5) * k0.sqrt()).abs() < 1e-14);
        assert!((c_constant(1e8) - 2.0 * k0).abs() < 1e-6);
        let mut last = c_constant(1.1);
        let mut p = 1.1;
        while p < 10.0 {
            p += 0.001;
            let v = c_constant(p);
            assert!((v - last).abs() < 1e-2);
            last = v;
        }
        assert!((scalar_constant(2.0) - 2f64.powf(1.5) * 2.5f64.sqrt()).abs() < 1e-14);
    }
}
