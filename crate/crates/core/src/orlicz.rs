//! N-functions, complementary pairs and the Orlicz-space quantities used by
//! the bounds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::SampledScalarFunction;

/// Values above this are reported as `+∞`.
pub const OVERFLOW: f64 = 1e300;

const LUX_LOWER: f64 = 1e-12;
const LUX_UPPER: f64 = 1e12;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrliczError {
    #[error("exponent {0} must exceed 1")]
    InvalidExponent(f64),
    #[error("density table: {0}")]
    InvalidDensity(String),
    #[error("sample {index} of ell is positive ({value:e})")]
    PositiveSample { index: usize, value: f64 },
    #[error("argument {0} must be positive")]
    NonPositiveArgument(f64),
}

/// `𝒜(s) = e^s − s − 1`, `+∞` past [`OVERFLOW`].
pub fn exp_excess(s: f64) -> f64 {
    let s = s.abs();
    if s < 0.1 {
        let mut term = s * s / 2.0;
        let mut sum = term;
        for k in 3..16 {
            term *= s / k as f64;
            sum += term;
        }
        sum
    } else if s > 690.0 {
        f64::INFINITY
    } else {
        let v = s.exp_m1() - s;
        if v > OVERFLOW {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Piecewise-linear density through `(x_i, u_i)` starting at `(0, 0)`,
/// continued past the last knot with the last slope.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTable {
    xs: Vec<f64>,
    us: Vec<f64>,
    /// `Φ(x_i)`.
    integrals: Vec<f64>,
}

impl DensityTable {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self, OrliczError> {
        let mut xs = vec![0.0];
        let mut us = vec![0.0];
        for &(x, u) in samples {
            if x == 0.0 {
                if u != 0.0 {
                    return Err(OrliczError::InvalidDensity("u(0) must be 0".into()));
                }
                continue;
            }
            let (&px, &pu) = (xs.last().unwrap(), us.last().unwrap());
            if !(x > px) || !x.is_finite() {
                return Err(OrliczError::InvalidDensity(
                    "abscissae must be positive, finite and strictly increasing".into(),
                ));
            }
            if !(u >= pu) || !u.is_finite() {
                return Err(OrliczError::InvalidDensity(
                    "u must be nondecreasing".into(),
                ));
            }
            xs.push(x);
            us.push(u);
        }
        if xs.len() < 2 {
            return Err(OrliczError::InvalidDensity(
                "need at least one positive knot".into(),
            ));
        }
        let k = xs.len() - 1;
        if !(us[k] > us[k - 1]) {
            return Err(OrliczError::InvalidDensity(
                "last segment must be increasing so that u(∞) = ∞".into(),
            ));
        }
        let mut integrals = vec![0.0];
        for i in 1..xs.len() {
            let area = 0.5 * (us[i] + us[i - 1]) * (xs[i] - xs[i - 1]);
            integrals.push(integrals[i - 1] + area);
        }
        Ok(Self { xs, us, integrals })
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.xs
            .iter()
            .copied()
            .zip(self.us.iter().copied())
            .skip(1)
            .collect()
    }

    fn segment(&self, x: f64) -> usize {
        let k = self.xs.len() - 1;
        match self.xs.partition_point(|&t| t <= x) {
            0 => 0,
            i => (i - 1).min(k - 1),
        }
    }

    fn slope(&self, i: usize) -> f64 {
        (self.us[i + 1] - self.us[i]) / (self.xs[i + 1] - self.xs[i])
    }

    pub fn density(&self, x: f64) -> f64 {
        let i = self.segment(x);
        self.us[i] + self.slope(i) * (x - self.xs[i])
    }

    fn integral(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let d = x - self.xs[i];
        self.integrals[i] + self.us[i] * d + 0.5 * self.slope(i) * d * d
    }

    /// `v(y) = sup{τ : u(τ) ≤ y}`.
    fn right_inverse(&self, y: f64) -> f64 {
        let k = self.xs.len() - 1;
        // Last knot with u ≤ y.
        let i = self.us.partition_point(|&u| u <= y);
        if i > k {
            let s = self.slope(k - 1);
            return self.xs[k] + (y - self.us[k]) / s;
        }
        let i = i.max(1) - 1;
        let s = self.slope(i);
        if s == 0.0 {
            self.xs[i + 1]
        } else {
            self.xs[i] + (y - self.us[i]) / s
        }
    }
}

/// An N-function evaluated on `[0, ∞)` (even extension implied).
#[derive(Clone, Debug, PartialEq)]
pub enum NFunction {
    /// `t^p/p`.
    Power { p: f64 },
    /// `𝒜(p₁τ)`.
    ExpType { p1: f64 },
    /// Complement of `𝒜(p₁τ)`: `[(p₁+x)·ln(1 + x/p₁) − x]/p₁`.
    ExpComplement { p1: f64 },
    /// `∫₀^x u` for a tabulated density.
    Tabulated(Arc<DensityTable>),
    /// Complement of a tabulated N-function: `y·v(y) − Φ(v(y))`.
    TabulatedComplement(Arc<DensityTable>),
}

impl NFunction {
    pub fn power(p: f64) -> Result<Self, OrliczError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(OrliczError::InvalidExponent(p));
        }
        Ok(Self::Power { p })
    }

    pub fn exp_type(p1: f64) -> Result<Self, OrliczError> {
        if !(p1 > 0.0) || !p1.is_finite() {
            return Err(OrliczError::InvalidExponent(p1));
        }
        Ok(Self::ExpType { p1 })
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self, OrliczError> {
        Ok(Self::Tabulated(Arc::new(DensityTable::new(samples)?)))
    }

    pub fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            Self::Power { p } => {
                let v = x.powf(*p) / p;
                if v > OVERFLOW {
                    f64::INFINITY
                } else {
                    v
                }
            }
            Self::ExpType { p1 } => exp_excess(p1 * x),
            Self::ExpComplement { p1 } => {
                let r = x / p1;
                if r < 1e-3 {
                    // Equals (1+r)ln(1+r) − r; the series avoids cancellation.
                    let mut sum = 0.0;
                    let mut power = r * r;
                    for k in 2..12 {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sum += sign * power / ((k * (k - 1)) as f64);
                        power *= r;
                    }
                    sum
                } else {
                    ((p1 + x) * r.ln_1p() - x) / p1
                }
            }
            Self::Tabulated(t) => t.integral(x),
            Self::TabulatedComplement(t) => {
                let v = t.right_inverse(x);
                x * v - t.integral(v)
            }
        }
    }

    /// Right derivative. Tabulated functions use a forward difference with
    /// step `1e-7·max(1, x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            Self::Power { p } => x.powf(p - 1.0),
            Self::ExpType { p1 } => {
                let s = p1 * x;
                if s > 690.0 {
                    f64::INFINITY
                } else {
                    p1 * s.exp_m1()
                }
            }
            Self::ExpComplement { p1 } => (x / p1).ln_1p() / p1,
            Self::Tabulated(_) | Self::TabulatedComplement(_) => {
                let h = 1e-7 * x.max(1.0);
                (self.value(x + h) - self.value(x)) / h
            }
        }
    }

    /// `Φ⁻¹(y)`: closed form for powers, bisection otherwise.
    pub fn inverse(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        if y.is_infinite() {
            return f64::INFINITY;
        }
        match self {
            Self::Power { p } => (p * y).powf(1.0 / p),
            _ => {
                let mut hi = 1.0;
                while self.value(hi) < y {
                    hi *= 2.0;
                    if hi > OVERFLOW {
                        return f64::INFINITY;
                    }
                }
                let mut lo = hi / 2.0;
                while self.value(lo) >= y && lo > 1e-300 {
                    hi = lo;
                    lo /= 2.0;
                }
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.value(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// The complementary N-function.
    pub fn complement(&self) -> Self {
        match self {
            Self::Power { p } => Self::Power { p: p / (p - 1.0) },
            Self::ExpType { p1 } => Self::ExpComplement { p1: *p1 },
            Self::ExpComplement { p1 } => Self::ExpType { p1: *p1 },
            Self::Tabulated(t) => Self::TabulatedComplement(t.clone()),
            Self::TabulatedComplement(t) => Self::Tabulated(t.clone()),
        }
    }
}

/// JSON descriptor of a pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairSpec {
    Power { p: f64 },
    Exp { p1: f64 },
    Custom { samples: Vec<(f64, f64)> },
}

/// Mutually complementary `(Φ, Ψ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrliczPair {
    pub phi: NFunction,
    pub psi: NFunction,
    pub spec: PairSpec,
}

impl OrliczPair {
    /// `Ψ(t) = t^p/p`, `Φ(t) = t^q/q`.
    pub fn power(p: f64) -> Result<Self, OrliczError> {
        let psi = NFunction::power(p)?;
        Ok(Self {
            phi: psi.complement(),
            psi,
            spec: PairSpec::Power { p },
        })
    }

    /// `Ψ = 𝒜(p₁·)` and its complement.
    pub fn exp(p1: f64) -> Result<Self, OrliczError> {
        let psi = NFunction::exp_type(p1)?;
        Ok(Self {
            phi: psi.complement(),
            psi,
            spec: PairSpec::Exp { p1 },
        })
    }

    /// `Φ = ∫u` for the tabulated density, `Ψ` its complement.
    pub fn custom(samples: &[(f64, f64)]) -> Result<Self, OrliczError> {
        let phi = NFunction::tabulated(samples)?;
        Ok(Self {
            psi: phi.complement(),
            phi,
            spec: PairSpec::Custom {
                samples: samples.to_vec(),
            },
        })
    }

    pub fn from_spec(spec: &PairSpec) -> Result<Self, OrliczError> {
        match spec {
            PairSpec::Power { p } => Self::power(*p),
            PairSpec::Exp { p1 } => Self::exp(*p1),
            PairSpec::Custom { samples } => Self::custom(samples),
        }
    }
}

/// Luxemburg norm of nonnegative samples.
pub fn luxemburg_norm_of_samples(samples: &[f64], phi: &NFunction) -> f64 {
    if samples.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let modular = |kappa: f64| {
        samples.iter().map(|&x| phi.value(x / kappa)).sum::<f64>() / samples.len() as f64
    };
    if modular(LUX_UPPER) > 1.0 {
        return f64::INFINITY;
    }
    if modular(LUX_LOWER) <= 1.0 {
        return LUX_LOWER;
    }
    let (mut lo, mut hi) = (LUX_LOWER.ln(), LUX_UPPER.ln());
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if modular(mid.exp()) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    hi.exp()
}

/// `‖f‖_(Φ) = inf{κ > 0 : mean Φ(|f|/κ) ≤ 1}`.
pub fn luxemburg_norm(f: &SampledScalarFunction, phi: &NFunction) -> f64 {
    luxemburg_norm_of_samples(&f.moduli(), phi)
}

/// `q^{1/q}·‖f‖_{L_p}`: the Orlicz norm for `Ψ(t) = t^p/p`.
pub fn orlicz_norm_power_of_samples(samples: &[f64], p: f64) -> Result<f64, OrliczError> {
    if !(p > 1.0) {
        return Err(OrliczError::InvalidExponent(p));
    }
    let q = p / (p - 1.0);
    let lp = crate::circle::lp_norm_of_samples(samples, p)
        .map_err(|_| OrliczError::InvalidExponent(p))?;
    Ok(q.powf(1.0 / q) * lp)
}

pub fn orlicz_norm_power(f: &SampledScalarFunction, p: f64) -> Result<f64, OrliczError> {
    orlicz_norm_power_of_samples(&f.moduli(), p)
}

/// An upper bound for the Orlicz norm `‖f‖_Ψ`: exact for powers, otherwise
/// `2‖f‖_(Ψ)`.
pub fn orlicz_norm_upper_of_samples(samples: &[f64], psi: &NFunction) -> f64 {
    match psi {
        NFunction::Power { p } => {
            orlicz_norm_power_of_samples(samples, *p).unwrap_or(f64::INFINITY)
        }
        _ => 2.0 * luxemburg_norm_of_samples(samples, psi),
    }
}

/// `Λ_Φ(s) = 1/τ*` where `τ* = sup{τ : τ·Φ'(τ) ≤ 1/s}`.
pub fn lambda_phi(phi: &NFunction, s: f64) -> Result<f64, OrliczError> {
    if !(s > 0.0) {
        return Err(OrliczError::NonPositiveArgument(s));
    }
    match phi {
        NFunction::Power { p: q } => Ok(s.powf(1.0 / q)),
        _ => Ok(lambda_phi_bisection(phi, s)),
    }
}

/// The generic evaluation of `Λ_Φ`, bisecting on `log τ`.
pub fn lambda_phi_bisection(phi: &NFunction, s: f64) -> f64 {
    let target = 1.0 / s;
    let g = |tau: f64| tau * phi.derivative(tau);
    let mut hi = 1.0;
    while g(hi) <= target {
        hi *= 2.0;
        if hi > OVERFLOW {
            return 0.0;
        }
    }
    let mut lo = hi / 2.0;
    while g(lo) > target {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-300 {
            return f64::INFINITY;
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        if g(mid.exp()) <= target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    1.0 / a.exp()
}

/// `R_Ψ(τ) = τ·Ψ⁻¹(4/τ)`.
pub fn r_psi(psi: &NFunction, tau: f64) -> Result<f64, OrliczError> {
    if !(tau > 0.0) {
        return Err(OrliczError::NonPositiveArgument(tau));
    }
    if tau.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(tau * psi.inverse(4.0 / tau))
}

/// `‖u‖_{L_1}·Ψ⁻¹(‖u‖_{L_∞}/‖u‖_{L_1})`, `0` for `u ≡ 0`.
pub fn interp_bound_of_samples(samples: &[f64], pair: &OrliczPair) -> f64 {
    let l1 = samples.iter().sum::<f64>() / samples.len() as f64;
    let linf = samples.iter().copied().fold(0.0, f64::max);
    if l1 == 0.0 {
        return 0.0;
    }
    l1 * pair.psi.inverse(linf / l1)
}

pub fn interp_bound(u: &SampledScalarFunction, pair: &OrliczPair) -> f64 {
    interp_bound_of_samples(&u.moduli(), pair)
}

/// `ϱ = mean Ψ₁(|ℓ|)` and `Π = ‖ℓ‖_(Ψ₁)·max(1, ϱ)` for nonpositive samples.
pub fn rho_and_pi_of_samples(ell: &[f64], psi1: &NFunction) -> Result<(f64, f64), OrliczError> {
    for (index, &value) in ell.iter().enumerate() {
        if value > 0.0 {
            return Err(OrliczError::PositiveSample { index, value });
        }
    }
    let moduli: Vec<f64> = ell.iter().map(|x| x.abs()).collect();
    let rho = moduli.iter().map(|&x| psi1.value(x)).sum::<f64>() / moduli.len() as f64;
    let rho = if rho > OVERFLOW { f64::INFINITY } else { rho };
    let lux = luxemburg_norm_of_samples(&moduli, psi1);
    let pi = if lux == 0.0 { 0.0 } else { lux * rho.max(1.0) };
    Ok((rho, pi))
}

pub fn rho_and_pi(
    ell: &SampledScalarFunction,
    psi1: &NFunction,
) -> Result<(f64, f64), OrliczError> {
    rho_and_pi_of_samples(&ell.real_parts(), psi1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleGrid;
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn luxemburg_of_constants() {
        let grid = CircleGrid::new(64).unwrap();
        let one = SampledScalarFunction::constant(&grid, Complex64::new(1.0, 0.0));
        let phi = NFunction::power(2.0).unwrap();
        // ‖1‖_(Φ) = 1/Φ⁻¹(1) = 1/√2.
        assert!(rel(luxemburg_norm(&one, &phi), 0.5f64.sqrt()) < 1e-10);
        let zero = SampledScalarFunction::constant(&grid, Complex64::new(0.0, 0.0));
        assert_eq!(luxemburg_norm(&zero, &phi), 0.0);
    }

    #[test]
    fn luxemburg_power_relation() {
        // For Ψ(t) = t^p/p the Luxemburg norm is p^{-1/p}·‖f‖_{L_p}.
        let grid = CircleGrid::new(256).unwrap();
        let f = SampledScalarFunction::from_real_fn(&grid, |t| 1.0 + 0.5 * (3.0 * t).sin());
        for p in [1.5f64, 2.0, 3.5] {
            let psi = NFunction::power(p).unwrap();
            let lp = f.lp_norm(p).unwrap();
            assert!(rel(luxemburg_norm(&f, &psi), p.powf(-1.0 / p) * lp) < 1e-10);
        }
    }

    #[test]
    fn orlicz_power_norm() {
        let grid = CircleGrid::new(64).unwrap();
        let one = SampledScalarFunction::constant(&grid, Complex64::new(1.0, 0.0));
        assert!(rel(orlicz_norm_power(&one, 2.0).unwrap(), 2f64.sqrt()) < 1e-15);
        let f = SampledScalarFunction::from_real_fn(&grid, |t| t.cos());
        let g = f.map(|z| z * -3.0);
        let (nf, ng) = (
            orlicz_norm_power(&f, 3.0).unwrap(),
            orlicz_norm_power(&g, 3.0).unwrap(),
        );
        assert!(rel(ng, 3.0 * nf) < 1e-14);
    }

    #[test]
    fn lambda_closed_form_and_bisection_agree() {
        let phi = NFunction::power(2.0).unwrap();
        assert!(rel(lambda_phi(&phi, 0.25).unwrap(), 0.5) < 1e-15);
        assert!(rel(lambda_phi_bisection(&phi, 0.25), 0.5) < 1e-12);
        let pair = OrliczPair::power(3.0).unwrap();
        for s in [1e-6, 0.01, 1.0, 50.0] {
            let closed = lambda_phi(&pair.phi, s).unwrap();
            assert!(rel(lambda_phi_bisection(&pair.phi, s), closed) < 1e-12);
        }
        let mut last = f64::INFINITY;
        for k in 0..12 {
            let v = lambda_phi(&pair.phi, 10f64.powi(-k)).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-7);
    }

    #[test]
    fn r_psi_closed_form() {
        let psi = NFunction::power(2.0).unwrap();
        assert!(rel(r_psi(&psi, 1.0).unwrap(), 8f64.sqrt()) < 1e-15);
        let p0 = 3.0;
        let psi = NFunction::power(p0).unwrap();
        let q0 = p0 / (p0 - 1.0);
        for s in [1e-4f64, 0.3, 7.0] {
            let closed = (4.0 * p0).powf(1.0 / p0) * s.powf(1.0 / q0);
            assert!(rel(r_psi(&psi, s).unwrap(), closed) < 1e-13);
        }
    }

    #[test]
    fn exp_pair_complement_is_consistent() {
        // Young's equality Φ(x) + Ψ(Φ'(x)) = x·Φ'(x).
        let pair = OrliczPair::exp(2.0).unwrap();
        for x in [1e-4, 0.1, 1.0, 5.0, 40.0] {
            let d = pair.phi.derivative(x);
            let lhs = pair.phi.value(x) + pair.psi.value(d);
            assert!(rel(lhs, x * d) < 1e-10, "x = {x}");
        }
        assert!(pair.psi.value(400.0).is_infinite());
        for y in [1e-8, 0.5, 3.0, 1e6] {
            assert!(rel(pair.psi.value(pair.psi.inverse(y)), y) < 1e-12);
        }
    }

    #[test]
    fn tabulated_pair_matches_power_density() {
        // u(x) = x gives Φ(x) = x²/2 exactly, and the complement is y²/2.
        let samples: Vec<(f64, f64)> = (1..=4).map(|k| (k as f64, k as f64)).collect();
        let pair = OrliczPair::custom(&samples).unwrap();
        for x in [0.3, 2.5, 9.0] {
            assert!(rel(pair.phi.value(x), x * x / 2.0) < 1e-14);
            assert!(rel(pair.psi.value(x), x * x / 2.0) < 1e-14);
            assert!(rel(pair.phi.inverse(x), (2.0 * x).sqrt()) < 1e-12);
        }
        assert!(OrliczPair::custom(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(OrliczPair::custom(&[(1.0, 2.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn interp_bound_examples() {
        let grid = CircleGrid::new(1024).unwrap();
        let pair = OrliczPair::power(2.0).unwrap();
        let c = 3.0;
        let u = SampledScalarFunction::constant(&grid, Complex64::new(c, 0.0));
        let bound = interp_bound(&u, &pair);
        assert!(rel(bound, c * pair.psi.inverse(1.0)) < 1e-14);
        assert!(luxemburg_norm(&u, &pair.phi) <= bound);
        // Bump of measure μ and height h: bound = μh·(2/μ)^{1/2}.
        let h = 2.0;
        let bump =
            SampledScalarFunction::from_real_fn(&grid, |t| if t.abs() < 0.5 { h } else { 0.0 });
        let mu = grid.count_in(-0.5, 0.5) as f64 / grid.size() as f64;
        assert!(rel(interp_bound(&bump, &pair), mu * h * (2.0 / mu).sqrt()) < 1e-12);
        let zero = SampledScalarFunction::constant(&grid, Complex64::new(0.0, 0.0));
        assert_eq!(interp_bound(&zero, &pair), 0.0);
    }

    #[test]
    fn rho_and_pi_constants() {
        let psi = NFunction::power(2.0).unwrap();
        assert_eq!(rho_and_pi_of_samples(&[0.0; 8], &psi).unwrap(), (0.0, 0.0));
        let (rho, pi) = rho_and_pi_of_samples(&[-1.0; 8], &psi).unwrap();
        assert!(rel(rho, 0.5) < 1e-15);
        assert!(rel(pi, 0.5f64.sqrt()) < 1e-10);
        assert!(rho_and_pi_of_samples(&[-1.0, 0.5], &psi).is_err());
        let exp = NFunction::exp_type(2.0).unwrap();
        let (rho, pi) = rho_and_pi_of_samples(&[-500.0, -1.0], &exp).unwrap();
        assert!(rho.is_infinite() && pi.is_infinite());
    }

    #[test]
    fn pair_spec_json() {
        let spec: PairSpec = serde_json::from_str(r#"{"kind":"exp","p1":2.0}"#).unwrap();
        assert_eq!(spec, PairSpec::Exp { p1: 2.0 });
        let text = serde_json::to_string(&PairSpec::Power { p: 3.0 }).unwrap();
        assert_eq!(text, r#"{"kind":"power","p":3.0}"#);
        let custom: PairSpec =
            serde_json::from_str(r#"{"kind":"custom","samples":[[1.0,1.0],[2.0,3.0]]}"#).unwrap();
        assert!(OrliczPair::from_spec(&custom).is_ok());
    }
}
