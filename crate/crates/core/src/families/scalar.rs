//! The scalar family showing that the exponent `(p−1)/p` cannot be raised.
//!
//! `w = −i(−i(ζ−1)/(ζ+1))^{α−1}`, `h_ε = ε·Re w`, `g_ε = f·e^{h_ε}` with `f`
//! a power on each half circle. Since `g_ε⁺ = f⁺·exp(½(h_ε + i·h̃_ε))`, the
//! distance of the factors is the integral of
//! `f·|1 − exp(½(h_ε + i·h̃_ε))|²`, which is evaluated by quadrature on a mesh
//! graded toward `ϑ = 0` and subdivided by the phase of `h̃_ε`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::circle::quadrature::{graded_cells, GaussLegendre};
use crate::circle::{CircleGrid, SampledScalarFunction};

/// Below the angle where `|h̃_ε|` exceeds this, the integral is taken from
/// its asymptotic expansion.
const PHASE_CUTOFF: f64 = 4000.0;
/// Cells graded toward `ϑ = ±π` stop here.
const OUTER_FLOOR: f64 = 1e-15;
const ORDERS: [usize; 2] = [20, 32];
const RELATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarFamilyParams {
    pub p: f64,
    pub beta: f64,
    pub gamma0: f64,
    pub alpha: f64,
    pub tau: f64,
}

impl ScalarFamilyParams {
    /// `β = 0.1`, `γ₀` halfway between `(p−1+β)/(p+β)` and `γ`, `α` the
    /// largest admissible value minus `10⁻³`, `τ` the smallest admissible
    /// positive integer.
    pub fn defaults(p: f64, gamma: f64) -> Result<Self, FamilyError> {
        let beta = 0.1;
        let floor = (p - 1.0 + beta) / (p + beta);
        let gamma0 = 0.5 * (floor + gamma);
        let alpha = 1.0 - floor / gamma0 - 1e-3;
        let tau = (1..1000)
            .map(f64::from)
            .find(|t| (t + 1.0) / (t + 2.0 - alpha) > gamma0)
            .unwrap_or(f64::NAN);
        let params = Self {
            p,
            beta,
            gamma0,
            alpha,
            tau,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: String| Err(FamilyError::InvalidParameter(m));
        let Self {
            p,
            beta,
            gamma0,
            alpha,
            tau,
        } = *self;
        if !(p > 1.0 && p.is_finite()) {
            return bad(format!("p = {p} must lie in (1, ∞)"));
        }
        if !(beta > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(tau > 0.0) {
            return bad(format!(
                "need β > 0, α ∈ (0, 1), τ > 0 (β = {beta}, α = {alpha}, τ = {tau})"
            ));
        }
        if !(gamma0 > (p - 1.0) / p && gamma0 < 1.0) {
            return bad(format!("γ₀ = {gamma0} must lie in ((p−1)/p, 1)"));
        }
        let needed = (p - 1.0 + beta) / ((1.0 - alpha) * (p + beta));
        if gamma0 < needed {
            return bad(format!(
                "γ₀ = {gamma0} is below (p−1+β)/((1−α)(p+β)) = {needed}"
            ));
        }
        let reach = (tau + 1.0) / (tau + 2.0 - alpha);
        if !(reach > gamma0) {
            return bad(format!("(τ+1)/(τ+2−α) = {reach} must exceed γ₀ = {gamma0}"));
        }
        Ok(())
    }

    fn s(&self) -> f64 {
        1.0 / (self.p + self.beta)
    }

    /// `v₀`, the constant making `Im w + v₀` the mean-zero conjugate of
    /// `Re w`: `v₀ = −mean(Im w) = sin(πα/2)`.
    pub fn v0(&self) -> f64 {
        (PI * self.alpha / 2.0).sin()
    }

    /// `‖Re w‖_{L_1} = cos(πα/2)`.
    pub fn re_w_l1(&self) -> f64 {
        (PI * self.alpha / 2.0).cos()
    }

    pub fn re_w(&self, t: f64) -> f64 {
        if t < 0.0 {
            -(t / 2.0).tan().abs().powf(self.alpha - 1.0) * (PI * self.alpha).sin()
        } else {
            0.0
        }
    }

    pub fn im_w(&self, t: f64) -> f64 {
        let big = (t / 2.0).tan().abs().powf(self.alpha - 1.0);
        if t < 0.0 {
            big * (PI * self.alpha).cos()
        } else {
            -big
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        if t < 0.0 {
            t.abs().powf(self.tau)
        } else {
            t.powf(-self.s())
        }
    }

    /// `‖f‖_{L_p}` in closed form.
    pub fn f_lp_norm(&self, p: f64) -> f64 {
        let s = self.s();
        let right = PI.powf(1.0 - p * s) / (1.0 - p * s);
        let left = PI.powf(self.tau * p + 1.0) / (self.tau * p + 1.0);
        if !(p * s < 1.0) {
            return f64::INFINITY;
        }
        ((right + left) / (2.0 * PI)).powf(1.0 / p)
    }

    /// `I_ε = [ϑ₁, ϑ₂]`, where `h̃_ε ∈ [−3π, −π]`.
    pub fn interval(&self, eps: f64) -> (f64, f64) {
        let e = 1.0 / (self.alpha - 1.0);
        let scale = eps.powf(1.0 / (1.0 - self.alpha));
        let v0 = self.v0();
        (
            2.0 * ((3.0 * PI + eps * v0).powf(e) * scale).atan(),
            2.0 * ((PI + eps * v0).powf(e) * scale).atan(),
        )
    }
}

/// The family sampled on a grid.
#[derive(Clone, Debug)]
pub struct ScalarFamilySamples {
    pub f: SampledScalarFunction,
    pub g: SampledScalarFunction,
    pub h: SampledScalarFunction,
    /// `ε(Im w + v₀)`.
    pub h_tilde: SampledScalarFunction,
}

pub fn scalar_family(
    params: &ScalarFamilyParams,
    eps: f64,
    grid: &CircleGrid,
) -> Result<ScalarFamilySamples, FamilyError> {
    params.validate()?;
    if !(eps > 0.0) {
        return Err(FamilyError::InvalidParameter(format!(
            "eps = {eps} must be positive"
        )));
    }
    let h = SampledScalarFunction::from_real_fn(grid, |t| eps * params.re_w(t));
    let f = SampledScalarFunction::from_real_fn(grid, |t| params.f(t));
    let g =
        SampledScalarFunction::from_real_fn(grid, |t| params.f(t) * (eps * params.re_w(t)).exp());
    let v0 = params.v0();
    let h_tilde = SampledScalarFunction::from_real_fn(grid, |t| eps * (params.im_w(t) + v0));
    Ok(ScalarFamilySamples { f, g, h, h_tilde })
}

/// Quadrature results for one `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarMeasurement {
    pub eps: f64,
    /// `‖f⁺ − g_ε⁺‖²_{H₂}`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `‖log f − log g_ε‖_{L_1} = ε·cos(πα/2)`.
    pub dlog: f64,
    /// `‖f − g_ε‖_{L_1}`.
    pub d1: f64,
    /// Values at the successive Gauss-Legendre orders.
    pub refinement: Vec<(usize, f64)>,
}

/// `f·|1 − exp(½(h + i·h̃))|²` at `ϑ = sign·u`, written without cancellation.
fn integrand(params: &ScalarFamilyParams, eps: f64, sign: f64, u: f64) -> f64 {
    let t = sign * u;
    let h = eps * params.re_w(t);
    let ht = eps * (params.im_w(t) + params.v0());
    let e = (0.5 * h).exp();
    params.f(t) * ((0.5 * h).exp_m1().powi(2) + 4.0 * e * (0.25 * ht).sin().powi(2))
}

/// `u` below which `ε·tan(u/2)^{α−1}` exceeds `phase`.
fn phase_cutoff(params: &ScalarFamilyParams, eps: f64, phase: f64) -> f64 {
    2.0 * (phase / eps).powf(1.0 / (params.alpha - 1.0)).atan()
}

/// Cells covering `[lo, π)`, graded toward both ends, each split so that the
/// phase `ε·tan(u/2)^{α−1}` moves by at most one radian per panel.
fn panels(params: &ScalarFamilyParams, eps: f64, lo: f64) -> Vec<(f64, f64)> {
    let mid = PI / 2.0;
    let mut cells: Vec<(f64, f64)> = if lo < mid {
        graded_cells(mid, lo)
    } else {
        Vec::new()
    };
    cells.extend(
        graded_cells(PI - mid, OUTER_FLOOR)
            .into_iter()
            .map(|(a, b)| (PI - b, PI - a)),
    );
    let phase = |u: f64| eps * (u / 2.0).tan().powf(params.alpha - 1.0);
    let mut out = Vec::new();
    for (a, b) in cells {
        let pieces = ((phase(a) - phase(b)).abs().ceil() as usize).max(1);
        let width = (b - a) / pieces as f64;
        out.extend((0..pieces).map(|k| (a + k as f64 * width, a + (k + 1) as f64 * width)));
    }
    out
}

/// `‖f⁺ − g_ε⁺‖²_{H₂}`, `‖f − g_ε‖_{L_1}` and `‖log f − log g_ε‖_{L_1}`.
pub fn measure_scalar(
    params: &ScalarFamilyParams,
    eps: f64,
) -> Result<ScalarMeasurement, FamilyError> {
    measure_with_cutoff(params, eps, PHASE_CUTOFF)
}

fn measure_with_cutoff(
    params: &ScalarFamilyParams,
    eps: f64,
    phase: f64,
) -> Result<ScalarMeasurement, FamilyError> {
    params.validate()?;
    if !(eps > 0.0) {
        return Err(FamilyError::InvalidParameter(format!(
            "eps = {eps} must be positive"
        )));
    }
    let uc = phase_cutoff(params, eps, phase);
    let cells = panels(params, eps, uc);
    let s = params.s();
    // Below the cutoff the left integrand is f up to e^{−h/2} and the right
    // one is 2f(1 − cos ψ), ψ = h̃/2. Two integrations by parts of ∫f·cos ψ
    // leave boundary terms at the cutoff and a remainder under |g'/ψ'|,
    // where g = f/ψ'.
    let tan = (0.5 * uc).tan();
    let psi = 0.5 * eps * (params.v0() - tan.powf(params.alpha - 1.0));
    let dpsi = 0.25 * eps * (1.0 - params.alpha) * tan.powf(params.alpha - 2.0) * (1.0 + tan * tan);
    let ddpsi_over_dpsi = (params.alpha - 2.0) * (1.0 + tan * tan) / (2.0 * tan) + tan;
    let g = params.f(uc) / dpsi;
    let dg = g * (-s / uc - ddpsi_over_dpsi);
    let boundary = g * psi.sin() + dg / dpsi * psi.cos();
    let tail = 2.0 * uc.powf(1.0 - s) / (1.0 - s) - 2.0 * boundary
        + uc.powf(params.tau + 1.0) / (params.tau + 1.0);
    let oscillation = 2.0 * (dg / dpsi).abs();
    let mut refinement = Vec::new();
    for order in ORDERS {
        let rule = GaussLegendre::new(order);
        let mut total = tail;
        for &(a, b) in &cells {
            total += rule.integrate(|u| integrand(params, eps, 1.0, u), a, b);
            total += rule.integrate(|u| integrand(params, eps, -1.0, u), a, b);
        }
        refinement.push((order, total / (2.0 * PI)));
    }
    let lhs = refinement[refinement.len() - 1].1;
    let lhs_error = (refinement[0].1 - lhs).abs() + oscillation / (2.0 * PI);
    if !(lhs_error <= RELATIVE_TOLERANCE * lhs.abs()) {
        return Err(FamilyError::Quadrature {
            eps,
            error: lhs_error,
            trace: refinement,
        });
    }
    let rule = GaussLegendre::new(ORDERS[1]);
    // Not oscillatory; below 10⁻³⁰ the integrand is under u^τ.
    let mut d1_cells = graded_cells(PI / 2.0, 1e-30);
    d1_cells.extend(
        graded_cells(PI / 2.0, OUTER_FLOOR)
            .into_iter()
            .map(|(a, b)| (PI - b, PI - a)),
    );
    let d1 = d1_cells
        .iter()
        .map(|&(a, b)| rule.integrate(|u| params.f(-u) * -(eps * params.re_w(-u)).exp_m1(), a, b))
        .sum::<f64>()
        / (2.0 * PI);
    Ok(ScalarMeasurement {
        eps,
        lhs,
        lhs_error,
        dlog: eps * params.re_w_l1(),
        d1,
        refinement,
    })
}

/// One row of the divergence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub measurement: ScalarMeasurement,
    /// `lhs/dlog^γ`.
    pub ratio: f64,
    /// Ratio divided by the previous row's ratio.
    pub growth: Option<f64>,
    /// `‖f − g_ε‖₁/ε^{(τ+1)/(τ+2−α)}`.
    pub c_tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub params: ScalarFamilyParams,
    pub gamma: f64,
    pub rows: Vec<DivergenceRow>,
    /// Largest `ε` from which every later step grows by at least 2.
    pub doubling_onset: Option<f64>,
    /// `max ratio / min ratio` over the rows.
    pub ratio_spread: f64,
    pub min_growth: f64,
}

pub fn gamma_divergence_check(
    params: &ScalarFamilyParams,
    gamma: f64,
    eps: &[f64],
) -> Result<DivergenceReport, FamilyError> {
    let measurements = eps
        .iter()
        .map(|&e| measure_scalar(params, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(divergence_from_measurements(params, gamma, measurements))
}

/// The divergence table from measurements already taken, in sequence order.
pub fn divergence_from_measurements(
    params: &ScalarFamilyParams,
    gamma: f64,
    measurements: Vec<ScalarMeasurement>,
) -> DivergenceReport {
    let mut rows: Vec<DivergenceRow> = Vec::with_capacity(measurements.len());
    let exponent = (params.tau + 1.0) / (params.tau + 2.0 - params.alpha);
    for m in measurements {
        let e = m.eps;
        let ratio = m.lhs / m.dlog.powf(gamma);
        let growth = rows.last().map(|r| ratio / r.ratio);
        rows.push(DivergenceRow {
            c_tau: m.d1 / e.powf(exponent),
            measurement: m,
            ratio,
            growth,
        });
    }
    let mut onset = None;
    for (k, row) in rows.iter().enumerate().rev() {
        match row.growth {
            Some(g) if g >= 2.0 => onset = Some(rows[k - 1].measurement.eps),
            _ => break,
        }
    }
    let ratios = rows.iter().map(|r| r.ratio);
    let max = ratios.clone().fold(0.0, f64::max);
    let min = ratios.fold(f64::INFINITY, f64::min);
    DivergenceReport {
        params: *params,
        gamma,
        doubling_onset: onset,
        ratio_spread: if rows.is_empty() { 1.0 } else { max / min },
        min_growth: rows
            .iter()
            .filter_map(|r| r.growth)
            .fold(f64::INFINITY, f64::min),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::quadrature::adaptive_gauss_kronrod;

    fn defaults() -> ScalarFamilyParams {
        ScalarFamilyParams::defaults(2.0, 0.6).unwrap()
    }

    #[test]
    fn default_parameters() {
        let p = defaults();
        assert!((p.gamma0 - 0.5 * (1.1 / 2.1 + 0.6)).abs() < 1e-15);
        assert_eq!(p.tau, 1.0);
        let needed = 1.1 / ((1.0 - p.alpha) * 2.1);
        assert!(p.gamma0 >= needed && p.gamma0 - needed < 2e-3);
        assert!(ScalarFamilyParams { tau: 0.01, ..p }.validate().is_err());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let p = defaults();
        let mean = |f: &dyn Fn(f64) -> f64| {
            let right = adaptive_gauss_kronrod(|u| f(u), 0.0, PI, 1e-13, 1e-13, 2000).value;
            let left = adaptive_gauss_kronrod(|u| f(-u), 0.0, PI, 1e-13, 1e-13, 2000).value;
            (right + left) / (2.0 * PI)
        };
        let v0 = -mean(&|t| p.im_w(t));
        assert!((v0 - p.v0()).abs() < 1e-8, "{v0} vs {}", p.v0());
        let l1 = mean(&|t| p.re_w(t).abs());
        assert!((l1 - p.re_w_l1()).abs() < 1e-8);
        let lp = mean(&|t| p.f(t).powi(2)).sqrt();
        assert!((lp - p.f_lp_norm(2.0)).abs() < 1e-8);
    }

    #[test]
    fn conjugate_on_grid_approaches_h_tilde() {
        // With the default α the singularity |ϑ|^{α−1} is too strong for grid
        // convergence to show.
        let p = ScalarFamilyParams {
            p: 1.5,
            beta: 0.1,
            gamma0: 0.78,
            alpha: 0.5,
            tau: 1.0,
        };
        let mut errors = Vec::new();
        for log2 in [12, 14] {
            let grid = CircleGrid::with_log2(log2).unwrap();
            let s = scalar_family(&p, 0.1, &grid).unwrap();
            let conj = s.h.conjugate().unwrap();
            errors.push(conj.l1_distance(&s.h_tilde).unwrap());
        }
        assert!(errors[1] < errors[0] && errors[1] < 1e-2, "{errors:?}");
    }

    #[test]
    fn interval_properties() {
        let p = defaults();
        for eps in [1e-1, 1e-2, 1e-3] {
            let (a, b) = p.interval(eps);
            assert!(0.0 < a && a < b);
            for k in 0..=200 {
                let t = a + (b - a) * k as f64 / 200.0;
                let ht = eps * (p.im_w(t) + p.v0());
                assert!((0.5 * ht).cos() <= 1e-12);
            }
            let limit =
                2.0 * (PI.powf(1.0 / (p.alpha - 1.0)) - (3.0 * PI).powf(1.0 / (p.alpha - 1.0)));
            let c = (b - a) / eps.powf(1.0 / (1.0 - p.alpha));
            assert!(c > 0.5 * limit);
        }
    }

    #[test]
    fn tail_expansion_is_independent_of_cutoff() {
        let p = defaults();
        for eps in [1e-1, 1e-3] {
            let a = measure_with_cutoff(&p, eps, 2500.0).unwrap();
            let b = measure_scalar(&p, eps).unwrap();
            assert!((a.lhs - b.lhs).abs() < 1e-8 * b.lhs, "{} {}", a.lhs, b.lhs);
        }
    }

    #[test]
    fn measurement_is_linear_in_log_distance() {
        let p = defaults();
        let a = measure_scalar(&p, 1e-2).unwrap();
        let b = measure_scalar(&p, 1e-3).unwrap();
        assert!((a.dlog / b.dlog - 10.0).abs() < 1e-12);
        assert!(a.lhs > b.lhs && b.lhs > 0.0);
        assert!(a.lhs_error < 1e-8 * a.lhs);
    }
}
