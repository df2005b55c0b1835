//! Right-hand sides of the continuity estimates.
//!
//! Every estimate has the shape `additive + prefactor·(logplus + core)`, and
//! [`RhsParts`] keeps the four pieces apart so reductions between the Orlicz
//! and power forms can be compared term by term.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::{c_constant, k0, scalar_constant};
use super::BoundsError;
use crate::orlicz::{lambda_phi, r_psi, NFunction, OrliczPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremKind {
    #[serde(rename = "thm1.2")]
    Thm12,
    #[serde(rename = "thm2.2")]
    Thm22,
    #[serde(rename = "thm2.3")]
    Thm23,
    #[serde(rename = "thm1.3")]
    Thm13,
    #[serde(rename = "thm1.3-inf")]
    Thm13Inf,
    #[serde(rename = "thm1.4")]
    Thm14,
    #[serde(rename = "thm1.4-inf")]
    Thm14Inf,
    #[serde(rename = "thm1.5")]
    Thm15,
    #[serde(rename = "thm3.1")]
    Thm31,
    #[serde(rename = "thm3.2")]
    Thm32,
    #[serde(rename = "thm3.3")]
    Thm33,
}

impl TheoremKind {
    pub const ALL: [TheoremKind; 11] = [
        Self::Thm12,
        Self::Thm22,
        Self::Thm23,
        Self::Thm13,
        Self::Thm13Inf,
        Self::Thm14,
        Self::Thm14Inf,
        Self::Thm15,
        Self::Thm31,
        Self::Thm32,
        Self::Thm33,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Thm12 => "thm1.2",
            Self::Thm22 => "thm2.2",
            Self::Thm23 => "thm2.3",
            Self::Thm13 => "thm1.3",
            Self::Thm13Inf => "thm1.3-inf",
            Self::Thm14 => "thm1.4",
            Self::Thm14Inf => "thm1.4-inf",
            Self::Thm15 => "thm1.5",
            Self::Thm31 => "thm3.1",
            Self::Thm32 => "thm3.2",
            Self::Thm33 => "thm3.3",
        }
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, Self::Thm12 | Self::Thm22 | Self::Thm23)
    }

    pub fn is_orlicz(self) -> bool {
        matches!(self, Self::Thm22 | Self::Thm31 | Self::Thm32 | Self::Thm33)
    }
}

impl fmt::Display for TheoremKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremKind {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| BoundsError::UnknownTheorem(s.to_string()))
    }
}

/// Distances between `F` and `G` and norms of `F` entering the estimates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairStatistics {
    pub n: usize,
    /// `‖G − F‖_{L_1}`.
    pub d1: f64,
    /// `‖log det G − log det F‖_{L_1}`.
    pub dlogdet: f64,
    /// `‖log₊‖G‖ − log₊‖F‖‖_{L_1}`.
    pub dlogplus: f64,
    pub p0: Option<f64>,
    pub p1: Option<f64>,
    pub alpha: Option<f64>,
    /// `‖F‖_{L_{p₀}}`.
    pub fp0: Option<f64>,
    /// `‖F‖_{L_∞}`.
    pub finf: Option<f64>,
    /// `‖ℓ_F‖_{L_{p₁}}`.
    pub ellp1: Option<f64>,
    /// `‖ℓ_F‖_{L_∞}`.
    pub ellinf: Option<f64>,
    /// `‖Q_F‖_{L_{p₁}}`.
    pub qfp1: Option<f64>,
    /// `‖F‖_{Ψ₀}` for the chosen pair.
    pub f_psi0: Option<f64>,
    /// `‖ℓ_F‖_{(Ψ₁)}`.
    pub ell_lux1: Option<f64>,
    /// `ϱ(ℓ_F; Ψ₁)`.
    pub rho1: Option<f64>,
    /// `Π_{Ψ₁}(ℓ_F)`.
    pub pi1: Option<f64>,
}

/// `total = additive + prefactor·(logplus + core)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RhsParts {
    pub additive: f64,
    pub prefactor: f64,
    pub logplus: f64,
    pub core: f64,
}

impl RhsParts {
    pub fn total(&self) -> f64 {
        let inner = self.logplus + self.core;
        if inner == 0.0 {
            return self.additive;
        }
        self.additive + self.prefactor * inner
    }
}

/// The nondecreasing map `ν` used to choose the eigenvalue floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Nu {
    /// `min(τ^α, 1)`.
    Power { alpha: f64 },
    /// `min(1, τ^{1/(p₁+1)})`.
    Root { p1: f64 },
    /// Log-log interpolation through `(τ, ν)` points, power-law extrapolation
    /// below the first point and constant above the last.
    Tabulated { points: Vec<(f64, f64)> },
}

impl Nu {
    pub fn eval(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { alpha } => tau.powf(*alpha).min(1.0),
            Self::Root { p1 } => tau.powf(1.0 / (p1 + 1.0)).min(1.0),
            Self::Tabulated { points } => {
                let log = |p: &(f64, f64)| (p.0.ln(), p.1.ln());
                if points.len() < 2 {
                    return points.first().map_or(0.0, |p| p.1);
                }
                let last = points[points.len() - 1];
                if tau >= last.0 {
                    return last.1.min(1.0);
                }
                let i = points
                    .partition_point(|p| p.0 <= tau)
                    .clamp(1, points.len() - 1);
                let (x0, y0) = log(&points[i - 1]);
                let (x1, y1) = log(&points[i]);
                let slope = (y1 - y0) / (x1 - x0);
                (y0 + slope * (tau.ln() - x0)).exp().min(1.0)
            }
        }
    }

    /// Checks monotonicity and range on a fine grid, and the two limits
    /// `ν(τ) → 0`, `τ/ν(τ) → 0` along `τ = 10^{-1}, …, 10^{-15}`.
    pub fn validate(&self) -> Result<(), BoundsError> {
        let bad = |m: &str| Err(BoundsError::InvalidNu(m.to_string()));
        if let Self::Tabulated { points } = self {
            if points.len() < 2 {
                return bad("need at least two points");
            }
            if points.iter().any(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
                return bad("points must be positive");
            }
        }
        let mut last = 0.0;
        for k in 0..=400 {
            let tau = 10f64.powf(-15.0 + k as f64 * 0.05);
            let v = self.eval(tau);
            if !(0.0..=1.0).contains(&v) {
                return bad("values must lie in [0, 1]");
            }
            if v < last {
                return bad("must be nondecreasing");
            }
            last = v;
        }
        let decades: Vec<f64> = (1..=15).map(|k| 10f64.powi(-k)).collect();
        let values: Vec<f64> = decades.iter().map(|&t| self.eval(t)).collect();
        let ratios: Vec<f64> = decades.iter().zip(&values).map(|(t, v)| t / v).collect();
        if values.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("ν(τ) does not decrease to 0 along the decade grid");
        }
        if ratios.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("τ/ν(τ) does not decrease to 0 along the decade grid");
        }
        Ok(())
    }
}

/// The N-function pairs and `ν` of the Orlicz-form estimates.
#[derive(Clone, Debug)]
pub struct OrliczSetup {
    pub pair0: OrliczPair,
    pub pair1: Option<OrliczPair>,
    pub nu: Nu,
}

fn need(value: Option<f64>, theorem: TheoremKind, field: &'static str) -> Result<f64, BoundsError> {
    value.ok_or(BoundsError::MissingStatistic { theorem, field })
}

fn exponent_ok(p: f64, theorem: TheoremKind, name: &str) -> Result<(), BoundsError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::Precondition {
            theorem,
            condition: format!("{name} = {p} must lie in (1, ∞)"),
        })
    }
}

/// `x^a` with `x ≥ 0`, `0^a = 0` for `a > 0`.
fn pow0(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// `|log d|^{e}` for `e < 0`: `0` at `d = 0`, `+∞` at `d = 1`.
fn abs_log_pow(d: f64, e: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d.ln().abs().powf(e)
    }
}

/// `|log d|·d^a`, `0` at `d = 0`.
fn log_times_power(d: f64, a: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d.ln().abs() * d.powf(a)
    }
}

fn check_d1(theorem: TheoremKind, d1: f64, max: f64, label: &str) -> Result<(), BoundsError> {
    if d1 <= max {
        Ok(())
    } else {
        Err(BoundsError::Precondition {
            theorem,
            condition: format!("‖G − F‖_L1 = {d1:e} exceeds {label}"),
        })
    }
}

/// `X = 3n·d₁^{1−α} + 2(n+1)α^{1−p₁}p₁‖ℓ_F‖^{p₁}_{L_{p₁}}|log d₁|^{1−p₁} + dlogdet`.
fn ell_power_bracket(s: &PairStatistics, theorem: TheoremKind) -> Result<f64, BoundsError> {
    let alpha = need(s.alpha, theorem, "alpha")?;
    let p1 = need(s.p1, theorem, "p1")?;
    let ell = need(s.ellp1, theorem, "ellp1")?;
    exponent_ok(p1, theorem, "p1")?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::Precondition {
            theorem,
            condition: format!("alpha = {alpha} must lie in (0, 1)"),
        });
    }
    let n = s.n as f64;
    let ell_term = if ell == 0.0 {
        0.0
    } else {
        2.0 * (n + 1.0) * alpha.powf(1.0 - p1) * p1 * ell.powf(p1) * abs_log_pow(s.d1, 1.0 - p1)
    };
    Ok(3.0 * n * pow0(s.d1, 1.0 - alpha) + ell_term + s.dlogdet)
}

/// `Y = (3n + 4(n+1)‖Q_F‖^{2p₁}|log d₁|/(p₁+1))·d₁^{p₁/(p₁+1)} + dlogdet`.
fn q_power_bracket(s: &PairStatistics, theorem: TheoremKind) -> Result<f64, BoundsError> {
    let p1 = need(s.p1, theorem, "p1")?;
    let q = need(s.qfp1, theorem, "qfp1")?;
    exponent_ok(p1, theorem, "p1")?;
    let n = s.n as f64;
    let a = p1 / (p1 + 1.0);
    Ok(3.0 * n * pow0(s.d1, a)
        + 4.0 * (n + 1.0) * q.powf(2.0 * p1) / (p1 + 1.0) * log_times_power(s.d1, a)
        + s.dlogdet)
}

fn power_prefactor_parts(
    s: &PairStatistics,
    theorem: TheoremKind,
) -> Result<(f64, f64, f64), BoundsError> {
    let p0 = need(s.p0, theorem, "p0")?;
    exponent_ok(p0, theorem, "p0")?;
    let fp0 = need(s.fp0, theorem, "fp0")?;
    let q0 = p0 / (p0 - 1.0);
    let prefactor = 2.0 * q0.powf(1.0 / q0) * (fp0 + 1.0);
    let logplus = c_constant(p0) * pow0(s.dlogplus, 1.0 / q0);
    let core_scale = 2.0 * (2.0 * p0).powf(1.0 / p0);
    Ok((prefactor, logplus, core_scale))
}

fn check_scalar(s: &PairStatistics, theorem: TheoremKind) -> Result<(), BoundsError> {
    if s.n == 1 {
        Ok(())
    } else {
        Err(BoundsError::Precondition {
            theorem,
            condition: format!("scalar estimate needs n = 1, got n = {}", s.n),
        })
    }
}

/// Right-hand sides of the scalar estimates.
pub fn rhs_scalar(
    theorem: TheoremKind,
    s: &PairStatistics,
    pair0: Option<&OrliczPair>,
) -> Result<RhsParts, BoundsError> {
    check_scalar(s, theorem)?;
    let dlog = s.dlogdet;
    match theorem {
        TheoremKind::Thm12 => {
            let p = need(s.p0, theorem, "p0")?;
            exponent_ok(p, theorem, "p0")?;
            let fp = need(s.fp0, theorem, "fp0")?;
            Ok(RhsParts {
                additive: 2.0 * s.d1,
                prefactor: scalar_constant(p) * fp,
                logplus: 0.0,
                core: pow0(dlog, (p - 1.0) / p),
            })
        }
        TheoremKind::Thm22 => {
            let pair = pair0.ok_or(BoundsError::MissingStatistic {
                theorem,
                field: "pair0",
            })?;
            let f_psi = need(s.f_psi0, theorem, "f_psi0")?;
            Ok(RhsParts {
                additive: 2.0 * s.d1,
                prefactor: 4.0 * f_psi,
                logplus: 0.0,
                core: lambda_at(&pair.phi, 0.5 * k0() * dlog)?,
            })
        }
        TheoremKind::Thm23 => {
            let finf = need(s.finf, theorem, "finf")?;
            Ok(RhsParts {
                additive: 2.0 * s.d1,
                prefactor: 2.0 * k0() * finf,
                logplus: 0.0,
                core: dlog,
            })
        }
        other => Err(BoundsError::WrongFamily {
            theorem: other,
            expected: "scalar",
        }),
    }
}

/// Right-hand sides of the power-form matrix estimates.
pub fn rhs_matrix_power(theorem: TheoremKind, s: &PairStatistics) -> Result<RhsParts, BoundsError> {
    match theorem {
        TheoremKind::Thm13 => {
            check_d1(theorem, s.d1, 1.0, "1")?;
            let (prefactor, logplus, scale) = power_prefactor_parts(s, theorem)?;
            let q0 = {
                let p0 = s.p0.unwrap_or(2.0);
                p0 / (p0 - 1.0)
            };
            let x = ell_power_bracket(s, theorem)?;
            Ok(RhsParts {
                additive: 4.0 * s.d1,
                prefactor,
                logplus,
                core: scale * pow0(x, 1.0 / q0),
            })
        }
        TheoremKind::Thm13Inf => {
            check_d1(theorem, s.d1, 1.0, "1")?;
            let finf = need(s.finf, theorem, "finf")?;
            let x = ell_power_bracket(s, theorem)?;
            Ok(RhsParts {
                additive: 4.0 * s.d1,
                prefactor: 4.0 * finf.max(1.0),
                logplus: k0() * s.dlogplus,
                core: x,
            })
        }
        TheoremKind::Thm14 => {
            check_d1(theorem, s.d1, (-4f64).exp(), "e^-4")?;
            let (prefactor, logplus, scale) = power_prefactor_parts(s, theorem)?;
            let p0 = s.p0.unwrap_or(2.0);
            let q0 = p0 / (p0 - 1.0);
            let y = q_power_bracket(s, theorem)?;
            Ok(RhsParts {
                additive: 4.0 * s.d1,
                prefactor,
                logplus,
                core: scale * pow0(y, 1.0 / q0),
            })
        }
        TheoremKind::Thm14Inf => {
            check_d1(theorem, s.d1, (-4f64).exp(), "e^-4")?;
            let finf = need(s.finf, theorem, "finf")?;
            let y = q_power_bracket(s, theorem)?;
            Ok(RhsParts {
                additive: 4.0 * s.d1,
                prefactor: 4.0 * finf.max(1.0),
                logplus: k0() * s.dlogplus,
                core: y,
            })
        }
        TheoremKind::Thm15 => {
            let finf = need(s.finf, theorem, "finf")?;
            let ellinf = need(s.ellinf, theorem, "ellinf")?;
            let n = s.n as f64;
            Ok(RhsParts {
                additive: 0.0,
                prefactor: finf,
                logplus: 0.0,
                core: n * ellinf.exp() * s.d1 + s.dlogdet,
            })
        }
        other => Err(BoundsError::WrongFamily {
            theorem: other,
            expected: "power-form matrix",
        }),
    }
}

fn lambda_at(phi: &NFunction, s: f64) -> Result<f64, BoundsError> {
    if s == 0.0 {
        return Ok(0.0);
    }
    if s.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(lambda_phi(phi, s)?)
}

fn r_at(psi: &NFunction, tau: f64) -> Result<f64, BoundsError> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(r_psi(psi, tau)?)
}

/// `x/Ψ(x/scale)` with its limits: `0` when `scale = 0` or `x = ∞`, `+∞`
/// when `x = 0 < scale`.
fn log_over_psi(x: f64, scale: f64, psi: &NFunction) -> f64 {
    if scale == 0.0 || x.is_infinite() {
        return 0.0;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    let v = psi.value(x / scale);
    if v.is_infinite() {
        0.0
    } else {
        x / v
    }
}

/// Right-hand sides of the Orlicz-form matrix estimates.
pub fn rhs_matrix_orlicz(
    theorem: TheoremKind,
    s: &PairStatistics,
    setup: &OrliczSetup,
) -> Result<RhsParts, BoundsError> {
    let pair0 = &setup.pair0;
    let f_psi0 = need(s.f_psi0, theorem, "f_psi0")?;
    let n = s.n as f64;
    let prefactor = 2.0 * (f_psi0 + pair0.phi.inverse(1.0));
    let logplus = 4.0 * lambda_at(&pair0.phi, 0.5 * k0() * s.dlogplus)?;
    let argument = match theorem {
        TheoremKind::Thm31 | TheoremKind::Thm32 => {
            setup.nu.validate()?;
            let psi1 = &setup
                .pair1
                .as_ref()
                .ok_or(BoundsError::MissingStatistic {
                    theorem,
                    field: "pair1",
                })?
                .psi;
            let nu = setup.nu.eval(s.d1);
            let floor_term = if s.d1 == 0.0 {
                0.0
            } else {
                6.0 * n * s.d1 / nu
            };
            let abs_log_nu = if nu == 0.0 {
                f64::INFINITY
            } else {
                nu.ln().abs()
            };
            let ell_term = if theorem == TheoremKind::Thm31 {
                let lux = need(s.ell_lux1, theorem, "ell_lux1")?;
                log_over_psi(abs_log_nu, lux, psi1)
            } else {
                let pi = need(s.pi1, theorem, "pi1")?;
                if pi == 0.0 {
                    0.0
                } else {
                    pi * log_over_psi(abs_log_nu, 1.0, psi1)
                }
            };
            floor_term + 4.0 * (n + 1.0) * ell_term + 2.0 * s.dlogdet
        }
        TheoremKind::Thm33 => {
            let ellinf = need(s.ellinf, theorem, "ellinf")?;
            (2.0 * ellinf.exp() + 1.0) * n * s.d1 + s.dlogdet
        }
        other => {
            return Err(BoundsError::WrongFamily {
                theorem: other,
                expected: "Orlicz-form matrix",
            })
        }
    };
    Ok(RhsParts {
        additive: 4.0 * s.d1,
        prefactor,
        logplus,
        core: r_at(&pair0.psi, argument)?,
    })
}

/// Dispatches to the evaluator for `theorem`.
pub fn evaluate(
    theorem: TheoremKind,
    s: &PairStatistics,
    setup: Option<&OrliczSetup>,
) -> Result<RhsParts, BoundsError> {
    match theorem {
        TheoremKind::Thm12 | TheoremKind::Thm23 => rhs_scalar(theorem, s, None),
        TheoremKind::Thm22 => rhs_scalar(theorem, s, setup.map(|x| &x.pair0)),
        TheoremKind::Thm31 | TheoremKind::Thm32 | TheoremKind::Thm33 => {
            let setup = setup.ok_or(BoundsError::MissingStatistic {
                theorem,
                field: "pair0",
            })?;
            rhs_matrix_orlicz(theorem, s, setup)
        }
        _ => rhs_matrix_power(theorem, s),
    }
}
