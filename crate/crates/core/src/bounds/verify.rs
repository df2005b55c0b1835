//! Comparing `‖F⁺ − G⁺‖²_{H₂}` with the right-hand sides.
//!
//! Pairs are consumed node by node through [`PairSource`], so families whose
//! grids run into the millions never hold four matrix functions at once.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rhs::{evaluate, Nu, OrliczSetup, PairStatistics, RhsParts, TheoremKind};
use super::BoundsError;
use crate::circle::{lp_norm_of_samples, CircleGrid, SampledMatrixFunction};
use crate::factorize::{spectral_factor, FactorSummary, WilsonConfig};
use crate::matrix::{self, dense, log_plus};
use crate::orlicz::{
    luxemburg_norm_of_samples, orlicz_norm_upper_of_samples, rho_and_pi_of_samples, OrliczPair,
    PairSpec,
};

/// Relative slack allowed before `lhs > rhs` counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-6;

/// The four matrices of a pair at one node.
#[derive(Clone, Debug)]
pub struct PairNode {
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub f_plus: Vec<Complex64>,
    pub g_plus: Vec<Complex64>,
}

impl PairNode {
    pub fn zeros(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n * n];
        Self {
            f: z.clone(),
            g: z.clone(),
            f_plus: z.clone(),
            g_plus: z,
        }
    }
}

/// Free-form description of where a pair came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub label: String,
    pub parameters: BTreeMap<String, f64>,
    pub factors: Vec<FactorSummary>,
}

/// Densities `F`, `G` and their normalized factors, sampled on a grid.
pub trait PairSource {
    fn grid(&self) -> &CircleGrid;
    fn dim(&self) -> usize;
    /// Writes the four matrices at node `j`.
    fn fill(&self, j: usize, node: &mut PairNode);
    fn info(&self) -> SourceInfo {
        SourceInfo::default()
    }
}

/// A pair held in memory, with factors either supplied or computed.
#[derive(Clone, Debug)]
pub struct SampledPair {
    pub f: SampledMatrixFunction,
    pub g: SampledMatrixFunction,
    pub f_plus: SampledMatrixFunction,
    pub g_plus: SampledMatrixFunction,
    pub info: SourceInfo,
}

impl SampledPair {
    /// Factorizes both densities.
    pub fn factorize(
        f: SampledMatrixFunction,
        g: SampledMatrixFunction,
        config: &WilsonConfig,
    ) -> Result<Self, BoundsError> {
        f.check_compatible(&g)?;
        let fp = spectral_factor(&f, config)?;
        let gp = spectral_factor(&g, config)?;
        let info = SourceInfo {
            label: "factorized".into(),
            parameters: BTreeMap::new(),
            factors: vec![fp.summary(), gp.summary()],
        };
        Ok(Self {
            f,
            g,
            f_plus: fp.plus,
            g_plus: gp.plus,
            info,
        })
    }

    pub fn from_parts(
        f: SampledMatrixFunction,
        g: SampledMatrixFunction,
        f_plus: SampledMatrixFunction,
        g_plus: SampledMatrixFunction,
        info: SourceInfo,
    ) -> Result<Self, BoundsError> {
        f.check_compatible(&g)?;
        f.check_compatible(&f_plus)?;
        f.check_compatible(&g_plus)?;
        Ok(Self {
            f,
            g,
            f_plus,
            g_plus,
            info,
        })
    }
}

impl PairSource for SampledPair {
    fn grid(&self) -> &CircleGrid {
        self.f.grid()
    }

    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn fill(&self, j: usize, node: &mut PairNode) {
        node.f.copy_from_slice(self.f.node(j));
        node.g.copy_from_slice(self.g.node(j));
        node.f_plus.copy_from_slice(self.f_plus.node(j));
        node.g_plus.copy_from_slice(self.g_plus.node(j));
    }

    fn info(&self) -> SourceInfo {
        self.info.clone()
    }
}

/// Which estimate to check and with which parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub theorem: TheoremKind,
    pub p0: f64,
    pub p1: f64,
    pub alpha: f64,
    /// Defaults to the power pair with exponent `p0`.
    pub pair0: Option<PairSpec>,
    /// Defaults to the power pair `p1` for thm3.1 and the exponential pair for
    /// thm3.2.
    pub pair1: Option<PairSpec>,
    /// Defaults to `τ^α` for thm3.1 and `τ^{1/(p₁+1)}` for thm3.2.
    pub nu: Option<Nu>,
    /// Recompute on the doubled grid even without a violation.
    pub always_double: bool,
    /// Largest grid the doubling check may use.
    pub max_grid: usize,
    /// Relative slack before `lhs > rhs` is flagged.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    VIOLATION_TOLERANCE
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            theorem: TheoremKind::Thm13,
            p0: 2.0,
            p1: 2.0,
            alpha: 0.5,
            pair0: None,
            pair1: None,
            nu: None,
            always_double: false,
            max_grid: 1 << 24,
            tolerance: VIOLATION_TOLERANCE,
        }
    }
}

impl VerifyOptions {
    pub fn for_theorem(theorem: TheoremKind) -> Self {
        Self {
            theorem,
            ..Self::default()
        }
    }

    pub fn orlicz_setup(&self) -> Result<OrliczSetup, BoundsError> {
        let pair0 = match &self.pair0 {
            Some(spec) => OrliczPair::from_spec(spec)?,
            None => OrliczPair::power(self.p0)?,
        };
        let pair1 = match (&self.pair1, self.theorem) {
            (Some(spec), _) => OrliczPair::from_spec(spec)?,
            (None, TheoremKind::Thm32) => OrliczPair::exp(self.p1)?,
            (None, _) => OrliczPair::power(self.p1)?,
        };
        let nu = self.nu.clone().unwrap_or(match self.theorem {
            TheoremKind::Thm32 => Nu::Root { p1: self.p1 },
            _ => Nu::Power { alpha: self.alpha },
        });
        Ok(OrliczSetup {
            pair0,
            pair1: Some(pair1),
            nu,
        })
    }
}

/// Per-node extremes that are not part of the estimates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeDiagnostics {
    pub min_eigenvalue_f: f64,
    pub min_eigenvalue_g: f64,
    pub max_norm_g: f64,
}

/// The result of one comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremKind,
    /// `‖F⁺ − G⁺‖²_{H₂}`.
    #[serde(with = "extended_float")]
    pub lhs: f64,
    #[serde(with = "extended_float")]
    pub rhs: f64,
    /// `lhs/rhs`, `0` when both vanish.
    #[serde(with = "extended_float")]
    pub ratio: f64,
    pub parts: Option<RhsParts>,
    pub statistics: PairStatistics,
    pub grid_size: usize,
    pub preconditions_hold: bool,
    pub precondition: Option<String>,
    pub violation: bool,
    pub doubling: Option<DoublingCheck>,
    pub nodes: NodeDiagnostics,
    pub source: SourceInfo,
}

/// The same comparison on the doubled grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoublingCheck {
    pub grid_size: usize,
    #[serde(with = "extended_float")]
    pub lhs: f64,
    #[serde(with = "extended_float")]
    pub rhs: f64,
    pub violation: bool,
    /// `|lhs₂ₙ − lhsₙ|/max(lhsₙ, tiny)`.
    pub lhs_change: f64,
    pub rhs_change: f64,
}

/// `±∞` and NaN are written as strings so reports stay valid JSON.
mod extended_float {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// Everything a single pass over the nodes produces.
#[derive(Clone, Debug)]
pub struct PairMeasurements {
    pub lhs: f64,
    pub d1: f64,
    pub dlogdet: f64,
    pub dlogplus: f64,
    pub norms_f: Vec<f64>,
    /// `|ℓ_F|` per node.
    pub abs_ell: Vec<f64>,
    pub nodes: NodeDiagnostics,
}

pub fn measure<S: PairSource + ?Sized>(source: &S) -> Result<PairMeasurements, BoundsError> {
    let n = source.dim();
    let size = source.grid().size();
    let mut node = PairNode::zeros(n);
    let mut diff = vec![Complex64::new(0.0, 0.0); n * n];
    let (mut lhs, mut d1, mut dlogdet, mut dlogplus) = (0.0, 0.0, 0.0, 0.0);
    let mut norms_f = Vec::with_capacity(size);
    let mut abs_ell = Vec::with_capacity(size);
    let mut nodes = NodeDiagnostics {
        min_eigenvalue_f: f64::INFINITY,
        min_eigenvalue_g: f64::INFINITY,
        max_norm_g: 0.0,
    };
    for j in 0..size {
        source.fill(j, &mut node);
        let (log_det_f, norm_f) = matrix::node_log_det_and_norm(&node.f, n).map_err(|e| e.at(j))?;
        let (log_det_g, norm_g) = matrix::node_log_det_and_norm(&node.g, n).map_err(|e| e.at(j))?;
        for ((d, a), b) in diff.iter_mut().zip(&node.g).zip(&node.f) {
            *d = a - b;
        }
        d1 += dense::operator_norm(&diff, n);
        for ((d, a), b) in diff.iter_mut().zip(&node.f_plus).zip(&node.g_plus) {
            *d = a - b;
        }
        lhs += dense::operator_norm(&diff, n).powi(2);
        dlogdet += (log_det_g - log_det_f).abs();
        dlogplus += (log_plus(norm_g) - log_plus(norm_f)).abs();
        abs_ell.push((log_det_f - n as f64 * log_plus(norm_f)).min(0.0).abs());
        norms_f.push(norm_f);
        nodes.min_eigenvalue_f = nodes
            .min_eigenvalue_f
            .min(dense::hermitian_eigenvalues(&dense::symmetrize(&node.f, n), n)[0]);
        nodes.min_eigenvalue_g = nodes
            .min_eigenvalue_g
            .min(dense::hermitian_eigenvalues(&dense::symmetrize(&node.g, n), n)[0]);
        nodes.max_norm_g = nodes.max_norm_g.max(norm_g);
    }
    let m = size as f64;
    Ok(PairMeasurements {
        lhs: lhs / m,
        d1: d1 / m,
        dlogdet: dlogdet / m,
        dlogplus: dlogplus / m,
        norms_f,
        abs_ell,
        nodes,
    })
}

/// Fills in the statistics the evaluators might ask for. The Luxemburg
/// quantities of `ℓ_F` are only computed for the Orlicz estimates.
pub fn statistics(
    n: usize,
    m: &PairMeasurements,
    options: &VerifyOptions,
    setup: &OrliczSetup,
) -> Result<PairStatistics, BoundsError> {
    let (p0, p1) = (options.p0, options.p1);
    let q: Vec<f64> = m.abs_ell.iter().map(|l| l.exp()).collect();
    let pair1 = setup.pair1.as_ref().expect("setup always carries pair1");
    let (ell_lux1, rho1, pi1) = if options.theorem.is_orlicz() {
        let signed_ell: Vec<f64> = m.abs_ell.iter().map(|l| -l).collect();
        let (rho1, pi1) = rho_and_pi_of_samples(&signed_ell, &pair1.psi)?;
        (
            Some(luxemburg_norm_of_samples(&m.abs_ell, &pair1.psi)),
            Some(rho1),
            Some(pi1),
        )
    } else {
        (None, None, None)
    };
    Ok(PairStatistics {
        n,
        d1: m.d1,
        dlogdet: m.dlogdet,
        dlogplus: m.dlogplus,
        p0: Some(p0),
        p1: Some(p1),
        alpha: Some(options.alpha),
        fp0: lp_norm_of_samples(&m.norms_f, p0).ok(),
        finf: lp_norm_of_samples(&m.norms_f, f64::INFINITY).ok(),
        ellp1: lp_norm_of_samples(&m.abs_ell, p1).ok(),
        ellinf: lp_norm_of_samples(&m.abs_ell, f64::INFINITY).ok(),
        qfp1: lp_norm_of_samples(&q, p1).ok(),
        f_psi0: Some(orlicz_norm_upper_of_samples(&m.norms_f, &setup.pair0.psi)),
        ell_lux1,
        rho1,
        pi1,
    })
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Evaluates one estimate for already computed statistics.
pub fn report_from_statistics(
    options: &VerifyOptions,
    lhs: f64,
    statistics: PairStatistics,
    grid_size: usize,
    nodes: NodeDiagnostics,
    source: SourceInfo,
) -> Result<BoundReport, BoundsError> {
    let setup = options.orlicz_setup()?;
    let (parts, precondition) = match evaluate(options.theorem, &statistics, Some(&setup)) {
        Ok(parts) => (Some(parts), None),
        Err(BoundsError::Precondition { condition, .. }) => (None, Some(condition)),
        Err(BoundsError::InvalidNu(message)) => (None, Some(format!("invalid ν: {message}"))),
        Err(e) => return Err(e),
    };
    let rhs = parts.map_or(f64::NAN, |p| p.total());
    let violation = parts.is_some() && lhs > rhs * (1.0 + options.tolerance);
    Ok(BoundReport {
        theorem: options.theorem,
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
        parts,
        statistics,
        grid_size,
        preconditions_hold: precondition.is_none(),
        precondition,
        violation,
        doubling: None,
        nodes,
        source,
    })
}

/// Evaluates several estimates from a single pass over the nodes.
pub fn verify_pair_many<S: PairSource + ?Sized>(
    source: &S,
    options: &[VerifyOptions],
) -> Result<Vec<BoundReport>, BoundsError> {
    let m = measure(source)?;
    let info = source.info();
    options
        .iter()
        .map(|o| {
            let stats = statistics(source.dim(), &m, o, &o.orlicz_setup()?)?;
            report_from_statistics(
                o,
                m.lhs,
                stats,
                source.grid().size(),
                m.nodes.clone(),
                info.clone(),
            )
        })
        .collect()
}

/// One comparison on the source's grid, without doubling.
pub fn verify_pair<S: PairSource + ?Sized>(
    source: &S,
    options: &VerifyOptions,
) -> Result<BoundReport, BoundsError> {
    Ok(verify_pair_many(source, std::slice::from_ref(options))?.remove(0))
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs().max(f64::MIN_POSITIVE)
    }
}

/// Attaches the doubled-grid result; a violation survives only if it
/// reappears there.
pub fn attach_doubling(report: &mut BoundReport, fine: &BoundReport) {
    report.doubling = Some(DoublingCheck {
        grid_size: fine.grid_size,
        lhs: fine.lhs,
        rhs: fine.rhs,
        violation: fine.violation,
        lhs_change: relative_change(report.lhs, fine.lhs),
        rhs_change: relative_change(report.rhs, fine.rhs),
    });
    report.violation = report.violation && fine.violation;
}

/// Like [`verify_with_doubling`] for several estimates, sharing each pass
/// over the nodes. The doubled grid is visited if any estimate asks for it.
pub fn verify_many_with_doubling<S, M>(
    make: M,
    grid_size: usize,
    options: &[VerifyOptions],
) -> Result<Vec<BoundReport>, BoundsError>
where
    S: PairSource,
    M: Fn(usize) -> Result<S, BoundsError>,
{
    let mut reports = {
        let source = make(grid_size)?;
        verify_pair_many(&source, options)?
    };
    let max_grid = options.iter().map(|o| o.max_grid).min().unwrap_or(0);
    let wanted = reports
        .iter()
        .zip(options)
        .any(|(r, o)| r.violation || o.always_double);
    if wanted && 2 * grid_size <= max_grid {
        let fine = verify_pair_many(&make(2 * grid_size)?, options)?;
        for (report, fine) in reports.iter_mut().zip(&fine) {
            attach_doubling(report, fine);
        }
    }
    Ok(reports)
}

/// Verifies on an `N`-point grid and, on a violation (or when requested),
/// repeats on `2N`. A violation is only reported if it survives doubling.
pub fn verify_with_doubling<S, M>(
    make: M,
    grid_size: usize,
    options: &VerifyOptions,
) -> Result<BoundReport, BoundsError>
where
    S: PairSource,
    M: Fn(usize) -> Result<S, BoundsError>,
{
    Ok(verify_many_with_doubling(make, grid_size, std::slice::from_ref(options))?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_density(grid: &CircleGrid, shift: f64) -> SampledMatrixFunction {
        SampledMatrixFunction::from_fn(grid, 2, |t, m| {
            let z = Complex64::from_polar(1.0, t);
            let a = [c(1.0) + z * 0.3, z * 0.2, c(shift) * z, c(1.5) - z * 0.4];
            let mut out = [c(0.0); 4];
            dense::mul_adjoint(&a, &a, 2, &mut out);
            for (k, v) in out.iter().enumerate() {
                m[k] = v + if k % 3 == 0 { c(0.2) } else { c(0.0) };
            }
        })
    }

    #[test]
    fn identical_pair_has_zero_ratio() {
        let grid = CircleGrid::new(128).unwrap();
        let f = random_density(&grid, 0.1);
        let pair = SampledPair::factorize(f.clone(), f, &WilsonConfig::default()).unwrap();
        for theorem in [TheoremKind::Thm13, TheoremKind::Thm15, TheoremKind::Thm31] {
            let report = verify_pair(&pair, &VerifyOptions::for_theorem(theorem)).unwrap();
            assert_eq!(report.lhs, 0.0);
            assert_eq!(report.rhs, 0.0);
            assert_eq!(report.ratio, 0.0);
            assert!(!report.violation);
        }
    }

    #[test]
    fn nearby_pair_satisfies_bounds() {
        let grid = CircleGrid::new(256).unwrap();
        let f = random_density(&grid, 0.1);
        let g = random_density(&grid, 0.105);
        let pair = SampledPair::factorize(f, g, &WilsonConfig::default()).unwrap();
        for theorem in TheoremKind::ALL.into_iter().filter(|k| !k.is_scalar()) {
            let report = verify_pair(&pair, &VerifyOptions::for_theorem(theorem)).unwrap();
            assert!(
                report.preconditions_hold,
                "{theorem}: {:?}",
                report.precondition
            );
            assert!(report.lhs > 0.0);
            assert!(
                !report.violation,
                "{theorem}: {} > {}",
                report.lhs, report.rhs
            );
        }
    }

    #[test]
    fn scalar_theorems_on_scalar_pair() {
        let grid = CircleGrid::new(256).unwrap();
        let density = |s: f64| {
            SampledMatrixFunction::from_fn(&grid, 1, move |t, m| m[0] = c(1.25 + s - t.cos()))
        };
        let pair =
            SampledPair::factorize(density(0.0), density(0.05), &WilsonConfig::default()).unwrap();
        for theorem in [TheoremKind::Thm12, TheoremKind::Thm22, TheoremKind::Thm23] {
            let report = verify_pair(&pair, &VerifyOptions::for_theorem(theorem)).unwrap();
            assert!(!report.violation && report.lhs > 0.0 && report.rhs.is_finite());
        }
    }

    #[test]
    fn doubling_is_attached_on_request() {
        let make = |size: usize| {
            let grid = CircleGrid::new(size).unwrap();
            SampledPair::factorize(
                random_density(&grid, 0.1),
                random_density(&grid, 0.101),
                &WilsonConfig::default(),
            )
        };
        let options = VerifyOptions {
            always_double: true,
            ..VerifyOptions::for_theorem(TheoremKind::Thm13)
        };
        let report = verify_with_doubling(make, 128, &options).unwrap();
        let doubling = report.doubling.unwrap();
        assert_eq!(doubling.grid_size, 256);
        // The factors are smooth, but the L_1 statistics integrate kinks of
        // pointwise norms and only converge algebraically.
        assert!(doubling.lhs_change < 1e-8, "{doubling:?}");
        assert!(doubling.rhs_change < 1e-4, "{doubling:?}");
    }

    #[test]
    fn precondition_failure_is_reported() {
        let grid = CircleGrid::new(64).unwrap();
        let f = SampledMatrixFunction::constant(&grid, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        let g = SampledMatrixFunction::constant(&grid, 2, &[c(3.0), c(0.0), c(0.0), c(1.0)]);
        let pair = SampledPair::factorize(f, g, &WilsonConfig::default()).unwrap();
        let report = verify_pair(&pair, &VerifyOptions::for_theorem(TheoremKind::Thm14)).unwrap();
        assert!(!report.preconditions_hold);
        assert!(!report.violation);
        let json = serde_json::to_string(&report).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert!(back.rhs.is_nan());
    }
}
