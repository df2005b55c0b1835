//! The two 2×2 counterexample pairs built from four outer functions
//! `λ₀, …, λ₃` whose moduli jump on the arc `[ε, 2ε]`.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::bounds::{measure, PairNode, PairSource, SourceInfo};
use crate::circle::{lp_norm_of_samples, CircleGrid, SampledScalarFunction};
use crate::matrix::{self, dense};

/// Nodes required inside `[ε, 2ε]`.
pub const MIN_ARC_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    /// `|λ₀| = exp(−ϑ^{−1/p₁})` on the arc.
    Ex1,
    /// `|λ₀| = ϑ^{1/(2p₁)}` on the arc.
    Ex2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub kind: ExampleKind,
    pub p1: f64,
    pub eps: f64,
    /// `None` selects the default for the kind.
    pub delta: Option<f64>,
}

impl ExampleParams {
    pub fn new(kind: ExampleKind, p1: f64, eps: f64) -> Self {
        Self {
            kind,
            p1,
            eps,
            delta: None,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| match self.kind {
            ExampleKind::Ex1 => {
                self.eps * (-(2f64.powf(-1.0 / self.p1)) * self.eps.powf(-1.0 / self.p1)).exp()
                    / (4.0 * PI)
            }
            ExampleKind::Ex2 => self.eps.powf((2.0 * self.p1 + 1.0) / (2.0 * self.p1)),
        })
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: String| Err(FamilyError::InvalidParameter(m));
        if !(self.p1 > 1.0 && self.p1.is_finite()) {
            return bad(format!("p1 = {} must lie in (1, ∞)", self.p1));
        }
        if !(self.eps > 0.0 && 2.0 * self.eps < PI) {
            return bad(format!("eps = {} must satisfy [ε, 2ε] ⊂ (0, π)", self.eps));
        }
        let delta = self.delta();
        if !(delta > 0.0 && delta < 1.0) {
            return bad(format!("delta = {delta:e} must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `log|λ₀|` on the arc.
    fn log_arc_modulus(&self, t: f64) -> f64 {
        match self.kind {
            ExampleKind::Ex1 => -t.powf(-1.0 / self.p1),
            ExampleKind::Ex2 => t.ln() / (2.0 * self.p1),
        }
    }

    /// `log|λ_j(e^{iϑ})|`.
    pub fn log_modulus(&self, j: usize, t: f64) -> f64 {
        let on_arc = t >= self.eps && t <= 2.0 * self.eps;
        let delta = self.delta();
        match (j, on_arc) {
            (0, true) => self.log_arc_modulus(t),
            (0, false) => 0.0,
            (1, true) => 0.5 * LN_2 + self.log_arc_modulus(t),
            (1, false) => -0.5 * (-delta * delta).ln_1p(),
            (2 | 3, true) => -0.5 * LN_2,
            (2, false) => 0.5 * (-delta * delta).ln_1p(),
            (3, false) => delta.ln(),
            _ => panic!("λ index {j} out of range"),
        }
    }

    fn record(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("p1".to_string(), self.p1),
            ("eps".to_string(), self.eps),
            ("delta".to_string(), self.delta()),
        ])
    }
}

/// `2^⌈log₂(256π/ε)⌉`, which puts about 128 nodes in `[ε, 2ε]`.
pub fn auto_grid_size(eps: f64) -> usize {
    let log2 = (256.0 * PI / eps).log2().ceil() as u32;
    1usize << log2.clamp(4, usize::BITS - 2)
}

/// The grid size to use: the requested one if it resolves the arc, the
/// automatic choice when none is requested.
pub fn resolve_grid_size(eps: f64, requested: Option<usize>) -> Result<usize, FamilyError> {
    let size = requested.unwrap_or_else(|| auto_grid_size(eps));
    let grid = CircleGrid::new(size)?;
    let nodes = arc_node_count(&grid, eps);
    if nodes < MIN_ARC_NODES {
        return Err(FamilyError::GridTooCoarse {
            grid_size: size,
            nodes,
            required: MIN_ARC_NODES,
        });
    }
    Ok(size)
}

/// Nodes in `[ε, 2ε]`, counted without visiting the whole grid.
fn arc_node_count(grid: &CircleGrid, eps: f64) -> usize {
    let h = grid.step();
    // ϑ_j = −π + (j + ½)h ≥ ε  ⇔  j ≥ (ε + π)/h − ½.
    let first = ((eps + PI) / h - 0.5).ceil().max(0.0) as usize;
    let last = ((2.0 * eps + PI) / h - 0.5).floor() as usize;
    (first..=last.min(grid.size() - 1))
        .filter(|&j| {
            let t = grid.node(j);
            t >= eps && t <= 2.0 * eps
        })
        .count()
}

/// Which representative of `G⁺` the source hands out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `G⁺·U*` with `G⁺(0) = P·U`, so the value at the origin is positive
    /// definite.
    Canonical,
    /// The lower-triangular `[[λ₁, 0], [λ₃, λ₂]]`.
    Triangular,
}

/// Boundary values of `λ₀, …, λ₃` on a grid.
#[derive(Clone, Debug)]
pub struct ExamplePair {
    pub params: ExampleParams,
    grid: CircleGrid,
    lambda: [Vec<Complex64>; 4],
    /// `λ_j(0) = exp(mean log|λ_j|)`.
    pub lambda_at_zero: [f64; 4],
    /// `U*` from the polar decomposition of `G⁺(0)`.
    correction: [Complex64; 4],
    pub normalization: Normalization,
}

fn outer(grid: &CircleGrid, log: Vec<f64>) -> Result<(Vec<Complex64>, f64), FamilyError> {
    let log = SampledScalarFunction::from_real(grid, log)?;
    let conj = log.conjugate()?;
    let mean = log.mean().re;
    let values = log
        .values()
        .iter()
        .zip(conj.values())
        .map(|(u, v)| Complex64::from_polar(u.re.exp(), v.re))
        .collect();
    Ok((values, mean.exp()))
}

impl ExamplePair {
    pub fn new(params: ExampleParams, grid_size: Option<usize>) -> Result<Self, FamilyError> {
        params.validate()?;
        let size = resolve_grid_size(params.eps, grid_size)?;
        let grid = CircleGrid::new(size)?;
        let mut lambda: [Vec<Complex64>; 4] = Default::default();
        let mut at_zero = [0.0; 4];
        for j in 0..4 {
            let log = grid.nodes().map(|t| params.log_modulus(j, t)).collect();
            let (values, h0) = outer(&grid, log)?;
            lambda[j] = values;
            at_zero[j] = h0;
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        let g0 = [c(at_zero[1]), c(0.0), c(at_zero[3]), c(at_zero[2])];
        let (_, u) = matrix::polar(&g0, 2)?;
        let u_star = dense::adjoint(&u, 2);
        Ok(Self {
            params,
            grid,
            lambda,
            lambda_at_zero: at_zero,
            correction: [u_star[0], u_star[1], u_star[2], u_star[3]],
            normalization: Normalization::Canonical,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn lambda(&self, j: usize) -> &[Complex64] {
        &self.lambda[j]
    }

    /// `G⁺(0)` for the current normalization.
    pub fn g_plus_at_zero(&self) -> [Complex64; 4] {
        let c = |x: f64| Complex64::new(x, 0.0);
        let z = self.lambda_at_zero;
        let g0 = [c(z[1]), c(0.0), c(z[3]), c(z[2])];
        match self.normalization {
            Normalization::Triangular => g0,
            Normalization::Canonical => {
                let mut out = [Complex64::new(0.0, 0.0); 4];
                dense::mul(&g0, &self.correction, 2, &mut out);
                out
            }
        }
    }

    /// The lower-bound chain and the side facts stated for the example.
    pub fn lower_bound_report(&self) -> Result<ExampleLowerBound, FamilyError> {
        let triangular = TriangularView(self);
        let m = measure(&triangular)?;
        let p = &self.params;
        let (eps, p1, delta) = (p.eps, p.p1, p.delta());
        let size = self.grid.size() as f64;
        let lambda3_grid = self.lambda[3].iter().map(|z| z.norm_sqr()).sum::<f64>() / size;
        let arc = eps / (2.0 * PI);
        let lambda3_exact = 0.5 * arc + delta * delta * (1.0 - arc);
        let eps_over_4pi = eps / (4.0 * PI);
        let mut max_det_defect: f64 = 0.0;
        let mut max_unit_defect: f64 = 0.0;
        let mut max_eigenvalue_f: f64 = 0.0;
        let mut node = PairNode::zeros(2);
        for j in 0..self.grid.size() {
            triangular.fill(j, &mut node);
            let (ldf, norm_f) = matrix::node_log_det_and_norm(&node.f, 2)?;
            let (ldg, _) = matrix::node_log_det_and_norm(&node.g, 2)?;
            max_det_defect = max_det_defect.max((ldf - ldg).abs());
            max_unit_defect = max_unit_defect
                .max((self.lambda[2][j].norm_sqr() + self.lambda[3][j].norm_sqr() - 1.0).abs());
            max_eigenvalue_f = max_eigenvalue_f.max(norm_f);
        }
        let abs_log_d1 = m.d1.ln().abs();
        let ell_p1 = lp_norm_of_samples(&m.abs_ell, p1)?;
        let q: Vec<f64> = m.abs_ell.iter().map(|l| l.exp()).collect();
        let q_p1 = lp_norm_of_samples(&q, p1)?;
        let (log_bound, eps_bound, ell_expected, c_p1, q_bound) = match p.kind {
            ExampleKind::Ex1 => (
                Some(abs_log_d1.powf(-p1) / (8.0 * PI)),
                Some(abs_log_d1.powf(-p1) / 2.0),
                Some(2.0 * (LN_2 / (2.0 * PI)).powf(1.0 / p1)),
                None,
                None,
            ),
            ExampleKind::Ex2 => (
                None,
                None,
                None,
                Some(m.d1 / eps.powf((2.0 * p1 + 1.0) / (2.0 * p1))),
                Some((LN_2 / (2.0 * PI)).powf(1.0 / p1) + 1.0),
            ),
        };
        let chain_holds = m.lhs >= lambda3_grid && lambda3_exact >= eps_over_4pi;
        Ok(ExampleLowerBound {
            params: *p,
            delta,
            grid_size: self.grid.size(),
            arc_nodes: arc_node_count(&self.grid, eps),
            lhs: m.lhs,
            lambda3_h2_grid: lambda3_grid,
            lambda3_h2_exact: lambda3_exact,
            eps_over_4pi,
            d1: m.d1,
            chain_holds,
            log_bound,
            log_bound_holds: log_bound.map(|b| m.lhs >= b),
            eps_bound,
            eps_bound_holds: eps_bound.map(|b| eps >= b),
            ell_p1,
            ell_p1_expected: ell_expected,
            c_p1,
            q_p1,
            q_p1_bound: q_bound,
            q_p1_bound_holds: q_bound.map(|b| q_p1 <= b),
            max_det_defect,
            max_unit_defect,
            max_eigenvalue_f,
        })
    }
}

/// The pair with the lower-triangular `G⁺`, without copying the samples.
struct TriangularView<'a>(&'a ExamplePair);

impl PairSource for TriangularView<'_> {
    fn grid(&self) -> &CircleGrid {
        &self.0.grid
    }

    fn dim(&self) -> usize {
        2
    }

    fn fill(&self, j: usize, node: &mut PairNode) {
        self.0.fill_with(j, node, Normalization::Triangular);
    }
}

impl PairSource for ExamplePair {
    fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    fn dim(&self) -> usize {
        2
    }

    fn fill(&self, j: usize, node: &mut PairNode) {
        self.fill_with(j, node, self.normalization);
    }

    fn info(&self) -> SourceInfo {
        let label = match self.params.kind {
            ExampleKind::Ex1 => "ex1",
            ExampleKind::Ex2 => "ex2",
        };
        SourceInfo {
            label: label.into(),
            parameters: self.params.record(),
            factors: Vec::new(),
        }
    }
}

impl ExamplePair {
    fn fill_with(&self, j: usize, node: &mut PairNode, normalization: Normalization) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let [l0, l1, l2, l3] = [
            self.lambda[0][j],
            self.lambda[1][j],
            self.lambda[2][j],
            self.lambda[3][j],
        ];
        let triangular_g = [l1, zero, l3, l2];
        node.f_plus.copy_from_slice(&[l0, zero, zero, one]);
        // The densities come from the prescribed moduli rather than from
        // |λ_j|² of the samples: G − F is far below 1e−16 for small ε and
        // would otherwise drown in rounding. |λ₂|² + |λ₃|² = 1 identically.
        let t = self.grid.node(j);
        let square = |k: usize| Complex64::new((2.0 * self.params.log_modulus(k, t)).exp(), 0.0);
        node.f.copy_from_slice(&[square(0), zero, zero, one]);
        let cross = l3 * l1.conj();
        node.g
            .copy_from_slice(&[square(1), cross.conj(), cross, one]);
        match normalization {
            Normalization::Triangular => node.g_plus.copy_from_slice(&triangular_g),
            Normalization::Canonical => {
                dense::mul(&triangular_g, &self.correction, 2, &mut node.g_plus)
            }
        }
    }
}

/// Both sides of the lower-bound chain, plus the side facts of the example.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExampleLowerBound {
    pub params: ExampleParams,
    pub delta: f64,
    pub grid_size: usize,
    pub arc_nodes: usize,
    /// `‖G⁺ − F⁺‖²_{H₂}` for the lower-triangular representative.
    pub lhs: f64,
    pub lambda3_h2_grid: f64,
    /// `ε/4π + δ²(1 − ε/2π)` from the prescribed modulus.
    pub lambda3_h2_exact: f64,
    pub eps_over_4pi: f64,
    pub d1: f64,
    /// `lhs ≥ ‖λ₃‖² ≥ ε/4π`.
    pub chain_holds: bool,
    /// `|log‖G − F‖₁|^{−p₁}/8π` (ex1).
    pub log_bound: Option<f64>,
    pub log_bound_holds: Option<bool>,
    /// `|log‖G − F‖₁|^{−p₁}/2`, the intermediate bound on `ε` (ex1).
    pub eps_bound: Option<f64>,
    pub eps_bound_holds: Option<bool>,
    pub ell_p1: f64,
    /// `2(log 2/2π)^{1/p₁}` (ex1).
    pub ell_p1_expected: Option<f64>,
    /// `‖G − F‖₁/ε^{(2p₁+1)/(2p₁)}` (ex2).
    pub c_p1: Option<f64>,
    pub q_p1: f64,
    /// `(log 2/2π)^{1/p₁} + 1` (ex2).
    pub q_p1_bound: Option<f64>,
    pub q_p1_bound_holds: Option<bool>,
    /// `max |log det G − log det F|` over nodes.
    pub max_det_defect: f64,
    /// `max ||λ₂|² + |λ₃|² − 1|` over nodes.
    pub max_unit_defect: f64,
    /// `max ‖F‖` over nodes.
    pub max_eigenvalue_f: f64,
}
