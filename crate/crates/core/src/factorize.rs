//! Spectral factors: the explicit scalar formula, a Wilson-type Newton
//! iteration for matrices, and normalization at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{CircleError, SampledMatrixFunction, SampledScalarFunction};
use crate::matrix::{self, dense, MatrixError};

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("node {index} is not positive ({value:e})")]
    NonPositiveNode { index: usize, value: f64 },
    #[error("log of the density is not integrable on the grid")]
    LogNotIntegrable,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        residual: f64,
        iterations: usize,
        partial: Box<SpectralFactor>,
    },
    #[error("iterate became singular at node {0}")]
    SingularIterate(usize),
    #[error("value at the origin is singular")]
    SingularAtZero,
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// `exp(log|f| + i·conj(log|f|))`.
    Outer,
    Wilson,
    /// Assembled from explicitly known scalar outer functions.
    Explicit,
}

/// Boundary values of `F⁺` together with `F⁺(0)` and diagnostics.
#[derive(Clone, Debug)]
pub struct SpectralFactor {
    pub plus: SampledMatrixFunction,
    pub at_zero: Vec<Complex64>,
    /// `‖F − F⁺(F⁺)*‖_{L_1}`.
    pub residual: f64,
    pub iterations: usize,
    pub algorithm: Algorithm,
    pub truncation_degree: Option<usize>,
    /// Largest coefficient of the truncated residual when the iteration
    /// stopped (Wilson only).
    pub coefficient_residual: Option<f64>,
}

/// Serializable summary of a factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub at_zero: Vec<[f64; 2]>,
    pub residual: f64,
    pub iterations: usize,
    pub algorithm: Algorithm,
    pub truncation_degree: Option<usize>,
}

impl SpectralFactor {
    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    pub fn summary(&self) -> FactorSummary {
        FactorSummary {
            at_zero: self.at_zero.iter().map(|z| [z.re, z.im]).collect(),
            residual: self.residual,
            iterations: self.iterations,
            algorithm: self.algorithm,
            truncation_degree: self.truncation_degree,
        }
    }

    /// `log det F⁺(0)`, or `None` if `F⁺(0)` is not Hermitian positive
    /// definite.
    pub fn log_det_at_zero(&self) -> Option<f64> {
        let n = self.dim();
        if dense::hermitian_defect(&self.at_zero, n) > 1e-8 {
            return None;
        }
        dense::cholesky_log_det(&dense::symmetrize(&self.at_zero, n), n)
    }

    /// `|log det F⁺(0) − ½·mean(log det F)|`.
    pub fn det_identity_defect(&self, f: &SampledMatrixFunction) -> Result<f64, FactorError> {
        let log_det = matrix::log_det_field(f)?;
        let mean = log_det.iter().sum::<f64>() / log_det.len() as f64;
        Ok(self
            .log_det_at_zero()
            .map_or(f64::INFINITY, |v| (v - 0.5 * mean).abs()))
    }
}

/// Outer function with modulus `absf` and positive value at the origin.
/// Returns the boundary values and `h(0) = exp(mean log absf)`.
pub fn scalar_outer_from_modulus(
    absf: &SampledScalarFunction,
) -> Result<(SampledScalarFunction, f64), FactorError> {
    absf.ensure_real(1e-12)?;
    let mut log = Vec::with_capacity(absf.grid().size());
    for (index, z) in absf.values().iter().enumerate() {
        if !(z.re > 0.0) || !z.re.is_finite() {
            return Err(FactorError::NonPositiveNode { index, value: z.re });
        }
        log.push(z.re.ln());
    }
    let log = SampledScalarFunction::from_real(absf.grid(), log)?;
    let conj = log.conjugate()?;
    let mean = log.mean().re;
    if !mean.is_finite() {
        return Err(FactorError::LogNotIntegrable);
    }
    let values = log
        .values()
        .iter()
        .zip(conj.values())
        .map(|(u, v)| Complex64::from_polar(u.re.exp(), v.re))
        .collect();
    Ok((
        SampledScalarFunction::new(absf.grid().clone(), values)?,
        mean.exp(),
    ))
}

/// `f⁺` for a positive scalar density.
pub fn scalar_spectral_factor(f: &SampledScalarFunction) -> Result<SpectralFactor, FactorError> {
    f.ensure_real(1e-12)?;
    for (index, z) in f.values().iter().enumerate() {
        if !(z.re > 0.0) {
            return Err(FactorError::NonPositiveNode { index, value: z.re });
        }
    }
    let root = f.map(|z| Complex64::new(z.re.sqrt(), 0.0));
    let (plus, at_zero) = scalar_outer_from_modulus(&root)?;
    let residual = f
        .values()
        .iter()
        .zip(plus.values())
        .map(|(a, b)| (a.re - b.norm_sqr()).abs())
        .sum::<f64>()
        / f.grid().size() as f64;
    Ok(SpectralFactor {
        plus: SampledMatrixFunction::from_scalar(&plus),
        at_zero: vec![Complex64::new(at_zero, 0.0)],
        residual,
        iterations: 0,
        algorithm: Algorithm::Outer,
        truncation_degree: None,
        coefficient_residual: None,
    })
}

/// Settings of the matrix iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonConfig {
    /// Degree of the trigonometric truncation; `None` means `N/4`.
    pub truncation_degree: Option<usize>,
    pub max_iterations: usize,
    /// Absolute tolerance on the Fourier coefficients of `F_D − ψψ*`.
    pub tolerance: f64,
}

impl Default for WilsonConfig {
    fn default() -> Self {
        Self {
            truncation_degree: None,
            max_iterations: 200,
            tolerance: 1e-10,
        }
    }
}

/// Applies a Fourier multiplier to every entry of a matrix function.
fn entrywise_multiplier<M>(f: &SampledMatrixFunction, multiplier: M) -> SampledMatrixFunction
where
    M: Fn(i64) -> Complex64 + Copy,
{
    let n = f.dim();
    let mut out = f.clone();
    for i in 0..n {
        for k in 0..n {
            let entry: Vec<Complex64> = f.nodes().map(|m| m[i * n + k]).collect();
            let filtered = f.grid().apply_multiplier(&entry, multiplier);
            for (m, v) in out.nodes_mut().zip(filtered) {
                m[i * n + k] = v;
            }
        }
    }
    out
}

/// Largest Fourier coefficient over all entries.
fn max_coefficient(f: &SampledMatrixFunction) -> f64 {
    let n = f.dim();
    let grid = f.grid();
    let scale = 1.0 / grid.size() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let mut entry: Vec<Complex64> = f.nodes().map(|m| m[i * n + k]).collect();
            grid.dft(&mut entry);
            worst = entry.iter().fold(worst, |w, c| w.max(c.norm() * scale));
        }
    }
    worst
}

fn gram_residual(target: &SampledMatrixFunction, psi: &SampledMatrixFunction) -> f64 {
    let diff = target.sub(&psi.gram()).expect("same grid and dimension");
    max_coefficient(&diff)
}

/// Matrix spectral factor by Newton (Wilson) iteration on a degree-`D`
/// trigonometric truncation of `F`.
///
/// Each step solves `X + X* = ψ⁻¹Fψ⁻* + I` for causal `X` by keeping half of
/// the zeroth coefficient and all positive ones, then sets `ψ ← P_D(ψX)`.
/// Steps that do not reduce the coefficient residual are halved.
pub fn matrix_spectral_factor(
    f: &SampledMatrixFunction,
    config: &WilsonConfig,
) -> Result<SpectralFactor, FactorError> {
    let n = f.dim();
    let grid = f.grid().clone();
    if let Some(index) = f.first_non_positive_node() {
        let value = dense::hermitian_eigenvalues(&dense::symmetrize(f.node(index), n), n)[0];
        return Err(FactorError::NonPositiveNode { index, value });
    }
    let degree = config
        .truncation_degree
        .unwrap_or(grid.size() / 4)
        .min(grid.size() / 2 - 1) as i64;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let truncated = entrywise_multiplier(f, |k| if k.abs() <= degree { one } else { zero });

    let mean = truncated.mean();
    let start =
        dense::cholesky(&dense::symmetrize(&mean, n), n).ok_or(FactorError::NonPositiveNode {
            index: 0,
            value: f64::NAN,
        })?;
    let mut psi = SampledMatrixFunction::constant(&grid, n, &start);
    let mut residual = gram_residual(&truncated, &psi);
    let mut iterations = 0;
    let identity = dense::identity(n);
    let mut inv_adj = vec![zero; n * n];
    let mut tmp = vec![zero; n * n];

    while residual > config.tolerance && iterations < config.max_iterations {
        iterations += 1;
        let mut g = psi.clone();
        for (j, ((out, p), fm)) in g
            .nodes_mut()
            .zip(psi.nodes())
            .zip(truncated.nodes())
            .enumerate()
        {
            let inv = dense::inverse(p, n).ok_or(FactorError::SingularIterate(j))?;
            dense::mul(&inv, fm, n, &mut tmp);
            // tmp·inv* = ψ⁻¹Fψ⁻*.
            dense::mul_adjoint(&tmp, &inv, n, &mut inv_adj);
            for (o, (v, e)) in out.iter_mut().zip(inv_adj.iter().zip(&identity)) {
                *o = v + e;
            }
            let h = dense::symmetrize(out, n);
            out.copy_from_slice(&h);
        }
        let x = entrywise_multiplier(&g, |k| {
            if k == 0 {
                Complex64::new(0.5, 0.0)
            } else if k > 0 && k <= degree {
                one
            } else {
                zero
            }
        });
        let product = psi.mul(&x)?;
        let full =
            entrywise_multiplier(
                &product,
                |k| {
                    if (0..=degree).contains(&k) {
                        one
                    } else {
                        zero
                    }
                },
            );
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut candidate = psi.clone();
            for (c, (p, q)) in candidate.nodes_mut().zip(psi.nodes().zip(full.nodes())) {
                for (ci, (pi, qi)) in c.iter_mut().zip(p.iter().zip(q)) {
                    *ci = pi + (qi - pi) * t;
                }
            }
            let r = gram_residual(&truncated, &candidate);
            if r < residual {
                psi = candidate;
                residual = r;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let at_zero = psi.mean();
    let mut factor = SpectralFactor {
        residual: crate::circle::l1_distance(f, &psi.gram())?,
        plus: psi,
        at_zero,
        iterations,
        algorithm: Algorithm::Wilson,
        truncation_degree: Some(degree as usize),
        coefficient_residual: Some(residual),
    };
    factor = normalize_factor_at_zero(&factor)?;
    if residual > config.tolerance {
        return Err(FactorError::NotConverged {
            residual,
            iterations,
            partial: Box::new(factor),
        });
    }
    Ok(factor)
}

/// Right-multiplies the factor by `U*`, where `F⁺(0) = P·U` is the polar
/// decomposition, so the new value at the origin is `P`.
pub fn normalize_factor_at_zero(factor: &SpectralFactor) -> Result<SpectralFactor, FactorError> {
    let n = factor.dim();
    let (p, u) = matrix::polar(&factor.at_zero, n).map_err(|_| FactorError::SingularAtZero)?;
    let correction = dense::adjoint(&u, n);
    Ok(SpectralFactor {
        plus: factor.plus.mul_right_constant(&correction),
        at_zero: dense::symmetrize(&p, n),
        ..factor.clone()
    })
}

/// Builds a factor from boundary values and the value at the origin, then
/// normalizes it. `density` is used for the residual.
pub fn factor_from_parts(
    plus: SampledMatrixFunction,
    at_zero: Vec<Complex64>,
    density: &SampledMatrixFunction,
) -> Result<SpectralFactor, FactorError> {
    let residual = crate::circle::l1_distance(density, &plus.gram())?;
    normalize_factor_at_zero(&SpectralFactor {
        plus,
        at_zero,
        residual,
        iterations: 0,
        algorithm: Algorithm::Explicit,
        truncation_degree: None,
        coefficient_residual: None,
    })
}

/// `(mean ‖F⁺ − G⁺‖²)^{1/2}`.
pub fn h2_diff_norm(
    fp: &SampledMatrixFunction,
    gp: &SampledMatrixFunction,
) -> Result<f64, FactorError> {
    fp.check_compatible(gp)?;
    let n = fp.dim();
    let mut diff = vec![Complex64::new(0.0, 0.0); n * n];
    let mut total = 0.0;
    for (a, b) in fp.nodes().zip(gp.nodes()) {
        for (d, (x, y)) in diff.iter_mut().zip(a.iter().zip(b)) {
            *d = x - y;
        }
        total += dense::operator_norm(&diff, n).powi(2);
    }
    Ok((total / fp.grid().size() as f64).sqrt())
}

/// Convenience: the default grid-level factorizer for a density, choosing the
/// explicit formula for `n = 1`.
pub fn spectral_factor(
    f: &SampledMatrixFunction,
    config: &WilsonConfig,
) -> Result<SpectralFactor, FactorError> {
    if f.dim() == 1 {
        let scalar = f.entry(0, 0);
        return scalar_spectral_factor(&scalar);
    }
    matrix_spectral_factor(f, config)
}
