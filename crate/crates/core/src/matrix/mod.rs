//! Pointwise Hermitian functional calculus and the scalar fields derived from
//! a matrix density: `ℓ_F`, `Q_F`, `M_F` and `F₁ = F/M_F`.

pub mod dense;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::circle::{SampledMatrixFunction, SampledScalarFunction};

pub use dense::operator_norm;

/// Maximum entry of `|A - A*|`, relative to `max(1, max |A_ik|)`, accepted as
/// Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Eigenvalues below this multiple of `‖A‖` make `spd_log` fail.
pub const LOG_EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("node {index}: {source}")]
    AtNode {
        index: usize,
        #[source]
        source: Box<MatrixError>,
    },
    #[error("matrix is singular")]
    Singular,
}

impl MatrixError {
    pub fn at(self, index: usize) -> Self {
        MatrixError::AtNode {
            index,
            source: Box::new(self),
        }
    }
}

fn check_hermitian(a: &[Complex64], n: usize) -> Result<Vec<Complex64>, MatrixError> {
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = dense::hermitian_defect(a, n);
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(MatrixError::NotHermitian(defect));
    }
    Ok(dense::symmetrize(a, n))
}

/// `A = U·diag(λ)·U*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors; row-major `n×n`.
    pub eigenvectors: Vec<Complex64>,
    n: usize,
}

impl HermitianSpectrum {
    pub fn new(a: &[Complex64], n: usize) -> Result<Self, MatrixError> {
        let a = check_hermitian(a, n)?;
        let eig = dense::to_dmatrix(&a, n).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut u = DMatrix::<Complex64>::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            u.set_column(col, &eig.eigenvectors.column(i));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors: dense::from_dmatrix(&u),
            n,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `U·diag(f(λ))·U*`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            for i in 0..n {
                let ui = self.eigenvectors[i * n + k] * fl;
                for j in 0..n {
                    out[i * n + j] += ui * self.eigenvectors[j * n + k].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Vec<Complex64> {
        self.apply(|x| x)
    }
}

/// `A∨η = U·diag(max(λ_i, η))·U*`.
pub fn matrix_vee(a: &[Complex64], n: usize, eta: f64) -> Result<Vec<Complex64>, MatrixError> {
    Ok(HermitianSpectrum::new(a, n)?.apply(|x| x.max(eta)))
}

pub fn spd_log(a: &[Complex64], n: usize) -> Result<Vec<Complex64>, MatrixError> {
    let spectrum = HermitianSpectrum::new(a, n)?;
    let top = spectrum
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let bottom = spectrum.eigenvalues[0];
    if !(bottom > LOG_EIGENVALUE_FLOOR * top) {
        return Err(MatrixError::NotPositiveDefinite(bottom));
    }
    Ok(spectrum.apply(f64::ln))
}

pub fn spd_exp(a: &[Complex64], n: usize) -> Result<Vec<Complex64>, MatrixError> {
    Ok(HermitianSpectrum::new(a, n)?.apply(f64::exp))
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn spd_sqrt(a: &[Complex64], n: usize) -> Result<Vec<Complex64>, MatrixError> {
    let spectrum = HermitianSpectrum::new(a, n)?;
    let top = spectrum
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if spectrum.eigenvalues[0] < -1e-12 * top {
        return Err(MatrixError::NotPositiveDefinite(spectrum.eigenvalues[0]));
    }
    Ok(spectrum.apply(|x| x.max(0.0).sqrt()))
}

/// Polar decomposition `a = P·U` with `P` Hermitian positive definite.
pub fn polar(a: &[Complex64], n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>), MatrixError> {
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    dense::mul_adjoint(a, a, n, &mut gram);
    let p = spd_sqrt(&gram, n)?;
    let p_inv = dense::inverse(&p, n).ok_or(MatrixError::Singular)?;
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    dense::mul(&p_inv, a, n, &mut u);
    Ok((p, u))
}

/// `log₊ x = max(0, log x)`.
pub fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Pointwise `(log det F, ‖F‖)` for a Hermitian positive definite node.
pub fn node_log_det_and_norm(a: &[Complex64], n: usize) -> Result<(f64, f64), MatrixError> {
    let a = check_hermitian(a, n)?;
    let log_det = dense::cholesky_log_det(&a, n)
        .ok_or_else(|| MatrixError::NotPositiveDefinite(dense::hermitian_eigenvalues(&a, n)[0]))?;
    let norm = *dense::hermitian_eigenvalues(&a, n).last().unwrap_or(&0.0);
    Ok((log_det, norm))
}

/// `ℓ = log det A − n·log₊‖A‖` for one node.
pub fn node_ell(a: &[Complex64], n: usize) -> Result<f64, MatrixError> {
    let (log_det, norm) = node_log_det_and_norm(a, n)?;
    Ok((log_det - n as f64 * log_plus(norm)).min(0.0))
}

/// `(ℓ_F, Q_F)` with `Q_F = e^{|ℓ_F|}`.
pub fn ell_and_q(
    f: &SampledMatrixFunction,
) -> Result<(SampledScalarFunction, SampledScalarFunction), MatrixError> {
    let n = f.dim();
    let mut ell = Vec::with_capacity(f.grid().size());
    for (j, m) in f.nodes().enumerate() {
        ell.push(node_ell(m, n).map_err(|e| e.at(j))?);
    }
    let q: Vec<f64> = ell.iter().map(|l| (-l).exp()).collect();
    let grid = f.grid();
    Ok((
        SampledScalarFunction::from_real(grid, ell).expect("length matches grid"),
        SampledScalarFunction::from_real(grid, q).expect("length matches grid"),
    ))
}

/// Pointwise `log det F`, through Cholesky.
pub fn log_det_field(f: &SampledMatrixFunction) -> Result<Vec<f64>, MatrixError> {
    let n = f.dim();
    f.nodes()
        .enumerate()
        .map(|(j, m)| {
            node_log_det_and_norm(m, n)
                .map(|x| x.0)
                .map_err(|e| e.at(j))
        })
        .collect()
}

/// `M_F = max(1, ‖F‖)` and `F₁ = F/M_F`.
pub fn normalize_unit_ball(
    f: &SampledMatrixFunction,
) -> Result<(SampledScalarFunction, SampledMatrixFunction), MatrixError> {
    let n = f.dim();
    let mut scale = Vec::with_capacity(f.grid().size());
    let mut f1 = f.clone();
    for (j, (m, out)) in f.nodes().zip(f1.nodes_mut()).enumerate() {
        let h = check_hermitian(m, n).map_err(|e| e.at(j))?;
        let top = dense::hermitian_eigenvalues(&h, n)
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let s = top.max(1.0);
        for (o, v) in out.iter_mut().zip(&h) {
            *o = v / s;
        }
        scale.push(s);
    }
    Ok((
        SampledScalarFunction::from_real(f.grid(), scale).expect("length matches grid"),
        f1,
    ))
}
