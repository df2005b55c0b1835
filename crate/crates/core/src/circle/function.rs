use num_complex::Complex64;

use super::{CircleError, CircleGrid};
use crate::matrix::dense;

/// Complex boundary values of a function on the circle.
#[derive(Clone, Debug)]
pub struct SampledScalarFunction {
    grid: CircleGrid,
    values: Vec<Complex64>,
}

impl SampledScalarFunction {
    pub fn new(grid: CircleGrid, values: Vec<Complex64>) -> Result<Self, CircleError> {
        if values.len() != grid.size() {
            return Err(CircleError::LengthMismatch {
                expected: grid.size(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &CircleGrid, f: F) -> Self {
        let values = grid.nodes().map(f).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: &CircleGrid, f: F) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn from_real(grid: &CircleGrid, values: Vec<f64>) -> Result<Self, CircleError> {
        Self::new(
            grid.clone(),
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn constant(grid: &CircleGrid, value: Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.size()],
        }
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest `|Im f|` relative to `max(1, max |f|)`.
    pub fn imaginary_defect(&self) -> f64 {
        let scale = self.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale
    }

    /// Rectangle rule for the normalized measure.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Fourier coefficients for `k = -N/2..N/2`, in that order.
    pub fn spectral_coefficients(&self) -> Vec<Complex64> {
        let n = self.grid.size();
        let mut buffer = self.values.clone();
        self.grid.dft(&mut buffer);
        let half = n / 2;
        let scale = 1.0 / n as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (index, &b) in buffer.iter().enumerate() {
            let k = self.grid.frequency(index);
            out[(k + half as i64) as usize] = b * self.grid.coefficient_phase(k) * scale;
        }
        out
    }

    /// Inverse of [`spectral_coefficients`](Self::spectral_coefficients).
    pub fn from_coefficients(
        grid: &CircleGrid,
        coefficients: &[Complex64],
    ) -> Result<Self, CircleError> {
        let n = grid.size();
        if coefficients.len() != n {
            return Err(CircleError::LengthMismatch {
                expected: n,
                found: coefficients.len(),
            });
        }
        let half = (n / 2) as i64;
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        for (offset, &c) in coefficients.iter().enumerate() {
            let k = offset as i64 - half;
            buffer[k.rem_euclid(n as i64) as usize] = c * grid.coefficient_phase(k).conj();
        }
        grid.idft(&mut buffer);
        Ok(Self {
            grid: grid.clone(),
            values: buffer,
        })
    }

    /// Harmonic conjugate: multiplier `-i·sign(k)`, zero mean and zero Nyquist
    /// bin. The input must be real.
    pub fn conjugate(&self) -> Result<Self, CircleError> {
        self.ensure_real(1e-10)?;
        let real: Vec<Complex64> = self
            .values
            .iter()
            .map(|z| Complex64::new(z.re, 0.0))
            .collect();
        let half = (self.grid.size() / 2) as i64;
        let values = self.grid.apply_multiplier(&real, |k| {
            if k > 0 {
                Complex64::new(0.0, -1.0)
            } else if k < 0 && k != -half {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn ensure_real(&self, tolerance: f64) -> Result<(), CircleError> {
        let scale = self.values.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
        for (index, z) in self.values.iter().enumerate() {
            if z.im.abs() > tolerance * scale {
                return Err(CircleError::NotReal {
                    index,
                    imaginary: z.im,
                });
            }
        }
        Ok(())
    }

    /// `‖f‖_{L_p}` of the modulus; `p = ∞` gives the maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64, CircleError> {
        lp_norm_of_samples(&self.moduli(), p)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64, CircleError> {
        self.check_same_grid(other)?;
        let total: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .sum();
        Ok(total / self.values.len() as f64)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<(), CircleError> {
        if self.grid != other.grid {
            return Err(CircleError::GridMismatch {
                left: self.grid.size(),
                right: other.grid.size(),
            });
        }
        Ok(())
    }
}

/// Normalized `L_p` mean of nonnegative samples, scaled by the maximum so large
/// exponents do not overflow.
pub fn lp_norm_of_samples(samples: &[f64], p: f64) -> Result<f64, CircleError> {
    if !(p >= 1.0) {
        return Err(CircleError::InvalidExponent(p));
    }
    let max = samples.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 || !max.is_finite() {
        return Ok(max);
    }
    let sum: f64 = samples.iter().map(|&x| (x / max).powf(p)).sum();
    Ok(max * (sum / samples.len() as f64).powf(1.0 / p))
}

/// An `n×n` complex matrix per grid node, stored node-major and row-major
/// within a node.
#[derive(Clone, Debug)]
pub struct SampledMatrixFunction {
    grid: CircleGrid,
    dim: usize,
    data: Vec<Complex64>,
}

/// Pointwise structure of a matrix function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeFlags {
    pub hermitian: bool,
    pub positive_definite: bool,
}

impl SampledMatrixFunction {
    pub fn new(grid: CircleGrid, dim: usize, data: Vec<Complex64>) -> Result<Self, CircleError> {
        if dim == 0 {
            return Err(CircleError::DimensionMismatch { left: 0, right: 1 });
        }
        let expected = grid.size() * dim * dim;
        if data.len() != expected {
            return Err(CircleError::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { grid, dim, data })
    }

    pub fn from_fn<F>(grid: &CircleGrid, dim: usize, f: F) -> Self
    where
        F: Fn(f64, &mut [Complex64]),
    {
        let block = dim * dim;
        let mut data = vec![Complex64::new(0.0, 0.0); grid.size() * block];
        for (j, chunk) in data.chunks_mut(block).enumerate() {
            f(grid.node(j), chunk);
        }
        Self {
            grid: grid.clone(),
            dim,
            data,
        }
    }

    /// The same matrix at every node.
    pub fn constant(grid: &CircleGrid, dim: usize, matrix: &[Complex64]) -> Self {
        assert_eq!(matrix.len(), dim * dim);
        Self::from_fn(grid, dim, |_, out| out.copy_from_slice(matrix))
    }

    pub fn from_scalar(f: &SampledScalarFunction) -> Self {
        Self {
            grid: f.grid().clone(),
            dim: 1,
            data: f.values().to_vec(),
        }
    }

    pub fn diagonal(entries: &[&SampledScalarFunction]) -> Result<Self, CircleError> {
        let dim = entries.len();
        let grid = entries
            .first()
            .ok_or(CircleError::DimensionMismatch { left: 0, right: 1 })?
            .grid()
            .clone();
        for e in entries {
            if *e.grid() != grid {
                return Err(CircleError::GridMismatch {
                    left: grid.size(),
                    right: e.grid().size(),
                });
            }
        }
        let block = dim * dim;
        let mut data = vec![Complex64::new(0.0, 0.0); grid.size() * block];
        for (j, chunk) in data.chunks_mut(block).enumerate() {
            for (i, e) in entries.iter().enumerate() {
                chunk[i * dim + i] = e.values()[j];
            }
        }
        Ok(Self { grid, dim, data })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn node(&self, j: usize) -> &[Complex64] {
        let block = self.dim * self.dim;
        &self.data[j * block..(j + 1) * block]
    }

    pub fn node_mut(&mut self, j: usize) -> &mut [Complex64] {
        let block = self.dim * self.dim;
        &mut self.data[j * block..(j + 1) * block]
    }

    pub fn nodes(&self) -> std::slice::Chunks<'_, Complex64> {
        self.data.chunks(self.dim * self.dim)
    }

    pub fn nodes_mut(&mut self) -> std::slice::ChunksMut<'_, Complex64> {
        let block = self.dim * self.dim;
        self.data.chunks_mut(block)
    }

    /// Entry `(row, col)` as a scalar function.
    pub fn entry(&self, row: usize, col: usize) -> SampledScalarFunction {
        let n = self.dim;
        let values = self.nodes().map(|m| m[row * n + col]).collect();
        SampledScalarFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn set_entry(&mut self, row: usize, col: usize, f: &SampledScalarFunction) {
        let n = self.dim;
        for (m, &v) in self.nodes_mut().zip(f.values()) {
            m[row * n + col] = v;
        }
    }

    /// Mean over the circle, i.e. the zeroth Fourier coefficient.
    pub fn mean(&self) -> Vec<Complex64> {
        let block = self.dim * self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); block];
        for m in self.nodes() {
            for (a, v) in acc.iter_mut().zip(m) {
                *a += v;
            }
        }
        let scale = 1.0 / self.grid.size() as f64;
        acc.iter_mut().for_each(|a| *a *= scale);
        acc
    }

    pub fn operator_norms(&self) -> Vec<f64> {
        self.nodes()
            .map(|m| dense::operator_norm(m, self.dim))
            .collect()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<(), CircleError> {
        if self.grid != other.grid {
            return Err(CircleError::GridMismatch {
                left: self.grid.size(),
                right: other.grid.size(),
            });
        }
        if self.dim != other.dim {
            return Err(CircleError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CircleError> {
        self.check_compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            dim: self.dim,
            data,
        })
    }

    /// Pointwise product `A·B`.
    pub fn mul(&self, other: &Self) -> Result<Self, CircleError> {
        self.check_compatible(other)?;
        let n = self.dim;
        let mut out = self.clone();
        for ((o, a), b) in out.nodes_mut().zip(self.nodes()).zip(other.nodes()) {
            dense::mul(a, b, n, o);
        }
        Ok(out)
    }

    /// Pointwise `A·A*`.
    pub fn gram(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for (o, a) in out.nodes_mut().zip(self.nodes()) {
            dense::mul_adjoint(a, a, n, o);
        }
        out
    }

    /// Right-multiplies every node by a constant matrix.
    pub fn mul_right_constant(&self, matrix: &[Complex64]) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for (o, a) in out.nodes_mut().zip(self.nodes()) {
            dense::mul(a, matrix, n, o);
        }
        out
    }

    pub fn flags(&self) -> NodeFlags {
        let n = self.dim;
        let hermitian = self.nodes().all(|m| {
            let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
            dense::hermitian_defect(m, n) <= crate::matrix::HERMITIAN_TOLERANCE * scale
        });
        let positive_definite = hermitian
            && self
                .nodes()
                .all(|m| dense::cholesky_log_det(m, n).is_some());
        NodeFlags {
            hermitian,
            positive_definite,
        }
    }

    /// First node that is not Hermitian positive definite.
    pub fn first_non_positive_node(&self) -> Option<usize> {
        let n = self.dim;
        self.nodes().position(|m| {
            let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
            dense::hermitian_defect(m, n) > crate::matrix::HERMITIAN_TOLERANCE * scale
                || dense::cholesky_log_det(m, n).is_none()
        })
    }
}

/// `((1/N) Σ ‖F(ϑ_j)‖^p)^{1/p}` with the operator norm; `p = ∞` gives the max.
pub fn lp_norm(f: &SampledMatrixFunction, p: f64) -> Result<f64, CircleError> {
    lp_norm_of_samples(&f.operator_norms(), p)
}

/// `‖F - G‖_{L_1}`.
pub fn l1_distance(
    f: &SampledMatrixFunction,
    g: &SampledMatrixFunction,
) -> Result<f64, CircleError> {
    f.check_compatible(g)?;
    let n = f.dim();
    let mut diff = vec![Complex64::new(0.0, 0.0); n * n];
    let mut total = 0.0;
    for (a, b) in f.nodes().zip(g.nodes()) {
        for ((d, x), y) in diff.iter_mut().zip(a).zip(b) {
            *d = x - y;
        }
        total += dense::operator_norm(&diff, n);
    }
    Ok(total / f.grid().size() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::quadrature::adaptive_gauss_kronrod;
    use std::f64::consts::PI;

    fn grid(n: usize) -> CircleGrid {
        CircleGrid::new(n).unwrap()
    }

    fn coefficient(coeffs: &[Complex64], k: i64) -> Complex64 {
        coeffs[(k + coeffs.len() as i64 / 2) as usize]
    }

    #[test]
    fn coefficients_of_simple_functions() {
        let g = grid(64);
        let one = SampledScalarFunction::constant(&g, Complex64::new(1.0, 0.0));
        let c = one.spectral_coefficients();
        for k in -32..32 {
            let expected = if k == 0 { 1.0 } else { 0.0 };
            assert!((coefficient(&c, k) - expected).norm() < 1e-14);
        }
        let z = SampledScalarFunction::from_fn(&g, |t| Complex64::from_polar(1.0, t));
        let c = z.spectral_coefficients();
        assert!((coefficient(&c, 1) - 1.0).norm() < 1e-14);
        assert!(coefficient(&c, 0).norm() < 1e-14);
        let f = SampledScalarFunction::from_real_fn(&g, |t| 1.25 - t.cos());
        let c = f.spectral_coefficients();
        assert!((coefficient(&c, -1) + 0.5).norm() < 1e-14);
        assert!((coefficient(&c, 0) - 1.25).norm() < 1e-14);
        assert!((coefficient(&c, 1) + 0.5).norm() < 1e-14);
    }

    #[test]
    fn coefficient_roundtrip() {
        let g = grid(128);
        let f = SampledScalarFunction::from_fn(&g, |t| {
            Complex64::new((3.0 * t).sin().exp(), t.cos() * t)
        });
        let back =
            SampledScalarFunction::from_coefficients(&g, &f.spectral_coefficients()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn conjugates() {
        let g = grid(64);
        let c = SampledScalarFunction::constant(&g, Complex64::new(2.5, 0.0));
        assert!(c
            .conjugate()
            .unwrap()
            .values()
            .iter()
            .all(|z| z.norm() < 1e-15));
        let cos = SampledScalarFunction::from_real_fn(&g, f64::cos);
        let sin = cos.conjugate().unwrap();
        for (j, z) in sin.values().iter().enumerate() {
            assert!((z.re - g.node(j).sin()).abs() < 1e-14);
            assert!(z.im.abs() < 1e-14);
        }
        let complex = SampledScalarFunction::from_fn(&g, |t| Complex64::new(t.cos(), 0.5));
        assert!(matches!(
            complex.conjugate(),
            Err(CircleError::NotReal { .. })
        ));
    }

    #[test]
    fn means() {
        let g = grid(256);
        let three = SampledScalarFunction::constant(&g, Complex64::new(3.0, 0.0));
        assert!((three.mean() - 3.0).norm() < 1e-14);
        let z = SampledScalarFunction::from_fn(&g, |t| Complex64::from_polar(1.0, t));
        assert!(z.mean().norm() < 1e-15);
        // Oracle: adaptive quadrature of the same integrand.
        let oracle = adaptive_gauss_kronrod(|t| (1.25 - t.cos()).ln(), -PI, PI, 1e-15, 1e-15, 200);
        let log_f = SampledScalarFunction::from_real_fn(&g, |t| (1.25 - t.cos()).ln());
        assert!(oracle.value.abs() < 1e-13);
        assert!((log_f.mean().re - oracle.value / (2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn matrix_norms() {
        let g = grid(16);
        let id = SampledMatrixFunction::constant(&g, 2, &dense::identity(2));
        assert!((lp_norm(&id, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let d = [
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let f = SampledMatrixFunction::constant(&g, 2, &d);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 3.0).abs() < 1e-15);
        let mut d2 = d;
        d2[0] = Complex64::new(2.0, 0.0);
        d2[3] = Complex64::new(1.0, 0.0);
        let a = SampledMatrixFunction::constant(&g, 2, &dense::identity(2));
        let b = SampledMatrixFunction::constant(&g, 2, &d2);
        assert!((l1_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
        let other = SampledMatrixFunction::constant(&grid(32), 2, &d2);
        assert!(l1_distance(&a, &other).is_err());
        assert!(lp_norm(&a, 0.5).is_err());
    }
}
