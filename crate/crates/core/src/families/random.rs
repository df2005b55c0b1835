//! Random Hermitian positive definite matrices and trigonometric polynomial
//! densities, for property checks and the random-density estimates.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circle::{CircleGrid, SampledMatrixFunction};
use crate::matrix::dense;
use crate::Complex64;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    dense::from_dmatrix(&q)
}

/// `U·diag(λ)·U*` with `log λ` uniform on `[lo, hi]`.
pub fn random_hermitian_pd<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
) -> Vec<Complex64> {
    let u = random_unitary(rng, n);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi).exp()).collect();
    let mut scaled = u.clone();
    for i in 0..n {
        for k in 0..n {
            scaled[i * n + k] *= lambda[k];
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    dense::mul_adjoint(&scaled, &u, n, &mut out);
    dense::symmetrize(&out, n)
}

/// Matrix coefficients of `A(z) = Σ_{k≤degree} A_k z^k`, Gaussian entries
/// scaled by `1/√(degree+1)`.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    degree: usize,
) -> Vec<Vec<Complex64>> {
    let scale = 1.0 / ((degree + 1) as f64).sqrt();
    (0..=degree)
        .map(|_| (0..n * n).map(|_| complex_gaussian(rng) * scale).collect())
        .collect()
}

/// `A(e^{iϑ})A(e^{iϑ})* + shift·I` on the grid.
pub fn polynomial_density(
    grid: &CircleGrid,
    n: usize,
    coefficients: &[Vec<Complex64>],
    shift: f64,
) -> SampledMatrixFunction {
    SampledMatrixFunction::from_fn(grid, n, |t, out| {
        let mut value = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, a) in coefficients.iter().enumerate() {
            let z = Complex64::from_polar(1.0, k as f64 * t);
            for (v, c) in value.iter_mut().zip(a) {
                *v += c * z;
            }
        }
        dense::mul_adjoint(&value, &value, n, out);
        for i in 0..n {
            out[i * n + i] += shift;
        }
        let h = dense::symmetrize(out, n);
        out.copy_from_slice(&h);
    })
}

pub fn random_polynomial_density<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &CircleGrid,
    n: usize,
    degree: usize,
    shift: f64,
) -> SampledMatrixFunction {
    let coefficients = random_polynomial(rng, n, degree);
    polynomial_density(grid, n, &coefficients, shift)
}

/// `F + size·B(z)B(z)*` for a fresh random polynomial `B` of the same degree:
/// a density `G ⪰ F` whose distance from `F` scales with `size`.
pub fn perturbed_density<R: Rng + ?Sized>(
    rng: &mut R,
    f: &SampledMatrixFunction,
    degree: usize,
    size: f64,
) -> SampledMatrixFunction {
    let n = f.dim();
    let bump = random_polynomial_density(rng, f.grid(), n, degree, 0.0);
    let mut g = f.clone();
    for (out, b) in g.nodes_mut().zip(bump.nodes()) {
        for (o, v) in out.iter_mut().zip(b) {
            *o += v * size;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..5 {
            let u = random_unitary(&mut rng, n);
            let mut uu = vec![Complex64::new(0.0, 0.0); n * n];
            dense::mul_adjoint(&u, &u, n, &mut uu);
            for i in 0..n {
                for k in 0..n {
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((uu[i * n + k] - expected).norm() < 1e-12);
                }
            }
            let a = random_hermitian_pd(&mut rng, n, -2.0, 2.0);
            let eig = dense::hermitian_eigenvalues(&a, n);
            assert!(eig
                .iter()
                .all(|&x| x > (-2.0f64).exp() * 0.999 && x < 2f64.exp() * 1.001));
        }
    }

    #[test]
    fn density_is_bounded_below_by_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = CircleGrid::new(64).unwrap();
        let f = random_polynomial_density(&mut rng, &grid, 3, 4, 0.25);
        let g = perturbed_density(&mut rng, &f, 4, 0.1);
        for (a, b) in f.nodes().zip(g.nodes()) {
            assert!(dense::hermitian_eigenvalues(a, 3)[0] >= 0.25 - 1e-12);
            let diff: Vec<Complex64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            assert!(dense::hermitian_eigenvalues(&diff, 3)[0] >= -1e-12);
        }
    }
}
