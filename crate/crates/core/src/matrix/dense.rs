//! Kernels for small dense complex matrices stored row-major in slices.
//!
//! Grid-level code calls these once per node, so the 1×1 and 2×2 cases take
//! closed-form paths and only larger sizes go through nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn identity(n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        out[i * n + i] = Complex64::new(1.0, 0.0);
    }
    out
}

pub fn to_dmatrix(a: &[Complex64], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, a)
}

pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            out.push(m[(i, k)]);
        }
    }
    out
}

/// `out = a·b`.
pub fn mul(a: &[Complex64], b: &[Complex64], n: usize, out: &mut [Complex64]) {
    for i in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += a[i * n + l] * b[l * n + k];
            }
            out[i * n + k] = acc;
        }
    }
}

/// `out = a·b*`.
pub fn mul_adjoint(a: &[Complex64], b: &[Complex64], n: usize, out: &mut [Complex64]) {
    for i in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += a[i * n + l] * b[k * n + l].conj();
            }
            out[i * n + k] = acc;
        }
    }
}

pub fn adjoint(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            out[k * n + i] = a[i * n + k].conj();
        }
    }
    out
}

/// Largest entry of `|a - a*|`.
pub fn hermitian_defect(a: &[Complex64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in i..n {
            worst = worst.max((a[i * n + k] - a[k * n + i].conj()).norm());
        }
    }
    worst
}

/// `(a + a*)/2`.
pub fn symmetrize(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = a.to_vec();
    for i in 0..n {
        out[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for k in (i + 1)..n {
            let v = (a[i * n + k] + a[k * n + i].conj()) * 0.5;
            out[i * n + k] = v;
            out[k * n + i] = v.conj();
        }
    }
    out
}

/// Ascending eigenvalues of a Hermitian matrix (only the upper triangle is read
/// in the closed-form paths).
pub fn hermitian_eigenvalues(a: &[Complex64], n: usize) -> Vec<f64> {
    match n {
        1 => vec![a[0].re],
        2 => {
            let (lo, hi) = hermitian_eigenvalues_2x2(a);
            vec![lo, hi]
        }
        _ => {
            let m = to_dmatrix(&symmetrize(a, n), n);
            let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            values.sort_by(|x, y| x.total_cmp(y));
            values
        }
    }
}

fn hermitian_eigenvalues_2x2(a: &[Complex64]) -> (f64, f64) {
    let p = a[0].re;
    let d = a[3].re;
    let b2 = a[1].norm_sqr();
    let mid = 0.5 * (p + d);
    let radius = (0.5 * (p - d)).hypot(a[1].norm());
    let det = p * d - b2;
    // The eigenvalue of smaller modulus comes from det/λ, which keeps relative
    // accuracy when the matrix is badly scaled but nonsingular.
    if mid >= 0.0 {
        let hi = mid + radius;
        let lo = if hi > 0.0 { det / hi } else { mid - radius };
        (lo.min(hi), hi)
    } else {
        let lo = mid - radius;
        let hi = det / lo;
        (lo, hi.max(lo))
    }
}

/// Largest singular value.
pub fn operator_norm(a: &[Complex64], n: usize) -> f64 {
    match n {
        1 => a[0].norm(),
        2 => {
            let s: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let det = (a[0] * a[3] - a[1] * a[2]).norm();
            let disc = ((s - 2.0 * det).max(0.0) * (s + 2.0 * det)).sqrt();
            (0.5 * (s + disc)).sqrt()
        }
        _ => {
            let m = to_dmatrix(a, n);
            m.singular_values().iter().copied().fold(0.0, f64::max)
        }
    }
}

/// `log det a` through a Cholesky factorization; `None` if `a` is not
/// Hermitian positive definite to working precision.
pub fn cholesky_log_det(a: &[Complex64], n: usize) -> Option<f64> {
    let l = cholesky(a, n)?;
    Some((0..n).map(|i| 2.0 * l[i * n + i].re.ln()).sum())
}

/// Lower-triangular `l` with `l·l* = a`.
pub fn cholesky(a: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut diag = a[j * n + j].re;
        for k in 0..j {
            diag -= l[j * n + k].norm_sqr();
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    Some(l)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    if n == 1 {
        return if a[0].norm() > 0.0 {
            Some(vec![a[0].inv()])
        } else {
            None
        };
    }
    if n == 2 {
        let det = a[0] * a[3] - a[1] * a[2];
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = det.inv();
        return Some(vec![a[3] * inv, -a[1] * inv, -a[2] * inv, a[0] * inv]);
    }
    let mut m = a.to_vec();
    let mut out = identity(n);
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&x, &y| m[x * n + col].norm().total_cmp(&m[y * n + col].norm()))?;
        if m[pivot * n + col].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                out.swap(pivot * n + k, col * n + k);
            }
        }
        let inv = m[col * n + col].inv();
        for k in 0..n {
            m[col * n + k] *= inv;
            out[col * n + k] *= inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * n + col];
            if factor.norm() == 0.0 {
                continue;
            }
            for k in 0..n {
                let mv = m[col * n + k];
                let ov = out[col * n + k];
                m[row * n + k] -= factor * mv;
                out[row * n + k] -= factor * ov;
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_eigenvalues_keep_tiny_eigenvalue() {
        // [[a, b], [b̄, 1]] with a tiny and |b|² = a/2: eigenvalues ≈ 1 and a/2.
        let a = 1e-80;
        let b = (a / 2.0f64).sqrt();
        let m = [c(a, 0.0), c(b, 0.0), c(b, 0.0), c(1.0, 0.0)];
        let ev = hermitian_eigenvalues(&m, 2);
        assert!((ev[0] / (a / 2.0) - 1.0).abs() < 1e-10);
        assert!((ev[1] - 1.0).abs() < 1e-15);
        let logdet = cholesky_log_det(&m, 2).unwrap();
        assert!((logdet - (a / 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_nalgebra() {
        let m = [c(2.0, 0.0), c(0.5, -1.0), c(0.5, 1.0), c(-1.0, 0.0)];
        let dm = to_dmatrix(&m, 2);
        let mut ev: Vec<f64> = dm.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let closed = hermitian_eigenvalues(&m, 2);
        assert!((ev[0] - closed[0]).abs() < 1e-13);
        assert!((ev[1] - closed[1]).abs() < 1e-13);
        let g = [c(0.3, 0.2), c(-1.0, 0.7), c(2.0, 0.0), c(0.1, -0.4)];
        let sv = to_dmatrix(&g, 2).singular_values().max();
        assert!((operator_norm(&g, 2) - sv).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_block_norm() {
        let m = [c(0.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!((operator_norm(&m, 2) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip_3x3() {
        let a = vec![
            c(4.0, 0.0),
            c(1.0, 1.0),
            c(0.0, -2.0),
            c(0.5, 0.0),
            c(3.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(-1.0, 0.5),
            c(5.0, 0.0),
        ];
        let inv = inverse(&a, 3).unwrap();
        let mut prod = vec![c(0.0, 0.0); 9];
        mul(&a, &inv, 3, &mut prod);
        let eye = identity(3);
        for (x, y) in prod.iter().zip(&eye) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = [c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        assert!(cholesky_log_det(&m, 2).is_none());
    }
}
