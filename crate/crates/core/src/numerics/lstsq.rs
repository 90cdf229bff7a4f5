use num_complex::Complex64;

use super::eigen::householder_vector;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Minimises `‖Ax − b‖₂` by Householder QR (`A` must have full column rank).
pub fn least_squares(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if m < n {
        return Err(Error::IllPosed(format!("{m}×{n} system is underdetermined")));
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        let x: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        let Some(v) = householder_vector(&x) else {
            continue;
        };
        for j in k..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * r[(k + i, j)]).sum();
            for i in 0..v.len() {
                r[(k + i, j)] -= v[i] * s * 2.0;
            }
        }
        let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * y[k + i]).sum();
        for i in 0..v.len() {
            y[k + i] -= v[i] * s * 2.0;
        }
    }
    let tol = 1e-13 * a.frobenius_norm().max(f64::MIN_POSITIVE);
    if let Some(k) = (0..n).find(|&k| r[(k, k)].norm() <= tol) {
        return Err(Error::IllPosed(format!("column {k} is numerically dependent")));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = y[k];
        for j in k + 1..n {
            s -= r[(k, j)] * x[j];
        }
        x[k] = s / r[(k, k)];
    }
    Ok(x)
}

/// Inverse of a square matrix, column by column.
#[cfg(test)]
pub(crate) fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let col = least_squares(a, &e)?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(m: usize, n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(m, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn square_solve() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(3.0, 0.0)]]);
        let x = vec![c(1.0, -1.0), c(0.5, 2.0)];
        let b = a.mul_vec(&x);
        let got = least_squares(&a, &b).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-14);
        }
    }

    #[test]
    fn consistent_overdetermined() {
        let a = random(9, 4, 1);
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5), c(0.3, 0.3)];
        let got = least_squares(&a, &a.mul_vec(&x)).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-13);
        }
    }

    #[test]
    fn normal_equations_hold() {
        let a = random(10, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b: Vec<Complex64> = (0..10).map(|_| c(rng.random(), rng.random())).collect();
        let x = least_squares(&a, &b).unwrap();
        let r: Vec<Complex64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        let ne = a.adjoint().mul_vec(&r);
        let bn = super::super::matrix::norm2(&b);
        assert!(super::super::matrix::norm2(&ne) <= 1e-8 * a.frobenius_norm() * bn);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = CMatrix::from_fn(4, 2, |i, _| c(i as f64 + 1.0, 0.0));
        assert!(matches!(least_squares(&a, &[c(1.0, 0.0); 4]), Err(Error::IllPosed(_))));
    }
}
