use num_complex::Complex64;

use super::eigen::{hermitian_eigen, jacobi_rotation};
use super::matrix::{dot, norm2, CMatrix};
use crate::error::{Error, Result};

const SVD_SWEEPS: usize = 100;
const SVD_TOL: f64 = 1e-15;

/// Singular values with right singular vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub values: Vec<f64>,
    /// Right singular vectors as columns, ordered like `values`.
    pub right: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn subspace_svd(a: &CMatrix) -> Result<Svd> {
    let n = a.cols();
    let m = a.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = CMatrix::identity(n);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm2(&cols[p]).powi(2);
                let beta = norm2(&cols[q]).powi(2);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.norm() <= SVD_TOL * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s, e) = jacobi_rotation(alpha, beta, gamma);
                for k in 0..m {
                    let (x, y) = (cols[p][k], cols[q][k]);
                    cols[p][k] = x * c - y * e * s;
                    cols[q][k] = x * s + y * e * c;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * c - y * e * s;
                    v[(k, q)] = x * s + y * e * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == SVD_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi SVD did not converge in {SVD_SWEEPS} sweeps"
            )));
        }
    }
    let sigma: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    Ok(Svd {
        values: order.iter().map(|&i| sigma[i]).collect(),
        right: v.select_columns(&order),
    })
}

/// `σ_min(A)` as the square root of the smallest eigenvalue of `A*A`.
pub fn sigma_min_via_gram(a: &CMatrix) -> Result<f64> {
    let g = a.gram();
    let e = hermitian_eigen(&g)?;
    let lam = e.values.first().copied().unwrap_or(0.0);
    let fro2 = a.frobenius_norm().powi(2);
    if lam < -1e-12 * fro2 {
        return Err(Error::NumericalFailure(format!(
            "Gram matrix has negative eigenvalue {lam:e}"
        )));
    }
    Ok(lam.max(0.0).sqrt())
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
    fn diagonal_rectangular() {
        let mut a = CMatrix::zeros(4, 3);
        a[(0, 0)] = c(0.0, -2.0);
        a[(1, 1)] = c(5.0, 0.0);
        a[(2, 2)] = c(1.0, 1.0);
        let s = subspace_svd(&a).unwrap();
        assert!((s.values[0] - 5.0).abs() < 1e-15);
        assert!((s.values[1] - 2.0).abs() < 1e-15);
        assert!((s.values[2] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let q = hermitian_eigen(&random(5, 5, 4).gram()).unwrap().vectors;
        let s = subspace_svd(&q).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn agrees_with_gram_route() {
        let a = random(12, 6, 5);
        let s = subspace_svd(&a).unwrap();
        let mut g = hermitian_eigen(&a.gram()).unwrap().values;
        g.reverse();
        for (sv, ev) in s.values.iter().zip(&g) {
            assert!((sv - ev.sqrt()).abs() < 1e-10);
        }
        let gram = a.gram();
        let fro = a.frobenius_norm();
        for k in 0..6 {
            let v = s.right.column(k);
            let gv = gram.mul_vec(&v);
            let r: f64 = gv
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * s.values[k].powi(2)).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-9 * fro);
        }
        let vv = s.right.gram();
        assert!(vv.sub(&CMatrix::identity(6)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn sigma_min_trivial_cases() {
        let col = CMatrix::from_fn(9, 1, |i, _| Complex64::from_polar(1.0, i as f64));
        assert!((sigma_min_via_gram(&col).unwrap() - 3.0).abs() < 1e-14);
        let mut orth = CMatrix::zeros(3, 2);
        orth[(0, 0)] = c(0.5, 0.0);
        orth[(2, 1)] = c(0.0, 0.5);
        assert!((sigma_min_via_gram(&orth).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sigma_min_below_random_probes() {
        let a = random(20, 4, 6);
        let smin = sigma_min_via_gram(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x: Vec<Complex64> = (0..4).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let nx = norm2(&x);
            let ax = norm2(&a.mul_vec(&x)) / nx;
            assert!(smin <= ax + 1e-12);
        }
    }
}
