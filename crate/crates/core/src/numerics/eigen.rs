use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_SWEEPS: usize = 100;
const QR_ITERS_PER_EIGENVALUE: usize = 60;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

/// Jacobi rotation for the Hermitian 2×2 block `[[app, apq], [conj(apq), aqq]]`.
///
/// Returns `(c, s, e)` such that the unitary with columns
/// `(c, −s e)` and `(s, c e)` (in coordinates `p, q`) diagonalises the block.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let r = apq.norm();
    if r == 0.0 {
        return (1.0, 0.0, Complex64::new(1.0, 0.0));
    }
    // phase that makes the off-diagonal entry real and positive
    let e = (apq / r).conj();
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, e)
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("eigensolver needs a square matrix".into()));
    }
    let n = a.rows();
    let scale = a.frobenius_norm().max(1.0) * 1e-12;
    if a.hermitian_defect() > scale.max(1e-14 * a.frobenius_norm()) {
        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
    }
    let mut m = a.clone();
    m.symmetrize();
    let mut v = CMatrix::identity(n);
    let total = m.frobenius_norm();

    let off = |m: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = total == 0.0 || off(&m) <= JACOBI_TOL * total;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi eigensolver did not converge in {JACOBI_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let (c, s, e) = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, apq);
                // columns: M ← M U
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * c - y * e * s;
                    m[(k, q)] = x * s + y * e * c;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * c - y * e * s;
                    v[(k, q)] = x * s + y * e * c;
                }
                // rows: M ← U* M
                let ec = e.conj();
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = x * c - y * ec * s;
                    m[(q, k)] = x * s + y * ec * c;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
            }
        }
        converged = off(&m) <= JACOBI_TOL * total;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| m[(i, i)].re).collect(),
        vectors: v.select_columns(&order),
    })
}

/// Eigenvalues of a general complex square matrix: Householder reduction to
/// Hessenberg form followed by Wilkinson-shifted QR with deflation.
pub fn complex_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("eigenvalues need a square matrix".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(a);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag.max(f64::MIN_POSITIVE) {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > QR_ITERS_PER_EIGENVALUE {
            return Err(Error::NumericalFailure("shifted QR did not converge".into()));
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, l, hi, mu);
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// One explicit shifted QR sweep on the active block `l..=hi` via Givens rotations.
fn qr_step(h: &mut CMatrix, l: usize, hi: usize, mu: Complex64) {
    for k in l..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, Complex64::new(0.0, 0.0))
        } else if x.norm() == 0.0 {
            (0.0, Complex64::new(1.0, 0.0))
        } else {
            (x.norm() / r, (x / x.norm()) * y.conj() / r)
        };
        for j in k..=hi {
            let (p, q) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = p * c + s * q;
            h[(k + 1, j)] = -s.conj() * p + q * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = l + idx;
        let top = (k + 2).min(hi);
        for i in l..=top {
            let (p, q) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = p * c + q * s.conj();
            h[(i, k + 1)] = -p * s + q * c;
        }
    }
    for k in l..=hi {
        h[(k, k)] += mu;
    }
}

/// Unitary similarity to upper Hessenberg form.
fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some(v) = householder_vector(&x) else {
            continue;
        };
        // H ← P H, P = I − 2 v v*, acting on rows k+1..n
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * s * 2.0;
            }
        }
        // H ← H P
        for i in 0..n {
            let s: Complex64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Unit vector `v` with `(I − 2vv*) x = α e₁`, or `None` when `x` is already
/// a multiple of `e₁`.
pub(crate) fn householder_vector(x: &[Complex64]) -> Option<Vec<Complex64>> {
    let norm = super::matrix::norm2(x);
    let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if norm == 0.0 || tail == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        x[0] / x[0].norm()
    };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vn = super::matrix::norm2(&v);
    Some(v.into_iter().map(|z| z / vn).collect())
}
