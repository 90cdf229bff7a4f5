//! Univariate ESPRIT: node recovery from `2N+1` consecutive moments by the
//! rotational invariance of the Hankel signal subspace.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{unit_phase, DiscreteMeasure, MomentVector};
use crate::numerics::{complex_eigenvalues, least_squares, subspace_svd, CMatrix};
use crate::torus::{NodeSet, TorusPoint};

/// Singular-value ratio `σ_M / σ_{M+1}` below which the signal subspace is flagged.
pub const GAP_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EspritConfig {
    /// Moments `k = −N..=N` are used.
    pub n: u32,
    /// Number of nodes to recover.
    pub m: usize,
    /// Hankel rows `P`; defaults to `N + 1`.
    pub pencil_rows: Option<usize>,
}

impl EspritConfig {
    pub fn new(n: u32, m: usize) -> Self {
        Self {
            n,
            m,
            pencil_rows: None,
        }
    }

    fn rows(&self) -> usize {
        self.pencil_rows.unwrap_or(self.n as usize + 1)
    }

    fn validate(&self) -> Result<(usize, usize)> {
        let p = self.rows();
        let total = 2 * self.n as usize + 2;
        if p == 0 || p >= total {
            return Err(Error::InvalidParameter(format!(
                "pencil height {p} outside 1..{}",
                total - 1
            )));
        }
        let l = total - p;
        if self.m == 0 || self.m > p.min(l) || self.m >= l {
            return Err(Error::InvalidParameter(format!(
                "cannot recover {} nodes from a {p}×{l} Hankel matrix",
                self.m
            )));
        }
        Ok((p, l))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EspritRecovery {
    /// Recovered nodes, ascending.
    pub nodes: NodeSet,
    /// Least-squares weights, aligned with `nodes`.
    pub weights: Vec<Complex64>,
    /// All singular values of the Hankel matrix, descending.
    pub singular_values: Vec<f64>,
    /// `σ_M / σ_{M+1}` (infinite when `σ_{M+1} = 0`).
    pub gap_ratio: f64,
    /// `false` when the gap ratio is below [`GAP_THRESHOLD`].
    pub reliable: bool,
}

impl EspritRecovery {
    /// The recovered weights as a measure; fails if they do not sum to one.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.nodes.clone(), self.weights.clone())
    }
}

/// Recovers `M` nodes and weights from `h(k)`, `k = −N..=N`.
pub fn esprit_recover(h: &MomentVector, cfg: &EspritConfig) -> Result<EspritRecovery> {
    let fs = h.freq_set();
    if fs.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: fs.dim(),
        });
    }
    if fs.order() != cfg.n {
        return Err(Error::InvalidParameter(format!(
            "moments of order {} but configuration expects {}",
            fs.order(),
            cfg.n
        )));
    }
    let (p, l) = cfg.validate()?;
    let n = cfg.n as i64;
    let moment = |k: i64| h.get(&[k]).expect("contiguous univariate moments");

    // H[m, ℓ] = h(m + ℓ − N)
    let hankel = CMatrix::from_fn(p, l, |i, j| moment(i as i64 + j as i64 - n));
    let svd = subspace_svd(&hankel)?;
    let m = cfg.m;
    let gap_ratio = match svd.values.get(m) {
        Some(&next) if next > 0.0 => svd.values[m - 1] / next,
        _ => f64::INFINITY,
    };

    // right singular vectors span conj of the Vandermonde columns (e^{2πitℓ})_ℓ,
    // so the shift operator has eigenvalues e^{2πit_j}
    let w = svd.right.select_columns(&(0..m).collect::<Vec<_>>());
    let upper = w.block(0..l - 1, 0..m);
    let lower = w.block(1..l, 0..m);
    let mut psi = CMatrix::zeros(m, m);
    for j in 0..m {
        let col = least_squares(&upper, &lower.column(j))?;
        for i in 0..m {
            psi[(i, j)] = col[i];
        }
    }
    let eig = complex_eigenvalues(&psi)?;
    let mut ts: Vec<f64> = eig
        .iter()
        .map(|z| {
            let u = z / z.norm();
            let t = (u.arg() / (2.0 * PI)).rem_euclid(1.0);
            if t >= 1.0 {
                0.0
            } else {
                t
            }
        })
        .collect();
    ts.sort_by(f64::total_cmp);
    let nodes = NodeSet::new(ts.iter().map(|&t| TorusPoint::scalar(t)).collect())
        .map_err(|_| Error::NumericalFailure("ESPRIT returned coinciding nodes".into()))?;

    let ks: Vec<i64> = (-n..=n).collect();
    let vander = CMatrix::from_fn(ks.len(), m, |i, j| unit_phase(&[ks[i]], &[ts[j]]));
    let rhs: Vec<Complex64> = ks.iter().map(|&k| moment(k)).collect();
    let weights = least_squares(&vander, &rhs)?;

    Ok(EspritRecovery {
        nodes,
        weights,
        singular_values: svd.values,
        gap_ratio,
        reliable: gap_ratio >= GAP_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{moment_map, FrequencySet};
    use crate::torus::matching_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn measure(ts: &[f64], ws: &[Complex64]) -> DiscreteMeasure {
        DiscreteMeasure::new(NodeSet::from_scalars(ts).unwrap(), ws.to_vec()).unwrap()
    }

    #[test]
    fn two_nodes_noiseless() {
        let mu = measure(&[0.2, 0.7], &[c(0.5, 0.0), c(0.5, 0.0)]);
        let h = moment_map(&mu, &FrequencySet::univariate(16)).unwrap();
        let r = esprit_recover(&h, &EspritConfig::new(16, 2)).unwrap();
        assert!(matching_distance(&r.nodes, mu.nodes()).unwrap() <= 1e-8);
        for w in &r.weights {
            assert!((w - 0.5).norm() <= 1e-8);
        }
        assert!(r.reliable);
    }

    #[test]
    fn single_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let t: f64 = rng.random();
            let mu = DiscreteMeasure::dirac(TorusPoint::scalar(t));
            let h = moment_map(&mu, &FrequencySet::univariate(8)).unwrap();
            let r = esprit_recover(&h, &EspritConfig::new(8, 1)).unwrap();
            let got = r.nodes.get(0);
            assert!(got.distance(&TorusPoint::scalar(t)) <= 1e-10);
        }
    }

    #[test]
    fn grid_measure_round_trip() {
        let n = 10u32;
        let grid = 2 * n as usize + 1;
        let idx = [1usize, 5, 11, 17];
        let ts: Vec<f64> = idx.iter().map(|&i| i as f64 / grid as f64).collect();
        let ws = [c(0.1, 0.2), c(0.4, -0.1), c(0.3, 0.0), c(0.2, -0.1)];
        // moments as the DFT of the zero-padded weight vector
        let mut padded = vec![c(0.0, 0.0); grid];
        for (i, w) in idx.iter().zip(&ws) {
            padded[*i] = *w;
        }
        let f = FrequencySet::univariate(n);
        let vals = f
            .members()
            .iter()
            .map(|k| {
                (0..grid)
                    .map(|j| padded[j] * Complex64::from_polar(1.0, -2.0 * PI * (k[0] * j as i64) as f64 / grid as f64))
                    .sum()
            })
            .collect();
        let h = MomentVector::new(f, vals).unwrap();
        let r = esprit_recover(&h, &EspritConfig::new(n, 4)).unwrap();
        for (got, want) in r.nodes.iter().zip(&ts) {
            assert!(got.distance(&TorusPoint::scalar(*want)) < 1e-10);
        }
        for (got, want) in r.weights.iter().zip(&ws) {
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        let h = moment_map(&DiscreteMeasure::dirac(TorusPoint::scalar(0.1)), &FrequencySet::univariate(4)).unwrap();
        assert!(esprit_recover(&h, &EspritConfig::new(5, 1)).is_err());
        assert!(esprit_recover(&h, &EspritConfig::new(4, 0)).is_err());
        assert!(esprit_recover(&h, &EspritConfig::new(4, 6)).is_err());
    }

    #[test]
    fn flags_missing_gap() {
        // asking for more nodes than present leaves σ_M ≈ 0
        let mu = measure(&[0.3, 0.8], &[c(0.6, 0.0), c(0.4, 0.0)]);
        let h = moment_map(&mu, &FrequencySet::univariate(8)).unwrap();
        let mut noisy = h.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for v in noisy.values_mut() {
            *v += c(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3));
        }
        let r = esprit_recover(&noisy, &EspritConfig::new(8, 3)).unwrap();
        assert!(!r.reliable);
    }
}
