use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{ReportMeta, SecondaryCheck, Sense, TheoremId, TheoremReport};
use crate::error::{Error, Result};
use crate::measure::{unit_phase, FrequencySet, NormKind, SAMPLING_BUDGET};
use crate::numerics::{sigma_min_via_gram, CMatrix};
use crate::torus::{separation_or_inf, NodeSet, TorusPoint};

/// Largest node set accepted by the Vandermonde routines.
pub const MAX_VANDERMONDE_NODES: usize = 64;

/// Partition of a node set into singletons and pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDecomposition {
    /// Node indices per cluster, each of length one or two.
    pub clusters: Vec<Vec<usize>>,
    /// Minimal distance between nodes of different clusters (`+∞` for one cluster).
    pub delta: f64,
    /// Minimal intra-pair distance (`+∞` without pairs).
    pub tau: f64,
}

impl ClusterDecomposition {
    pub fn pair_count(&self) -> usize {
        self.clusters.iter().filter(|c| c.len() == 2).count()
    }
}

/// Greedy pairing of nodes within the cube side `√d/N`.
pub fn cluster_decompose(y: &NodeSet, n: u32, d: usize) -> Result<ClusterDecomposition> {
    if y.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: y.dim(),
        });
    }
    let side = (d as f64).sqrt() / n as f64;
    let m = y.len();
    let dist = |i: usize, j: usize| y.get(i).distance(y.get(j));
    let near: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..m).filter(|&j| j != i && dist(i, j) <= side).collect())
        .collect();
    for js in &near {
        for (a, &j) in js.iter().enumerate() {
            if js[a + 1..].iter().any(|&k| dist(j, k) <= side) {
                return Err(Error::ClusterSizeExceeded(3));
            }
        }
    }

    let mut owner = vec![usize::MAX; m];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        if owner[i] != usize::MAX {
            continue;
        }
        let partner = near[i]
            .iter()
            .copied()
            .filter(|&j| owner[j] == usize::MAX)
            .min_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)));
        let c = clusters.len();
        owner[i] = c;
        match partner {
            Some(j) => {
                owner[j] = c;
                clusters.push(vec![i, j]);
            }
            None => clusters.push(vec![i]),
        }
    }

    let mut delta = f64::INFINITY;
    let mut tau = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            if owner[i] == owner[j] {
                tau = tau.min(dist(i, j));
            } else {
                delta = delta.min(dist(i, j));
            }
        }
    }
    Ok(ClusterDecomposition { clusters, delta, tau })
}

/// `(e^{−2πik·t})_{k ∈ freq, t ∈ Y}`.
pub fn vandermonde_matrix(y: &NodeSet, freq: &FrequencySet) -> Result<CMatrix> {
    if y.dim() != freq.dim() {
        return Err(Error::DimensionMismatch {
            expected: freq.dim(),
            found: y.dim(),
        });
    }
    if y.len() > MAX_VANDERMONDE_NODES {
        return Err(Error::InvalidParameter(format!(
            "{} nodes exceed the limit of {MAX_VANDERMONDE_NODES}",
            y.len()
        )));
    }
    let ks = freq.members();
    Ok(CMatrix::from_fn(ks.len(), y.len(), |i, j| unit_phase(&ks[i], y.get(j).coords())))
}

/// Smallest singular value of the Vandermonde matrix over the given frequencies.
pub fn vandermonde_sigma_min_on(y: &NodeSet, freq: &FrequencySet) -> Result<f64> {
    sigma_min_via_gram(&vandermonde_matrix(y, freq)?)
}

/// Smallest singular value over the ℓ²-ball `‖k‖₂ ≤ N`.
pub fn vandermonde_sigma_min(y: &NodeSet, n: u32, d: usize) -> Result<f64> {
    vandermonde_sigma_min_on(y, &FrequencySet::new(d, n, NormKind::L2)?)
}

/// Smallest singular value over the cube `‖k‖_∞ ≤ N`.
pub fn vandermonde_sigma_min_cube(y: &NodeSet, n: u32, d: usize) -> Result<f64> {
    vandermonde_sigma_min_on(y, &FrequencySet::new(d, n, NormKind::Linf)?)
}

/// Pair-cluster lower bound `√((d−½)/(3d²)) (3/2)^{d/2} (Nτ) N^{d/2} √2 / d^{d/4}`.
pub fn pair_cluster_bound(n: u32, d: usize, tau: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    ((df - 0.5) / (3.0 * df * df)).sqrt()
        * 1.5f64.powf(df / 2.0)
        * (nf * tau)
        * nf.powf(df / 2.0)
        * 2f64.sqrt()
        / df.powf(df / 4.0)
}

/// Lower bound of the cube-frequency result for pair clusters.
pub fn nagel_bound(n: u32, d: usize, tau: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    (nf * tau) * nf.powf(df / 2.0) * 2f64.sqrt() / (6.0 * df.powf(df / 4.0))
}

/// Cluster separation required by the cube-frequency result.
pub fn nagel_delta_requirement(n: u32, d: usize, tau: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    6.0 * df / nf * (2.0 / (tau * nf)).powf(1.0 / (df + 1.0))
}

/// Cluster separation required by the ℓ²-ball bound, `2√d/N`.
pub fn pair_cluster_delta_requirement(n: u32, d: usize) -> f64 {
    2.0 * (d as f64).sqrt() / n as f64
}

/// Compares `σ_min` with the pair-cluster bound (ℓ²-ball frequencies) and,
/// as a secondary check, with the cube-frequency bound under its own premise.
pub fn check_pair_cluster_bound(y: &NodeSet, n: u32, d: usize) -> Result<TheoremReport> {
    let cd = cluster_decompose(y, n, d)?;
    let q = (d as f64).sqrt() / n as f64;
    let tau = cd.tau.min(separation_or_inf(y));
    let ours_required = pair_cluster_delta_requirement(n, d);
    let premise = d >= 2 && cd.delta >= ours_required && tau > 0.0 && tau < q;

    let sigma = vandermonde_sigma_min(y, n, d)?;
    let bound = if tau.is_finite() { pair_cluster_bound(n, d, tau) } else { f64::INFINITY };
    let terms = BTreeMap::from([("bound".to_string(), bound)]);
    let meta = ReportMeta {
        n,
        d,
        m: y.len(),
        c_min: f64::NAN,
        kappa: None,
        seed: None,
    };
    let mut r = TheoremReport::new(TheoremId::VandermondePairs, premise, sigma, terms, Sense::Geq, meta);

    let nagel_required = nagel_delta_requirement(n, d, tau);
    let nagel_premise = tau > 0.0 && tau.is_finite() && cd.delta >= nagel_required;
    let sigma_cube = vandermonde_sigma_min_cube(y, n, d)?;
    r.secondary.push(SecondaryCheck::new(
        "nagel",
        nagel_premise,
        sigma_cube,
        nagel_bound(n, d, tau),
        Sense::Geq,
    ));
    r.diagnostics.extend([
        ("ratio".to_string(), sigma / bound),
        ("delta".to_string(), cd.delta),
        ("tau".to_string(), tau),
        ("delta_required".to_string(), ours_required),
        ("delta_required_nagel".to_string(), nagel_required),
        ("sigma_min_cube".to_string(), sigma_cube),
        ("pairs".to_string(), cd.pair_count() as f64),
    ]);
    Ok(r)
}

/// Random node set of `pairs` pair clusters with intra-pair distance `tau`
/// and `singles` singletons, all clusters at least `2√d/N` apart.
pub fn random_pair_cluster(
    d: usize,
    n: u32,
    pairs: usize,
    singles: usize,
    tau: f64,
    seed: u64,
) -> Result<NodeSet> {
    let q = (d as f64).sqrt() / n as f64;
    if !(tau > 0.0 && tau < q) {
        return Err(Error::InvalidParameter(format!("tau {tau} outside (0, {q})")));
    }
    if pairs + singles == 0 {
        return Err(Error::InvalidParameter("empty configuration".into()));
    }
    let gap = 2.0 * q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<TorusPoint> = Vec::new();
    let mut placed = 0usize;
    let mut stalled = 0usize;
    for _ in 0..SAMPLING_BUDGET {
        if placed == pairs + singles {
            return NodeSet::new(pts);
        }
        let anchor: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let mut cluster = vec![TorusPoint::new(anchor.clone())?];
        if placed < pairs {
            let axis = rng.random_range(0..d);
            let offset: Vec<f64> = (0..d)
                .map(|i| {
                    if i == axis {
                        if rng.random::<bool>() { tau } else { -tau }
                    } else {
                        rng.random_range(-tau..=tau)
                    }
                })
                .collect();
            cluster.push(cluster[0].translate(&offset)?);
        }
        if cluster.iter().all(|c| pts.iter().all(|p| p.distance(c) >= gap)) {
            pts.extend(cluster);
            placed += 1;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 1000 {
                pts.clear();
                placed = 0;
                stalled = 0;
            }
        }
    }
    Err(Error::SamplingBudgetExhausted(SAMPLING_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pts(rows: &[&[f64]]) -> NodeSet {
        NodeSet::from_coords(rows.iter().map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn separated_singletons() {
        let y = pts(&[&[0.1, 0.1], &[0.5, 0.5], &[0.1, 0.6]]);
        let cd = cluster_decompose(&y, 16, 2).unwrap();
        assert_eq!(cd.clusters.len(), 3);
        assert!(cd.tau.is_infinite());
        assert!((cd.delta - 0.4).abs() < 1e-12);
    }

    #[test]
    fn constructed_pair() {
        let n = 16u32;
        let tau = 0.3 * 2f64.sqrt() / n as f64;
        let y = pts(&[&[0.2, 0.2], &[0.2 + tau, 0.2], &[0.7, 0.7]]);
        let cd = cluster_decompose(&y, n, 2).unwrap();
        assert_eq!(cd.clusters, vec![vec![0, 1], vec![2]]);
        assert!((cd.tau - tau).abs() < 1e-12);
    }

    #[test]
    fn three_close_nodes_rejected() {
        let y = pts(&[&[0.2, 0.2], &[0.21, 0.2], &[0.2, 0.21]]);
        assert_eq!(cluster_decompose(&y, 16, 2), Err(Error::ClusterSizeExceeded(3)));
    }

    #[test]
    fn single_node_sigma_is_root_of_ball_size() {
        for d in 1..=3 {
            let y = NodeSet::new(vec![TorusPoint::new(vec![0.37; d]).unwrap()]).unwrap();
            let b = FrequencySet::new(d, 5, NormKind::L2).unwrap().len() as f64;
            assert!((vandermonde_sigma_min(&y, 5, d).unwrap() - b.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn antipodal_pair_closed_form() {
        // Gram [[B, s], [s̄, B]] has λ_min = B − |s| with s = Σ_k e^{πik}
        for n in 1..6u32 {
            let y = NodeSet::from_scalars(&[0.0, 0.5]).unwrap();
            let b = (2 * n + 1) as f64;
            let s: f64 = (-(n as i64)..=n as i64).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).sum();
            let want = (b - s.abs()).sqrt();
            assert!((vandermonde_sigma_min(&y, n, 1).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_below_random_probes() {
        let y = random_pair_cluster(2, 16, 2, 1, 0.02, 3).unwrap();
        let a = vandermonde_matrix(&y, &FrequencySet::new(2, 16, NormKind::L2).unwrap()).unwrap();
        let s = sigma_min_via_gram(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x: Vec<Complex64> = (0..y.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let nx: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let ax: f64 = a.mul_vec(&x).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(s <= ax / nx + 1e-10);
        }
    }

    #[test]
    fn generated_configs_meet_the_premise() {
        for seed in 0..10 {
            let tau = 0.05 / 16.0;
            let y = random_pair_cluster(2, 16, 2, 1, tau, seed).unwrap();
            let cd = cluster_decompose(&y, 16, 2).unwrap();
            assert_eq!(cd.pair_count(), 2);
            assert!(cd.delta >= pair_cluster_delta_requirement(16, 2));
            assert!((cd.tau - tau).abs() < 1e-12);
            let r = check_pair_cluster_bound(&y, 16, 2).unwrap();
            assert!(r.premise_holds);
            assert!(r.passes());
            assert!(r.diagnostics["delta_required_nagel"] > r.diagnostics["delta_required"]);
        }
    }
}
