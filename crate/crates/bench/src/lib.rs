//! Benchmark fixtures for the `kernels` criterion suite.

use pronylab::measure::{random_admissible, random_admissible_pair};
use pronylab::{AdmissibilityClass, DiscreteMeasure, NormKind};

/// A random admissible measure with `m` nodes on `T^d`.
pub fn measure(d: usize, n: u32, m: usize, seed: u64) -> DiscreteMeasure {
    let q = 2.0 * (d as f64).sqrt() / n as f64;
    let cls = AdmissibilityClass::new(0.05, q, d, n, NormKind::L2).expect("valid class");
    random_admissible(&cls, m, seed).expect("sampler succeeds")
}

/// A jittered pair of measures with `m` nodes each.
pub fn pair(d: usize, n: u32, m: usize, seed: u64) -> (DiscreteMeasure, DiscreteMeasure) {
    let q = 2.0 * (d as f64).sqrt() / n as f64;
    let cls = AdmissibilityClass::new(0.05, q, d, n, NormKind::L2).expect("valid class");
    random_admissible_pair(&cls, m, seed, 0.2).expect("sampler succeeds")
}
