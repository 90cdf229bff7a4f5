use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use super::matching::match_and_decompose;
use super::report::{ReportMeta, SecondaryCheck, Sense, TheoremId, TheoremReport};
use crate::error::{Error, Result};
use crate::esprit::{esprit_recover, EspritConfig};
use crate::measure::{moment_map, DiscreteMeasure, FrequencySet, MomentVector, NormKind};
use crate::torus::{matching_distance, separation_or_inf};
use crate::wasserstein::{w1_complex, DEFAULT_ANGLES};

/// Improved univariate branch applies for `κ² ≥ 13/9`.
pub const IMPROVED_KAPPA_SQ: f64 = 13.0 / 9.0;

/// Simplified global Lipschitz constant.
pub const GLOBAL_W1_SIMPLE: f64 = 2.3;

/// Constants of a local lower bound
/// `Σ|Δμ̂|² ≥ A Σ_{Y₁} w_t ‖t − η(t)‖² + B Σ_{Y₁} |c_t − c_η(t)|²`
/// valid when `Σ|Δμ̂|² < P c_min²` on measures with separation `sep`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSpec {
    pub id: TheoremId,
    pub d: usize,
    pub n: u32,
    pub norm: NormKind,
    /// Separation of the admissibility class.
    pub sep: f64,
    /// Radius of the Y-decomposition.
    pub radius: f64,
    /// Claimed bound on `‖t − η(t)‖` under the premise.
    pub neighbour: f64,
    /// `P`.
    pub premise: f64,
    /// `A`.
    pub node: f64,
    /// `B`.
    pub weight: f64,
    /// `w_t = |c_t|² + |c_η(t)|²` if set, `c_min²` otherwise.
    pub pair_mass: bool,
    pub kappa: Option<f64>,
}

impl LocalSpec {
    /// Univariate class `2κ/N`; the improved branch is used once `κ² ≥ 13/9`.
    pub fn univariate(n: u32, kappa: f64) -> Result<Self> {
        if !(kappa > 1.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must exceed 1, got {kappa}")));
        }
        let nf = n as f64;
        let k2 = kappa * kappa;
        let premise = (3.0 * k2 - 1.0) / (2.0 * kappa.powi(3)) * nf;
        let (node, weight, neighbour) = if k2 >= IMPROVED_KAPPA_SQ {
            (
                10.0 * (k2 - 1.0) / kappa.powi(5),
                (k2 + 1.0) / (4.0 * kappa.powi(3)),
                kappa / (2.0 * nf),
            )
        } else {
            (
                3.75 * (k2 - 1.0) / kappa.powi(5),
                0.25 * (3.0 * k2 - 1.0) / (2.0 * kappa.powi(3)),
                kappa / nf,
            )
        };
        Ok(Self {
            id: TheoremId::Univariate,
            d: 1,
            n,
            norm: NormKind::L2,
            sep: 2.0 * kappa / nf,
            radius: kappa / nf,
            neighbour,
            premise,
            node: node * nf.powi(3),
            weight: weight * nf,
            pair_mass: false,
            kappa: Some(kappa),
        })
    }

    /// Univariate class `3/(N+1)` with node term weighted by pair mass.
    pub fn diederichs_1d(n: u32) -> Self {
        let m = n as f64 + 1.0;
        Self {
            id: TheoremId::Diederichs1d,
            d: 1,
            n,
            norm: NormKind::L2,
            sep: 3.0 / m,
            radius: 1.5 / m,
            neighbour: 1.5 / m,
            premise: 4.0 * m / 3.0,
            node: 2.0 * PI * PI * m.powi(3) / 243.0,
            weight: m / 3.0,
            pair_mass: true,
            kappa: None,
        }
    }

    /// Bivariate class `2/(N+1)` with cube frequencies.
    pub fn two_dim_linf(n: u32) -> Self {
        let m = n as f64 + 1.0;
        Self {
            id: TheoremId::TwoDimLinf,
            d: 2,
            n,
            norm: NormKind::Linf,
            sep: 2.0 / m,
            radius: 1.0 / m,
            neighbour: 0.5 / m,
            premise: 1.25 * m * m,
            node: 15.0 / 16.0 * m.powi(4),
            weight: 0.75 * m * m,
            pair_mass: true,
            kappa: None,
        }
    }

    /// Bivariate class `2√2/N` with ℓ²-ball frequencies.
    pub fn two_dim_l2(n: u32) -> Self {
        let nf = n as f64;
        Self {
            id: TheoremId::TwoDimL2,
            d: 2,
            n,
            norm: NormKind::L2,
            sep: 2.0 * SQRT_2 / nf,
            radius: SQRT_2 / nf,
            neighbour: 1.0 / (SQRT_2 * nf),
            premise: 0.75 * nf * nf,
            node: 1.25 * nf.powi(4),
            weight: nf * nf / 16.0,
            pair_mass: false,
            kappa: None,
        }
    }

    /// `d`-variate class `2√d/N` with ℓ²-ball frequencies, `d ≥ 2`.
    pub fn high_dim(n: u32, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("the d-variate bound needs d >= 2, got {d}")));
        }
        let (nf, df) = (n as f64, d as f64);
        let root = df.powf(df / 2.0);
        Ok(Self {
            id: TheoremId::HighDim,
            d,
            n,
            norm: NormKind::L2,
            sep: 2.0 * df.sqrt() / nf,
            radius: df.sqrt() / nf,
            neighbour: df.sqrt() / (2.0 * nf),
            premise: 1.5f64.powi(d as i32 - 1) * nf.powi(d as i32) / root,
            node: 10.0 * 1.5f64.powi(d as i32 - 2) * (df - 1.0) / (root * df * df) * nf.powi(d as i32 + 2),
            weight: 2.0 / (4f64.powi(d as i32) * root) * nf.powi(d as i32),
            pair_mass: false,
            kappa: None,
        })
    }

    pub fn frequency_set(&self) -> Result<FrequencySet> {
        FrequencySet::new(self.d, self.n, self.norm)
    }
}

fn check_dims(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, d: usize) -> Result<()> {
    for mu in [mu1, mu2] {
        if mu.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: mu.dim(),
            });
        }
    }
    Ok(())
}

fn moment_difference(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, freq: &FrequencySet) -> Result<MomentVector> {
    moment_map(mu1, freq)?.sub(&moment_map(mu2, freq)?)
}

fn meta(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32, d: usize, c_min: f64, kappa: Option<f64>) -> ReportMeta {
    ReportMeta {
        n,
        d,
        m: mu1.len().max(mu2.len()),
        c_min,
        kappa,
        seed: None,
    }
}

/// Evaluates a local lower bound together with its matching claims.
pub fn check_local(spec: &LocalSpec, mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<TheoremReport> {
    check_dims(mu1, mu2, spec.d)?;
    let c_min = mu1.c_min().min(mu2.c_min());
    let (sep1, sep2) = (separation_or_inf(mu1.nodes()), separation_or_inf(mu2.nodes()));
    let diff = moment_difference(mu1, mu2, &spec.frequency_set()?)?;
    let lhs = diff.l2_norm().powi(2);
    let premise_bound = spec.premise * c_min * c_min;
    let premise = sep1 >= spec.sep && sep2 >= spec.sep && lhs < premise_bound;

    let dec = match_and_decompose(mu1, mu2, spec.radius)?;
    let (w1, w2) = (mu1.weights(), mu2.weights());
    let mut nodes = 0.0;
    let mut weights = 0.0;
    for ((i, j), dist) in dec.pairs().zip(&dec.distances) {
        let w = if spec.pair_mass {
            w1[i].norm_sqr() + w2[j].norm_sqr()
        } else {
            c_min * c_min
        };
        nodes += w * dist * dist;
        weights += (w1[i] - w2[j]).norm_sqr();
    }
    let terms = BTreeMap::from([
        ("nodes".to_string(), spec.node * nodes),
        ("weights".to_string(), spec.weight * weights),
    ]);
    let mut r = TheoremReport::new(
        spec.id,
        premise,
        lhs,
        terms,
        Sense::Geq,
        meta(mu1, mu2, spec.n, spec.d, c_min, spec.kappa),
    );
    let max_dist = dec.max_distance();
    let structure = dec.y3.is_empty() && max_dist <= spec.neighbour * (1.0 + 1e-12);
    r.structural_ok = !premise || structure;
    r.diagnostics.extend([
        ("premise_bound".to_string(), premise_bound),
        ("y3".to_string(), dec.y3.len() as f64),
        ("max_neighbour_distance".to_string(), max_dist),
        ("neighbour_radius".to_string(), spec.neighbour),
        ("separation".to_string(), sep1.min(sep2)),
    ]);
    Ok(r)
}

pub fn check_univariate(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32, kappa: f64) -> Result<TheoremReport> {
    check_local(&LocalSpec::univariate(n, kappa)?, mu1, mu2)
}

pub fn check_diederichs_univariate(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32) -> Result<TheoremReport> {
    check_local(&LocalSpec::diederichs_1d(n), mu1, mu2)
}

pub fn check_2d_l2(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32) -> Result<TheoremReport> {
    check_local(&LocalSpec::two_dim_l2(n), mu1, mu2)
}

pub fn check_2d_linf_diederichs(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32) -> Result<TheoremReport> {
    check_local(&LocalSpec::two_dim_linf(n), mu1, mu2)
}

pub fn check_highd(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32, d: usize) -> Result<TheoremReport> {
    check_local(&LocalSpec::high_dim(n, d)?, mu1, mu2)
}

/// `√(3M)(1 + 3/√2)(2/3)^{d/2−1/2} d^{d/4} / N^{d/2}`.
pub fn global_w1_constant(m: usize, n: u32, d: usize) -> f64 {
    let df = d as f64;
    (3.0 * m as f64).sqrt() * (1.0 + 3.0 / SQRT_2) * (2.0f64 / 3.0).powf(df / 2.0 - 0.5) * df.powf(df / 4.0)
        / (n as f64).powf(df / 2.0)
}

/// `W₁ ≤ C(M) ‖Δμ̂‖₂` with the simplified `W₁ ≤ 2.3 ‖Δμ̂‖₂` as a secondary check.
/// The certified upper end of the `W₁` bracket is used as the left side.
pub fn check_global_w1(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    n: u32,
    d: usize,
    m_cap: usize,
) -> Result<TheoremReport> {
    check_dims(mu1, mu2, d)?;
    let sep = 2.0 * (d as f64).sqrt() / n as f64;
    let premise = d >= 2
        && separation_or_inf(mu1.nodes()) >= sep
        && separation_or_inf(mu2.nodes()) >= sep
        && mu1.len() <= m_cap
        && mu2.len() <= m_cap;
    let norm = moment_difference(mu1, mu2, &FrequencySet::new(d, n, NormKind::L2)?)?.l2_norm();
    let w1 = w1_complex(mu1, mu2, DEFAULT_ANGLES)?;
    let terms = BTreeMap::from([("lipschitz".to_string(), global_w1_constant(m_cap, n, d) * norm)]);
    let c_min = mu1.c_min().min(mu2.c_min());
    let mut r = TheoremReport::new(
        TheoremId::GlobalW1,
        premise,
        w1.upper_bound,
        terms,
        Sense::Leq,
        meta(mu1, mu2, n, d, c_min, None),
    );
    r.secondary.push(SecondaryCheck::new(
        "simplified",
        premise,
        w1.upper_bound,
        GLOBAL_W1_SIMPLE * norm,
        Sense::Leq,
    ));
    r.diagnostics.extend([
        ("w1".to_string(), w1.value),
        ("w1_gap".to_string(), w1.gap),
        ("moment_l2".to_string(), norm),
        ("m_cap".to_string(), m_cap as f64),
    ]);
    Ok(r)
}

/// Matching distance against `√(max(5/(6c²), 5)) (5/3)^{1/4} ‖Δμ̂‖_∞ / N`
/// in the univariate class with `κ = √(5/3)`.
pub fn check_md_order(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: u32) -> Result<TheoremReport> {
    check_dims(mu1, mu2, 1)?;
    let kappa = (5.0f64 / 3.0).sqrt();
    let spec = LocalSpec::univariate(n, kappa)?;
    let c_min = mu1.c_min().min(mu2.c_min());
    let diff = moment_difference(mu1, mu2, &spec.frequency_set()?)?;
    let premise = mu1.len() == mu2.len()
        && separation_or_inf(mu1.nodes()) >= spec.sep
        && separation_or_inf(mu2.nodes()) >= spec.sep
        && diff.l2_norm().powi(2) < spec.premise * c_min * c_min;
    let md = if mu1.len() == mu2.len() {
        matching_distance(mu1.nodes(), mu2.nodes())?
    } else {
        f64::NAN
    };
    let nf = n as f64;
    let bound = (5.0 / (6.0 * c_min * c_min)).max(5.0).sqrt() * (5.0f64 / 3.0).powf(0.25) * diff.linf_norm() / nf;
    let terms = BTreeMap::from([("bound".to_string(), bound)]);
    let mut r = TheoremReport::new(
        TheoremId::MdOrder,
        premise,
        md,
        terms,
        Sense::Leq,
        meta(mu1, mu2, n, 1, c_min, Some(kappa)),
    );
    // the comparison ‖Δμ̂‖₂² ≤ (2N+1)‖Δμ̂‖_∞² carried through exactly
    r.secondary.push(SecondaryCheck::new(
        "full-ball",
        premise,
        md,
        bound * ((2.0 * nf + 1.0) / (2.0 * nf)).sqrt(),
        Sense::Leq,
    ));
    r.diagnostics.insert("moment_linf".to_string(), diff.linf_norm());
    Ok(r)
}

/// Matching distance between the ESPRIT recoveries from exact and perturbed
/// moments against `190 M / c_min ‖e‖_∞`.
pub fn check_esprit_stability(mu: &DiscreteMeasure, noise: &MomentVector, n: u32) -> Result<TheoremReport> {
    if mu.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: mu.dim(),
        });
    }
    let freq = FrequencySet::univariate(n);
    if noise.freq_set() != &freq {
        return Err(Error::FrequencySetMismatch);
    }
    let exact = moment_map(mu, &freq)?;
    let perturbed = exact.add(noise)?;
    let m = mu.len();
    let c_min = mu.c_min();
    let e = noise.linf_norm();
    let premise = separation_or_inf(mu.nodes()) >= 2.0 / (n as f64 + 1.0) && e < c_min / 60.0;

    let cfg = EspritConfig::new(n, m);
    let r0 = esprit_recover(&exact, &cfg)?;
    let r1 = esprit_recover(&perturbed, &cfg)?;
    let md = matching_distance(&r0.nodes, &r1.nodes)?;
    let terms = BTreeMap::from([("bound".to_string(), 190.0 * m as f64 / c_min * e)]);
    let mut r = TheoremReport::new(
        TheoremId::Esprit,
        premise,
        md,
        terms,
        Sense::Leq,
        ReportMeta {
            n,
            d: 1,
            m,
            c_min,
            kappa: None,
            seed: None,
        },
    );
    r.diagnostics.extend([
        ("noise_linf".to_string(), e),
        ("md_to_truth".to_string(), matching_distance(&r0.nodes, mu.nodes())?),
        ("gap_ratio_exact".to_string(), r0.gap_ratio),
        ("gap_ratio_perturbed".to_string(), r1.gap_ratio),
    ]);
    Ok(r)
}
