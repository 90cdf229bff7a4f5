//! Discrete complex measures on the torus and their trigonometric moments.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{self, NodeSet, TorusPoint};

/// Tolerance for the unit-mass constraint `Σ c_j = 1`.
pub const MASS_EPS: f64 = 1e-10;

pub const SAMPLING_BUDGET: usize = 100_000;

/// Norm used to cut out a frequency ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "inf")]
    Linf,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "l2" | "L2" => Ok(NormKind::L2),
            "inf" | "linf" | "Linf" | "∞" => Ok(NormKind::Linf),
            other => Err(Error::Parse(format!("unknown norm '{other}' (expected 2 or inf)"))),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormKind::L2 => f.write_str("2"),
            NormKind::Linf => f.write_str("inf"),
        }
    }
}

/// The integer frequencies `{k ∈ Z^d : ‖k‖_p ≤ N}` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencySet {
    d: usize,
    n: u32,
    p: NormKind,
    members: Vec<Vec<i64>>,
}

impl FrequencySet {
    pub fn new(d: usize, n: u32, p: NormKind) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("frequency set needs d >= 1".into()));
        }
        let ni = n as i64;
        let span = (2 * ni + 1) as u128;
        if span.checked_pow(d as u32).is_none_or(|c| c > 50_000_000) {
            return Err(Error::InvalidParameter(format!(
                "frequency cube [-{n},{n}]^{d} is too large"
            )));
        }
        let mut members = Vec::new();
        let mut k = vec![-ni; d];
        loop {
            if Self::norm_within(&k, ni, p) {
                members.push(k.clone());
            }
            // odometer increment, last coordinate fastest => lexicographic order
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(Self { d, n, p, members });
                }
                i -= 1;
                if k[i] < ni {
                    k[i] += 1;
                    break;
                }
                k[i] = -ni;
            }
        }
    }

    /// Univariate frequencies `-N..=N`.
    pub fn univariate(n: u32) -> Self {
        Self::new(1, n, NormKind::Linf).expect("valid univariate set")
    }

    fn norm_within(k: &[i64], n: i64, p: NormKind) -> bool {
        match p {
            NormKind::L2 => k.iter().map(|x| x * x).sum::<i64>() <= n * n,
            NormKind::Linf => k.iter().all(|x| x.abs() <= n),
        }
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.d && Self::norm_within(k, self.n as i64, self.p)
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        self.members.binary_search_by(|m| m.as_slice().cmp(k)).ok()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn norm(&self) -> NormKind {
        self.p
    }

    pub fn members(&self) -> &[Vec<i64>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Moment values indexed by the members of a [`FrequencySet`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    freq: FrequencySet,
    values: Vec<Complex64>,
}

impl MomentVector {
    pub fn new(freq: FrequencySet, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != freq.len() {
            return Err(Error::InvalidParameter(format!(
                "{} moment values for {} frequencies",
                values.len(),
                freq.len()
            )));
        }
        Ok(Self { freq, values })
    }

    pub fn freq_set(&self) -> &FrequencySet {
        &self.freq
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, k: &[i64]) -> Option<Complex64> {
        self.freq.index_of(k).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.freq
            .members
            .iter()
            .map(Vec::as_slice)
            .zip(self.values.iter().copied())
    }

    fn check_same(&self, other: &MomentVector) -> Result<()> {
        if self.freq != other.freq {
            return Err(Error::FrequencySetMismatch);
        }
        Ok(())
    }

    /// Entrywise difference `self − other`.
    pub fn sub(&self, other: &MomentVector) -> Result<MomentVector> {
        self.check_same(other)?;
        Ok(MomentVector {
            freq: self.freq.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Entrywise sum `self + e`.
    pub fn add(&self, e: &MomentVector) -> Result<MomentVector> {
        self.check_same(e)?;
        Ok(MomentVector {
            freq: self.freq.clone(),
            values: self.values.iter().zip(&e.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `‖a − b‖₂` over the shared frequency set.
pub fn moment_l2_distance(a: &MomentVector, b: &MomentVector) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm())
}

/// `‖a − b‖_∞` over the shared frequency set.
pub fn moment_linf_distance(a: &MomentVector, b: &MomentVector) -> Result<f64> {
    Ok(a.sub(b)?.linf_norm())
}

/// `μ = Σ c_j δ_{t_j}` with complex weights of unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: NodeSet,
    weights: Vec<Complex64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: NodeSet, weights: Vec<Complex64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(j) = weights.iter().position(|w| !(w.norm() > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("weight {j} is zero or non-finite")));
        }
        let mass: Complex64 = weights.iter().sum();
        if (mass - 1.0).norm() > MASS_EPS {
            return Err(Error::InvalidMeasure(format!(
                "total mass {}{:+}i differs from 1",
                mass.re, mass.im
            )));
        }
        Ok(Self { nodes, weights })
    }

    /// The Dirac measure `δ_t`.
    pub fn dirac(t: TorusPoint) -> Self {
        Self {
            nodes: NodeSet::new(vec![t]).expect("single node"),
            weights: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Smallest weight modulus.
    pub fn c_min(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Shifts every node by `s` (mod 1).
    pub fn translate(&self, s: &[f64]) -> Result<Self> {
        let pts = self
            .nodes
            .iter()
            .map(|p| p.translate(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nodes: NodeSet::new(pts)?,
            weights: self.weights.clone(),
        })
    }

    /// Single moment `μ̂(k) = Σ_j c_j e^{−2πi k·t_j}`.
    pub fn moment(&self, k: &[i64]) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, c)| c * unit_phase(k, t.coords()))
            .collect();
        pairwise_sum(&terms)
    }
}

/// `e^{−2πi k·t}` with each product `k_l t_l` reduced mod 1 before the exponential.
pub fn unit_phase(k: &[i64], t: &[f64]) -> Complex64 {
    let mut phase = 0.0;
    for (&kl, &tl) in k.iter().zip(t) {
        let p = kl as f64 * tl;
        phase += p - p.round();
    }
    phase -= phase.round();
    let (s, c) = (-2.0 * PI * phase).sin_cos();
    Complex64::new(c, s)
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Evaluates `μ̂(k)` for every `k` of the frequency set.
pub fn moment_map(mu: &DiscreteMeasure, freq: &FrequencySet) -> Result<MomentVector> {
    if mu.dim() != freq.dim() {
        return Err(Error::DimensionMismatch {
            expected: freq.dim(),
            found: mu.dim(),
        });
    }
    let values = freq.members().iter().map(|k| mu.moment(k)).collect();
    MomentVector::new(freq.clone(), values)
}

/// Parameters of the class `M_{c_min}(q)` together with its moment ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityClass {
    pub c_min: f64,
    pub q: f64,
    pub d: usize,
    pub n: u32,
    pub p: NormKind,
}

impl AdmissibilityClass {
    pub fn new(c_min: f64, q: f64, d: usize, n: u32, p: NormKind) -> Result<Self> {
        if !(c_min > 0.0) || !(q > 0.0) || d == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "admissibility class needs c_min > 0, q > 0, d >= 1, N >= 1 (got {c_min}, {q}, {d}, {n})"
            )));
        }
        Ok(Self { c_min, q, d, n, p })
    }

    pub fn frequency_set(&self) -> Result<FrequencySet> {
        FrequencySet::new(self.d, self.n, self.p)
    }
}

/// First violated admissibility constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    Dimension,
    Mass,
    MinWeight,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub ok: bool,
    pub failing: Option<Constraint>,
}

/// Checks `Σc = 1`, `|c_j| ≥ c_min` and `sep ≥ q`, naming the first failure.
pub fn check_admissible(mu: &DiscreteMeasure, cls: &AdmissibilityClass) -> AdmissibilityReport {
    let fail = |c| AdmissibilityReport {
        ok: false,
        failing: Some(c),
    };
    if mu.dim() != cls.d {
        return fail(Constraint::Dimension);
    }
    let mass: Complex64 = mu.weights().iter().sum();
    if (mass - 1.0).norm() > MASS_EPS {
        return fail(Constraint::Mass);
    }
    if mu.c_min() < cls.c_min {
        return fail(Constraint::MinWeight);
    }
    if torus::separation_or_inf(mu.nodes()) < cls.q {
        return fail(Constraint::Separation);
    }
    AdmissibilityReport {
        ok: true,
        failing: None,
    }
}

/// Draws a measure in `cls` with `m` nodes and a jittered companion.
///
/// The companion moves every node coordinate by at most `delta·q` and every
/// weight component by at most `delta·c_min` before renormalising to unit
/// mass. Pairs where either measure leaves the class are redrawn.
pub fn random_admissible_pair(
    cls: &AdmissibilityClass,
    m: usize,
    seed: u64,
    delta: f64,
) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter("jitter must be nonnegative".into()));
    }
    if m as f64 * cls.q.powi(cls.d as i32) > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "{m} nodes with separation {} do not fit on T^{}",
            cls.q, cls.d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds = 0usize;
    while rounds < SAMPLING_BUDGET {
        let Some(base) = draw_measure(cls, m, &mut rng, &mut rounds) else {
            break;
        };
        if delta == 0.0 {
            return Ok((base.clone(), base));
        }
        // a few jitter attempts per base measure before drawing a new one
        for _ in 0..32 {
            rounds += 1;
            if let Some(other) = jitter(&base, cls, delta, &mut rng) {
                return Ok((base, other));
            }
        }
    }
    Err(Error::SamplingBudgetExhausted(SAMPLING_BUDGET))
}

/// Draws a single admissible measure with `m` nodes.
pub fn random_admissible(cls: &AdmissibilityClass, m: usize, seed: u64) -> Result<DiscreteMeasure> {
    random_admissible_pair(cls, m, seed, 0.0).map(|(a, _)| a)
}

fn draw_measure(
    cls: &AdmissibilityClass,
    m: usize,
    rng: &mut ChaCha8Rng,
    rounds: &mut usize,
) -> Option<DiscreteMeasure> {
    let weights = loop {
        *rounds += 1;
        if *rounds > SAMPLING_BUDGET {
            return None;
        }
        let raw: Vec<Complex64> = (0..m)
            .map(|_| {
                let r = rng.random_range(1.0..=2.0);
                let th = rng.random_range(-PI / 3.0..=PI / 3.0);
                Complex64::from_polar(r, th)
            })
            .collect();
        let sum: Complex64 = raw.iter().sum();
        if sum.norm() < 1e-6 {
            continue;
        }
        let w: Vec<Complex64> = raw.iter().map(|x| x / sum).collect();
        if w.iter().all(|c| c.norm() >= cls.c_min) {
            break w;
        }
    };

    let mut pts: Vec<TorusPoint> = Vec::with_capacity(m);
    let mut stalled = 0usize;
    while pts.len() < m {
        *rounds += 1;
        if *rounds > SAMPLING_BUDGET {
            return None;
        }
        let cand = TorusPoint::new((0..cls.d).map(|_| rng.random::<f64>()).collect())
            .expect("finite coordinates");
        if pts.iter().all(|p| p.distance(&cand) >= cls.q) {
            pts.push(cand);
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 1000 {
                pts.clear();
                stalled = 0;
            }
        }
    }
    let mu = DiscreteMeasure::new(NodeSet::new(pts).ok()?, weights).ok()?;
    check_admissible(&mu, cls).ok.then_some(mu)
}

fn jitter(
    base: &DiscreteMeasure,
    cls: &AdmissibilityClass,
    delta: f64,
    rng: &mut ChaCha8Rng,
) -> Option<DiscreteMeasure> {
    let r = delta * cls.q;
    let pts: Vec<TorusPoint> = base
        .nodes()
        .iter()
        .map(|t| {
            let s: Vec<f64> = (0..cls.d).map(|_| rng.random_range(-r..=r)).collect();
            t.translate(&s).expect("same dimension")
        })
        .collect();
    let a = delta * cls.c_min;
    let raw: Vec<Complex64> = base
        .weights()
        .iter()
        .map(|c| c + Complex64::new(rng.random_range(-a..=a), rng.random_range(-a..=a)))
        .collect();
    let sum: Complex64 = raw.iter().sum();
    if sum.norm() < 1e-6 {
        return None;
    }
    let w = raw.iter().map(|x| x / sum).collect();
    let mu = DiscreteMeasure::new(NodeSet::new(pts).ok()?, w).ok()?;
    check_admissible(&mu, cls).ok.then_some(mu)
}
