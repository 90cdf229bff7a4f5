use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cluster::{check_pair_cluster_bound, random_pair_cluster};
use super::report::{TheoremId, TheoremReport};
use super::theorems::{
    check_esprit_stability, check_global_w1, check_local, check_md_order, LocalSpec,
};
use crate::error::{Error, Result};
use crate::measure::{random_admissible, random_admissible_pair, AdmissibilityClass, FrequencySet, MomentVector, NormKind};
use num_complex::Complex64;

/// Batch parameters; every trial is a pure function of `(config, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarloConfig {
    pub theorem: TheoremId,
    pub trials: usize,
    pub seed_start: u64,
    pub n: u32,
    pub d: usize,
    /// Node counts are drawn from `1..=m_max`.
    pub m_max: usize,
    pub c_min: f64,
    pub kappa: f64,
    /// Log-uniform jitter range.
    pub jitter_min: f64,
    pub jitter_max: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self::for_theorem(TheoremId::Univariate)
    }
}

impl MonteCarloConfig {
    pub fn for_theorem(theorem: TheoremId) -> Self {
        let (n, d, m_max, trials) = match theorem {
            TheoremId::Univariate | TheoremId::Diederichs1d | TheoremId::MdOrder | TheoremId::Esprit => (32, 1, 6, 500),
            TheoremId::TwoDimL2 | TheoremId::TwoDimLinf => (16, 2, 4, 500),
            TheoremId::HighDim => (8, 3, 3, 500),
            TheoremId::GlobalW1 => (16, 2, 4, 200),
            TheoremId::VandermondePairs => (16, 2, 6, 100),
        };
        Self {
            theorem,
            trials,
            seed_start: 0,
            n,
            d,
            m_max,
            c_min: 0.05,
            kappa: (5.0f64 / 3.0).sqrt(),
            jitter_min: 1e-4,
            jitter_max: 0.3,
        }
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.trials as u64).map(move |i| self.seed_start + i)
    }

    fn validate(&self) -> Result<()> {
        if self.m_max == 0 || !(self.c_min > 0.0) {
            return Err(Error::InvalidParameter("m_max and c_min must be positive".into()));
        }
        if !(0.0 < self.jitter_min && self.jitter_min <= self.jitter_max) {
            return Err(Error::InvalidParameter(format!(
                "jitter range [{}, {}] is empty",
                self.jitter_min, self.jitter_max
            )));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn local_spec(cfg: &MonteCarloConfig) -> Result<Option<LocalSpec>> {
    Ok(match cfg.theorem {
        TheoremId::Univariate => Some(LocalSpec::univariate(cfg.n, cfg.kappa)?),
        TheoremId::Diederichs1d => Some(LocalSpec::diederichs_1d(cfg.n)),
        TheoremId::TwoDimL2 => Some(LocalSpec::two_dim_l2(cfg.n)),
        TheoremId::TwoDimLinf => Some(LocalSpec::two_dim_linf(cfg.n)),
        TheoremId::HighDim => Some(LocalSpec::high_dim(cfg.n, cfg.d)?),
        _ => None,
    })
}

/// One seeded trial; the drawn jitter is recorded as diagnostic `jitter`.
pub fn run_trial(cfg: &MonteCarloConfig, seed: u64) -> Result<TheoremReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=cfg.m_max);
    let jitter = log_uniform(&mut rng, cfg.jitter_min, cfg.jitter_max);
    let sub_seed: u64 = rng.random();

    let mut report = if let Some(spec) = local_spec(cfg)? {
        let cls = AdmissibilityClass::new(cfg.c_min, spec.sep, spec.d, spec.n, spec.norm)?;
        let (a, b) = random_admissible_pair(&cls, m, sub_seed, jitter)?;
        check_local(&spec, &a, &b)?
    } else {
        match cfg.theorem {
            TheoremId::GlobalW1 => {
                let sep = 2.0 * (cfg.d as f64).sqrt() / cfg.n as f64;
                let cls = AdmissibilityClass::new(cfg.c_min, sep, cfg.d, cfg.n, NormKind::L2)?;
                let (a, b) = random_admissible_pair(&cls, m, sub_seed, jitter)?;
                check_global_w1(&a, &b, cfg.n, cfg.d, cfg.m_max)?
            }
            TheoremId::MdOrder => {
                let spec = LocalSpec::univariate(cfg.n, (5.0f64 / 3.0).sqrt())?;
                let cls = AdmissibilityClass::new(cfg.c_min, spec.sep, 1, cfg.n, NormKind::L2)?;
                let (a, b) = random_admissible_pair(&cls, m, sub_seed, jitter)?;
                check_md_order(&a, &b, cfg.n)?
            }
            TheoremId::Esprit => {
                let sep = 2.0 / (cfg.n as f64 + 1.0);
                let cls = AdmissibilityClass::new(cfg.c_min, sep, 1, cfg.n, NormKind::L2)?;
                let mu = random_admissible(&cls, m, sub_seed)?;
                // noise level relative to the c_min/60 gate
                let level = jitter / cfg.jitter_max * mu.c_min() / 60.0;
                let freq = FrequencySet::univariate(cfg.n);
                let noise = (0..freq.len())
                    .map(|_| Complex64::from_polar(level * rng.random::<f64>(), rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
                    .collect();
                check_esprit_stability(&mu, &MomentVector::new(freq, noise)?, cfg.n)?
            }
            TheoremId::VandermondePairs => {
                let q = (cfg.d as f64).sqrt() / cfg.n as f64;
                let tau = log_uniform(&mut rng, 0.01, 0.9 * (cfg.d as f64).sqrt()) / cfg.n as f64;
                let pairs = rng.random_range(1..=(cfg.m_max / 2).max(1));
                let singles = rng.random_range(0..=1usize);
                debug_assert!(tau < q);
                let y = random_pair_cluster(cfg.d, cfg.n, pairs, singles, tau, sub_seed)?;
                check_pair_cluster_bound(&y, cfg.n, cfg.d)?
            }
            _ => unreachable!("local theorems handled above"),
        }
    };
    report.diagnostics.insert("jitter".to_string(), jitter);
    Ok(report.with_seed(seed))
}

/// Runs all trials in parallel; reports come back in seed order.
pub fn run_monte_carlo(cfg: &MonteCarloConfig) -> Result<Vec<TheoremReport>> {
    cfg.validate()?;
    let seeds: Vec<u64> = cfg.seeds().collect();
    seeds.into_par_iter().map(|s| run_trial(cfg, s)).collect()
}

/// Aggregate counts over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub premise_holding: usize,
    pub violations: usize,
    /// Smallest margin over premise-holding trials (`+∞` if none).
    pub min_margin: f64,
    /// Seeds of violating trials.
    pub violating_seeds: Vec<u64>,
}

pub fn summarize(reports: &[TheoremReport]) -> Summary {
    let held: Vec<&TheoremReport> = reports.iter().filter(|r| r.premise_holds).collect();
    let bad: Vec<&TheoremReport> = reports.iter().filter(|r| !r.passes()).collect();
    Summary {
        trials: reports.len(),
        premise_holding: held.len(),
        violations: bad.len(),
        min_margin: held.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
        violating_seeds: bad.iter().filter_map(|r| r.meta.seed).collect(),
    }
}
