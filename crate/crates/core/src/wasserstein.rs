//! 1-Wasserstein distance between complex probability-like measures,
//! `W₁(μ₁, μ₂) = sup_{Lip f ≤ 1} |∫ f d(μ₁ − μ₂)|`.
//!
//! For `ν = μ₁ − μ₂` the set `K = {(Re ∫f dν, Im ∫f dν) : Lip f ≤ 1}` is a
//! convex polygon symmetric about the origin, so
//! `W₁ = max_{z∈K} |z| = max_θ h(θ)` with the support function
//! `h(θ) = sup_f ∫ f d Re(e^{−iθ} ν)`. Each `h(θ)` is a real
//! Kantorovich-Rubinstein problem, solved exactly as a transport problem
//! between the positive and negative parts (`ν` has zero total mass).
//!
//! The optimal dual potential at `θ` yields a point `z_θ ∈ K`, so `max |z_θ|`
//! is a certified lower bound. The half-planes `⟨z, u_θ⟩ ≤ h(θ)` enclose `K`,
//! and their intersection gives a certified upper bound; angles are added
//! until the two agree.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::numerics::min_cost_transport;
use crate::torus::{TorusPoint, NODE_EPS};

/// Uniform angles scanned on `[0, π)` before refinement.
pub const DEFAULT_ANGLES: usize = 360;

/// Atoms of the difference measure below this modulus are dropped.
pub const ATOM_EPS: f64 = 1e-13;

const REL_TOL: f64 = 1e-10;
const MAX_EXTRA_ANGLES: usize = 5000;

/// A weighted point of a complex discrete measure.
pub type Atom = (TorusPoint, Complex64);

/// One transported mass at the maximizing angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub from: TorusPoint,
    pub to: TorusPoint,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct W1Result {
    /// Certified lower bound, equal to `W₁` up to `gap`.
    pub value: f64,
    /// Certified upper bound from the supporting half-planes.
    pub upper_bound: f64,
    /// `(upper_bound − value) / value` (zero when both vanish).
    pub gap: f64,
    /// Angle in `[0, π)` at which the Kantorovich-Rubinstein value equals `value`.
    pub argmax_angle: f64,
    /// Optimal plan of the real problem at `argmax_angle`.
    pub plan: Vec<PlanEntry>,
    /// Every evaluated `(θ, h(θ))`, sorted by angle.
    pub grid_profile: Vec<(f64, f64)>,
}

/// Atoms of `μ₁ − μ₂`, merged on coinciding nodes, tiny atoms removed.
pub fn difference_atoms(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<Vec<Atom>> {
    if mu1.dim() != mu2.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu1.dim(),
            found: mu2.dim(),
        });
    }
    let raw = mu1
        .nodes()
        .iter()
        .cloned()
        .zip(mu1.weights().iter().copied())
        .chain(mu2.nodes().iter().cloned().zip(mu2.weights().iter().map(|w| -w)));
    let mut atoms = aggregate(raw);
    atoms.retain(|(_, w)| w.norm() >= ATOM_EPS);
    Ok(atoms)
}

fn aggregate(atoms: impl IntoIterator<Item = Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for (t, w) in atoms {
        match out.iter_mut().find(|(s, _)| s.distance(&t) <= NODE_EPS) {
            Some((_, acc)) => *acc += w,
            None => out.push((t, w)),
        }
    }
    out
}

/// `|ν|(T^d)`: sum of moduli after merging atoms on the same node.
pub fn total_variation(atoms: &[Atom]) -> f64 {
    aggregate(atoms.iter().cloned()).iter().map(|(_, w)| w.norm()).sum()
}

/// `|μ₁ − μ₂|(T^d) / √2`.
pub fn w1_upper_bound_tv(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<f64> {
    Ok(total_variation(&difference_atoms(mu1, mu2)?) * FRAC_1_SQRT_2)
}

/// Matched-pair transport estimate
/// `√M [ (Σ (|c_t|² + |c'_{η(t)}|²) ‖t − η(t)‖²)^{1/2} + (1/√2)(Σ |c_t − c'_{η(t)}|²)^{1/2} ]`,
/// where `eta[i]` is the index in `μ₂` paired with node `i` of `μ₁`.
pub fn w1_upper_bound_matched(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    eta: &[usize],
) -> Result<f64> {
    let m = mu1.len();
    if mu2.len() != m || eta.len() != m {
        return Err(Error::NonBijective);
    }
    let mut seen = vec![false; m];
    for &j in eta {
        if j >= m || seen[j] {
            return Err(Error::NonBijective);
        }
        seen[j] = true;
    }
    let (mut nodes, mut weights) = (0.0, 0.0);
    for (i, &j) in eta.iter().enumerate() {
        let (c1, c2) = (mu1.weights()[i], mu2.weights()[j]);
        let dist = mu1.nodes().get(i).distance(mu2.nodes().get(j));
        nodes += (c1.norm_sqr() + c2.norm_sqr()) * dist * dist;
        weights += (c1 - c2).norm_sqr();
    }
    Ok((m as f64).sqrt() * (nodes.sqrt() + FRAC_1_SQRT_2 * weights.sqrt()))
}

/// `W₁(μ₁, μ₂)` with `angles` initial directions.
pub fn w1_complex(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, angles: usize) -> Result<W1Result> {
    w1_of_difference(&difference_atoms(mu1, mu2)?, angles)
}

/// Evaluation of the real problem at one angle.
struct Probe {
    theta: f64,
    h: f64,
    z: (f64, f64),
}

/// Kantorovich-Rubinstein value of `Re(e^{−iθ} ν)` and the point `z_θ ∈ K`.
fn probe(atoms: &[Atom], theta: f64) -> Result<(Probe, Vec<PlanEntry>)> {
    let rot = Complex64::from_polar(1.0, -theta);
    let scale = atoms.iter().map(|(_, w)| w.norm()).fold(0.0, f64::max);
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (t, w) in atoms {
        let r = (rot * w).re;
        if r > 1e-15 * scale {
            sources.push((t.clone(), r));
        } else if r < -1e-15 * scale {
            sinks.push((t.clone(), -r));
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return Ok((Probe { theta, h: 0.0, z: (0.0, 0.0) }, Vec::new()));
    }
    // rebalance the roundoff-level mass mismatch on the larger side
    let (sa, sb): (f64, f64) = (sources.iter().map(|s| s.1).sum(), sinks.iter().map(|s| s.1).sum());
    if sa > sb {
        sources.iter_mut().for_each(|s| s.1 *= sb / sa);
    } else {
        sinks.iter_mut().for_each(|s| s.1 *= sa / sb);
    }
    let tp = min_cost_transport(&sources, &sinks)?;
    let mut z = (0.0, 0.0);
    for (t, w) in atoms {
        let f = tp.lipschitz_potential(&sinks, t);
        z.0 += f * w.re;
        z.1 += f * w.im;
    }
    let plan = tp
        .plan
        .iter()
        .map(|&(i, j, m)| PlanEntry {
            from: sources[i].0.clone(),
            to: sinks[j].0.clone(),
            mass: m,
        })
        .collect();
    Ok((Probe { theta, h: tp.cost, z }, plan))
}

/// Largest `|z|` over `{⟨z,u_a⟩ ≤ h_a, ⟨z,u_b⟩ ≤ h_b}` within the sector between the two directions.
fn sector_bound(a: &Probe, b: &Probe) -> f64 {
    let delta = b.theta - a.theta;
    if delta >= PI / 2.0 {
        return f64::INFINITY;
    }
    let cd = delta.cos();
    let ra = a.h.min(b.h / cd);
    let rb = b.h.min(a.h / cd);
    let mut best = ra.max(rb);
    let (ua, ub) = (a.theta.sin_cos(), b.theta.sin_cos());
    let (ua, ub) = ((ua.1, ua.0), (ub.1, ub.0));
    let det = ua.0 * ub.1 - ua.1 * ub.0;
    if det.abs() > 0.0 {
        let vx = (a.h * ub.1 - b.h * ua.1) / det;
        let vy = (ua.0 * b.h - ub.0 * a.h) / det;
        let inside = ua.0 * vy - ua.1 * vx >= 0.0 && vx * ub.1 - vy * ub.0 >= 0.0;
        if inside {
            best = best.max(vx.hypot(vy));
        }
    }
    best
}

/// `W₁` of a zero-mass complex atomic measure `ν`.
pub fn w1_of_difference(atoms: &[Atom], angles: usize) -> Result<W1Result> {
    let angles = angles.max(1);
    if atoms.is_empty() {
        return Ok(W1Result {
            value: 0.0,
            upper_bound: 0.0,
            gap: 0.0,
            argmax_angle: 0.0,
            plan: Vec::new(),
            grid_profile: (0..angles).map(|i| (PI * i as f64 / angles as f64, 0.0)).collect(),
        });
    }
    let mass: Complex64 = atoms.iter().map(|a| a.1).sum();
    let scale: f64 = atoms.iter().map(|a| a.1.norm()).sum();
    if mass.norm() > 1e-9 * scale.max(1.0) {
        return Err(Error::InvalidMeasure("difference measure must have zero mass".into()));
    }

    let mut probes: Vec<Probe> = Vec::with_capacity(angles + 64);
    for i in 0..angles {
        probes.push(probe(atoms, PI * i as f64 / angles as f64)?.0);
    }

    // golden-section search on h within one grid step of the incumbent
    let step = PI / angles as f64;
    let best_idx = (0..probes.len()).max_by(|&i, &j| probes[i].h.total_cmp(&probes[j].h)).unwrap_or(0);
    let (mut lo, mut hi) = (probes[best_idx].theta - step, probes[best_idx].theta + step);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let mut f1 = probe(atoms, x1)?.0;
    let mut f2 = probe(atoms, x2)?.0;
    while hi - lo > 1e-9 * PI {
        if f1.h >= f2.h {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = probe(atoms, x1)?.0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = probe(atoms, x2)?.0;
        }
    }
    for p in [f1, f2] {
        probes.push(Probe {
            theta: p.theta.rem_euclid(PI),
            ..p
        });
    }

    // normalise to [0, π), using h(θ + π) = h(θ) and z_{θ+π} = −z_θ
    probes.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    probes.dedup_by(|a, b| (a.theta - b.theta).abs() < 1e-15);

    let lower = |ps: &[Probe]| ps.iter().map(|p| p.z.0.hypot(p.z.1)).fold(0.0, f64::max);
    let mut value = lower(&probes);
    let mut upper;
    let mut extra = 0;
    loop {
        let n = probes.len();
        let mut worst = (f64::NEG_INFINITY, 0usize);
        for i in 0..n {
            let b = if i + 1 < n {
                sector_bound(&probes[i], &probes[i + 1])
            } else {
                let wrap = Probe {
                    theta: probes[0].theta + PI,
                    h: probes[0].h,
                    z: (-probes[0].z.0, -probes[0].z.1),
                };
                sector_bound(&probes[i], &wrap)
            };
            if b > worst.0 {
                worst = (b, i);
            }
        }
        upper = worst.0.max(value);
        if upper - value <= REL_TOL * value || upper == 0.0 || extra >= MAX_EXTRA_ANGLES {
            break;
        }
        let i = worst.1;
        let next = if i + 1 < n { probes[i + 1].theta } else { probes[0].theta + PI };
        let mid = 0.5 * (probes[i].theta + next);
        let p = probe(atoms, mid.rem_euclid(PI))?.0;
        extra += 1;
        value = value.max(p.z.0.hypot(p.z.1));
        let pos = probes.partition_point(|q| q.theta < p.theta);
        probes.insert(pos, p);
    }

    // the farthest point of K is attained in its own direction
    let star = probes
        .iter()
        .max_by(|a, b| a.z.0.hypot(a.z.1).total_cmp(&b.z.0.hypot(b.z.1)))
        .expect("nonempty");
    let argmax_angle = if value > 0.0 { star.z.1.atan2(star.z.0).rem_euclid(PI) } else { 0.0 };
    let argmax_angle = if argmax_angle >= PI { 0.0 } else { argmax_angle };
    let (at_star, plan) = probe(atoms, argmax_angle)?;
    let pos = probes.partition_point(|q| q.theta < at_star.theta);
    if probes.get(pos).is_none_or(|q| q.theta != at_star.theta) {
        probes.insert(pos, at_star);
    }
    let gap = if value > 0.0 { (upper - value) / value } else { 0.0 };
    Ok(W1Result {
        value,
        upper_bound: upper,
        gap,
        argmax_angle,
        plan,
        grid_profile: probes.iter().map(|p| (p.theta, p.h)).collect(),
    })
}
