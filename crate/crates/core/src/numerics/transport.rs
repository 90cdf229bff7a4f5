//! Exact discrete optimal transport on the torus.
//!
//! Successive shortest augmenting paths on the bipartite network
//! `source → supply nodes → demand nodes → sink`, with Dijkstra on reduced
//! costs. All arc costs start nonnegative, so zero initial potentials are
//! feasible and no Bellman-Ford pass is needed.

use crate::error::{Error, Result};
use crate::torus::TorusPoint;

const MAX_AUGMENTATIONS: usize = 100_000;

/// Optimal plan together with dual potentials.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub cost: f64,
    /// `(source index, sink index, mass)` with positive mass.
    pub plan: Vec<(usize, usize, f64)>,
    /// `u_i` on sources and `v_j` on sinks with `u_i − v_j ≤ d(x_i, y_j)`,
    /// tight on the support of the plan.
    pub source_potential: Vec<f64>,
    pub sink_potential: Vec<f64>,
}

impl TransportPlan {
    /// The 1-Lipschitz extension `F(x) = min_j (v_j + ‖x − y_j‖_T)` of the
    /// dual potential; it satisfies `∫F d(a − b) = cost`.
    pub fn lipschitz_potential(&self, sinks: &[(TorusPoint, f64)], x: &TorusPoint) -> f64 {
        sinks
            .iter()
            .zip(&self.sink_potential)
            .map(|((y, _), v)| v + x.distance(y))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Minimum-cost transport between weighted point sets with equal total mass.
pub fn min_cost_transport(
    sources: &[(TorusPoint, f64)],
    sinks: &[(TorusPoint, f64)],
) -> Result<TransportPlan> {
    if sources.iter().chain(sinks).any(|(_, m)| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidParameter("transport masses must be positive".into()));
    }
    let supply: f64 = sources.iter().map(|(_, m)| m).sum();
    let demand: f64 = sinks.iter().map(|(_, m)| m).sum();
    if (supply - demand).abs() > 1e-10 * supply.max(demand).max(1.0) {
        return Err(Error::UnbalancedProblem {
            source_mass: supply,
            sink_mass: demand,
        });
    }
    let (n, m) = (sources.len(), sinks.len());
    if n == 0 || m == 0 {
        return Ok(TransportPlan {
            cost: 0.0,
            plan: Vec::new(),
            source_potential: vec![0.0; n],
            sink_potential: vec![0.0; m],
        });
    }
    let cost: Vec<Vec<f64>> = sources
        .iter()
        .map(|(x, _)| sinks.iter().map(|(y, _)| x.distance(y)).collect())
        .collect();

    // node ids: 0 = super source, 1..=n sources, n+1..=n+m sinks, n+m+1 = super sink
    let nv = n + m + 2;
    let (src, snk) = (0usize, n + m + 1);
    let mut supply_left: Vec<f64> = sources.iter().map(|(_, a)| *a).collect();
    let mut demand_left: Vec<f64> = sinks.iter().map(|(_, b)| *b).collect();
    let mut flow = vec![vec![0.0f64; m]; n];
    let mut pot = vec![0.0f64; nv];
    let total = supply.min(demand);
    let tol = 1e-14 * total.max(1.0);

    let mut remaining = total;
    let mut rounds = 0;
    while remaining > tol {
        rounds += 1;
        if rounds > MAX_AUGMENTATIONS {
            return Err(Error::NumericalFailure("transport solver did not terminate".into()));
        }
        // dense Dijkstra on reduced costs
        let mut dist = vec![f64::INFINITY; nv];
        let mut prev = vec![usize::MAX; nv];
        let mut done = vec![false; nv];
        dist[src] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for (i, (&d, &f)) in dist.iter().zip(&done).enumerate() {
                if !f && d < best {
                    best = d;
                    u = i;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            let relax = |v: usize, c: f64, dist: &mut Vec<f64>, prev: &mut Vec<usize>| {
                let rc = (c + pot[u] - pot[v]).max(0.0);
                if dist[u] + rc < dist[v] {
                    dist[v] = dist[u] + rc;
                    prev[v] = u;
                }
            };
            if u == src {
                for i in 0..n {
                    if supply_left[i] > tol {
                        relax(1 + i, 0.0, &mut dist, &mut prev);
                    }
                }
            } else if u <= n {
                let i = u - 1;
                for j in 0..m {
                    relax(n + 1 + j, cost[i][j], &mut dist, &mut prev);
                }
            } else if u < snk {
                let j = u - n - 1;
                for i in 0..n {
                    if flow[i][j] > tol {
                        relax(1 + i, -cost[i][j], &mut dist, &mut prev);
                    }
                }
                if demand_left[j] > tol {
                    relax(snk, 0.0, &mut dist, &mut prev);
                }
            }
        }
        if !dist[snk].is_finite() {
            break;
        }
        let reach_max = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for (p, d) in pot.iter_mut().zip(&dist) {
            *p += if d.is_finite() { *d } else { reach_max };
        }

        // bottleneck along the path
        let mut path = vec![snk];
        let mut v = snk;
        while v != src {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        let mut delta = f64::INFINITY;
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == src {
                delta = delta.min(supply_left[b - 1]);
            } else if b == snk {
                delta = delta.min(demand_left[a - n - 1]);
            } else if a > n {
                delta = delta.min(flow[b - 1][a - n - 1]);
            }
        }
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == src {
                supply_left[b - 1] -= delta;
            } else if b == snk {
                demand_left[a - n - 1] -= delta;
            } else if a <= n {
                flow[a - 1][b - n - 1] += delta;
            } else {
                flow[b - 1][a - n - 1] -= delta;
            }
        }
        remaining -= delta;
    }

    let mut plan = Vec::new();
    let mut total_cost = 0.0;
    for (i, row) in flow.iter().enumerate() {
        for (j, &f) in row.iter().enumerate() {
            if f > tol {
                plan.push((i, j, f));
                total_cost += f * cost[i][j];
            }
        }
    }
    Ok(TransportPlan {
        cost: total_cost,
        plan,
        source_potential: (0..n).map(|i| -pot[1 + i]).collect(),
        sink_potential: (0..m).map(|j| -pot[n + 1 + j]).collect(),
    })
}
