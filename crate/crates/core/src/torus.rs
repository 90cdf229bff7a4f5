//! Geometry on the torus `T^d = (R/Z)^d`.
//!
//! Distances use the wrap-around maximum norm
//! `‖x‖_T = min_{j ∈ Z^d} ‖x + j‖_∞`, which for `d = 1` reduces to the usual
//! circular distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two nodes closer than this are considered to collide.
pub const NODE_EPS: f64 = 1e-12;

/// Reduces a real coordinate into `[0, 1)`.
#[inline]
pub fn canonical(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wrapped absolute value `min_{r ∈ Z} |x + r|`, in `[0, 1/2]`.
#[inline]
pub fn wrap_abs(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// A point of `[0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("torus point needs d >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite torus coordinate".into()));
        }
        Ok(Self {
            coords: coords.into_iter().map(canonical).collect(),
        })
    }

    pub fn scalar(t: f64) -> Self {
        Self {
            coords: vec![canonical(t)],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Shifts the point by `s` (mod 1).
    pub fn translate(&self, s: &[f64]) -> Result<Self> {
        check_dim(self.dim(), s.len())?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(s)
                .map(|(a, b)| canonical(a + b))
                .collect(),
        })
    }

    pub fn distance(&self, other: &TorusPoint) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| wrap_abs(a - b))
            .fold(0.0, f64::max)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Torus norm of a coordinate-wise difference.
pub fn torus_norm(diff: &[f64]) -> f64 {
    diff.iter().map(|&x| wrap_abs(x)).fold(0.0, f64::max)
}

/// Per-coordinate wrapped absolute difference `|t − t'|_T ∈ [0, 1/2]^d`.
pub fn componentwise_torus_diff(t: &TorusPoint, s: &TorusPoint) -> Result<Vec<f64>> {
    check_dim(t.dim(), s.dim())?;
    Ok(t.coords
        .iter()
        .zip(&s.coords)
        .map(|(a, b)| wrap_abs(a - b))
        .collect())
}

/// Ordered collection of pairwise distinct torus points of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    dim: usize,
    points: Vec<TorusPoint>,
}

impl NodeSet {
    pub fn new(points: Vec<TorusPoint>) -> Result<Self> {
        let dim = points
            .first()
            .map(TorusPoint::dim)
            .ok_or_else(|| Error::InvalidParameter("empty node set".into()))?;
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i].distance(&points[j]) <= NODE_EPS {
                    return Err(Error::InvalidParameter(format!(
                        "nodes {j} and {i} collide"
                    )));
                }
            }
        }
        Ok(Self { dim, points })
    }

    /// Builds a node set from raw coordinate rows.
    pub fn from_coords<I, V>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .map(|r| TorusPoint::new(r.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Univariate convenience constructor.
    pub fn from_scalars(ts: &[f64]) -> Result<Self> {
        Self::new(ts.iter().map(|&t| TorusPoint::scalar(t)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &TorusPoint {
        &self.points[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TorusPoint> {
        self.points.iter()
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a TorusPoint;
    type IntoIter = std::slice::Iter<'a, TorusPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Minimal pairwise torus distance of the set.
pub fn separation(y: &NodeSet) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::UndefinedSeparation);
    }
    let mut sep = f64::INFINITY;
    for i in 0..y.len() {
        for j in 0..i {
            sep = sep.min(y.get(i).distance(y.get(j)));
        }
    }
    Ok(sep)
}

/// Separation, or `+∞` for sets with fewer than two nodes.
pub fn separation_or_inf(y: &NodeSet) -> f64 {
    separation(y).unwrap_or(f64::INFINITY)
}

/// Bottleneck assignment between two equal-size node sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckMatching {
    pub value: f64,
    /// `perm[i]` is the index in the second set matched to node `i` of the first.
    pub perm: Vec<usize>,
}

/// Matching distance `min_π max_j ‖t_j − t'_{π(j)}‖_T`.
pub fn matching_distance(y: &NodeSet, z: &NodeSet) -> Result<f64> {
    bottleneck_matching(y, z).map(|m| m.value)
}

/// Exact bottleneck assignment: binary search over the sorted candidate
/// distances with a bipartite perfect-matching feasibility test.
pub fn bottleneck_matching(y: &NodeSet, z: &NodeSet) -> Result<BottleneckMatching> {
    if y.len() != z.len() {
        return Err(Error::IncomparableSets(y.len(), z.len()));
    }
    check_dim(y.dim(), z.dim())?;
    let n = y.len();
    let dist: Vec<Vec<f64>> = y
        .iter()
        .map(|a| z.iter().map(|b| a.distance(b)).collect())
        .collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest candidate is always feasible (complete bipartite graph).
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut best = perfect_matching(&dist, candidates[hi]).expect("complete graph has a matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(&dist, candidates[mid]) {
            Some(p) => {
                best = p;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    if lo == candidates.len() - 1 || best.len() != n {
        best = perfect_matching(&dist, candidates[lo]).expect("threshold is feasible");
    }
    Ok(BottleneckMatching {
        value: candidates[lo],
        perm: best,
    })
}

/// Kuhn's augmenting-path matching on edges with `dist <= threshold`.
fn perfect_matching(dist: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut match_right: Vec<Option<usize>> = vec![None; n];

    fn augment(
        u: usize,
        dist: &[Vec<f64>],
        threshold: f64,
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for v in 0..dist.len() {
            if dist[u][v] <= threshold && !seen[v] {
                seen[v] = true;
                let free = match match_right[v] {
                    None => true,
                    Some(w) => augment(w, dist, threshold, seen, match_right),
                };
                if free {
                    match_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }

    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, dist, threshold, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (v, u) in match_right.iter().enumerate() {
        perm[u.expect("perfect matching")] = v;
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_around_norms() {
        assert!((torus_norm(&[0.1 - 0.9]) - 0.2).abs() < 1e-15);
        assert!((torus_norm(&[0.5, 0.5]) - 0.5).abs() < 1e-15);
        // shifts j ∈ {-1,0,1}^2: (0.95,0.1) -> (-0.05, 0.1)
        assert!((torus_norm(&[0.95, 0.1]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn componentwise_difference() {
        let a = TorusPoint::new(vec![0.9, 0.2]).unwrap();
        let b = TorusPoint::new(vec![0.1, 0.3]).unwrap();
        let d = componentwise_torus_diff(&a, &b).unwrap();
        assert!((d[0] - 0.2).abs() < 1e-15 && (d[1] - 0.1).abs() < 1e-15);
        let o = TorusPoint::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(componentwise_torus_diff(&o, &o).unwrap(), vec![0.0, 0.0]);
        let d = componentwise_torus_diff(&TorusPoint::scalar(0.25), &TorusPoint::scalar(0.75));
        assert_eq!(d.unwrap(), vec![0.5]);
        assert!(matches!(
            componentwise_torus_diff(&a, &TorusPoint::scalar(0.1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonicalization() {
        let p = TorusPoint::new(vec![-0.25, 1.5, -1e-20]).unwrap();
        assert_eq!(p.coords(), &[0.75, 0.5, 0.0]);
    }

    #[test]
    fn separation_examples() {
        let y = NodeSet::from_scalars(&[0.15, 0.2, 0.6, 0.9]).unwrap();
        assert!((separation(&y).unwrap() - 0.05).abs() < 1e-12);
        let y2 = NodeSet::from_scalars(&[0.12, 0.3, 0.65, 0.75]).unwrap();
        assert!((separation(&y2).unwrap() - 0.10).abs() < 1e-12);
        let y3 = NodeSet::from_scalars(&[0.02, 0.98]).unwrap();
        assert!((separation(&y3).unwrap() - 0.04).abs() < 1e-12);
        let single = NodeSet::from_scalars(&[0.3]).unwrap();
        assert_eq!(separation(&single), Err(Error::UndefinedSeparation));
    }

    #[test]
    fn matching_examples() {
        let y = NodeSet::from_scalars(&[0.15, 0.2, 0.6, 0.9]).unwrap();
        assert_eq!(matching_distance(&y, &y).unwrap(), 0.0);
        let y2 = NodeSet::from_scalars(&[0.12, 0.3, 0.65, 0.75]).unwrap();
        assert!((matching_distance(&y, &y2).unwrap() - 0.15).abs() < 1e-12);
        let a = NodeSet::from_scalars(&[0.0, 0.5]).unwrap();
        let b = NodeSet::from_scalars(&[0.1, 0.6]).unwrap();
        assert!((matching_distance(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        let c = NodeSet::from_scalars(&[0.1]).unwrap();
        assert_eq!(matching_distance(&a, &c), Err(Error::IncomparableSets(2, 1)));
    }

    #[test]
    fn colliding_nodes_rejected() {
        assert!(NodeSet::from_scalars(&[0.1, 1.1]).is_err());
        assert!(NodeSet::from_coords(vec![vec![0.1, 0.2], vec![0.3]]).is_err());
    }
}
