use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;

/// A node of either measure, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    First(usize),
    Second(usize),
}

/// Split of the joint node set into matched pairs and isolated nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecomposition {
    /// Indices into the first measure, ascending.
    pub y1: Vec<usize>,
    /// `y2[k] = η(y1[k])`, indices into the second measure.
    pub y2: Vec<usize>,
    /// Every remaining node of either measure.
    pub y3: Vec<NodeRef>,
    /// `‖t − η(t)‖` aligned with `y1`.
    pub distances: Vec<f64>,
}

impl MatchDecomposition {
    pub fn eta(&self, i: usize) -> Option<usize> {
        self.y1.iter().position(|&t| t == i).map(|k| self.y2[k])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.y1.iter().copied().zip(self.y2.iter().copied())
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Pairs `t` of `μ₁` with `s` of `μ₂` when each is the other's only node
/// strictly within `q`; everything else goes to `Y₃`.
pub fn match_and_decompose(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, q: f64) -> Result<MatchDecomposition> {
    if mu1.dim() != mu2.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu1.dim(),
            found: mu2.dim(),
        });
    }
    let (a, b) = (mu1.nodes(), mu2.nodes());
    let close: Vec<Vec<usize>> = a
        .iter()
        .map(|t| (0..b.len()).filter(|&j| t.distance(b.get(j)) < q).collect())
        .collect();
    let mut hits = vec![0usize; b.len()];
    for js in &close {
        for &j in js {
            hits[j] += 1;
        }
    }

    let mut out = MatchDecomposition {
        y1: Vec::new(),
        y2: Vec::new(),
        y3: Vec::new(),
        distances: Vec::new(),
    };
    let mut taken = vec![false; b.len()];
    for (i, js) in close.iter().enumerate() {
        match js.as_slice() {
            [j] if hits[*j] == 1 => {
                out.y1.push(i);
                out.y2.push(*j);
                out.distances.push(a.get(i).distance(b.get(*j)));
                taken[*j] = true;
            }
            _ => out.y3.push(NodeRef::First(i)),
        }
    }
    out.y3
        .extend((0..b.len()).filter(|&j| !taken[j]).map(NodeRef::Second));
    Ok(out)
}
