//! File formats: measure JSON, moment CSV and batch reports.
//!
//! A measure is stored as `{"d": 2, "nodes": [[x, y], ...], "weights": [[re, im], ...]}`.
//! Moments are CSV with header `k_1,...,k_d,re,im`. Floats in CSV use 17
//! significant digits; JSON uses the shortest representation that round-trips.
//! Run headers are `#` lines in CSV, a leading `{"header": ...}` line in
//! JSON-lines and an optional `header` field in measure JSON; readers skip them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, FrequencySet, MomentVector, NormKind};
use crate::stability::TheoremReport;
use crate::torus::{NodeSet, TorusPoint};

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    d: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    header: Option<serde_json::Value>,
}

pub fn measure_to_json(mu: &DiscreteMeasure) -> String {
    measure_json(mu, None)
}

/// Measure JSON carrying a run header.
pub fn measure_to_json_with_header(mu: &DiscreteMeasure, header: &serde_json::Value) -> String {
    measure_json(mu, Some(header.clone()))
}

fn measure_json(mu: &DiscreteMeasure, header: Option<serde_json::Value>) -> String {
    let file = MeasureFile {
        d: mu.dim(),
        nodes: mu.nodes().iter().map(|t| t.coords().to_vec()).collect(),
        weights: mu.weights().iter().map(|c| [c.re, c.im]).collect(),
        header,
    };
    serde_json::to_string_pretty(&file).expect("measure serializes")
}

/// CSV comment lines `# text`, one per input line.
pub fn csv_comment(text: &str) -> String {
    text.lines().map(|l| format!("# {l}\n")).collect()
}

fn is_header_line(line: &str) -> bool {
    line.trim_start().starts_with("{\"header\"")
}

pub fn measure_from_json(text: &str) -> Result<DiscreteMeasure> {
    let file: MeasureFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("measure JSON, line {} column {}: {e}", e.line(), e.column())))?;
    for (i, node) in file.nodes.iter().enumerate() {
        if node.len() != file.d {
            return Err(Error::Parse(format!(
                "measure JSON: node {i} has {} coordinates, expected d = {}",
                node.len(),
                file.d
            )));
        }
    }
    let points = file
        .nodes
        .into_iter()
        .map(TorusPoint::new)
        .collect::<Result<Vec<_>>>()?;
    let weights = file.weights.iter().map(|w| Complex64::new(w[0], w[1])).collect();
    DiscreteMeasure::new(NodeSet::new(points)?, weights)
}

pub fn moments_to_csv(h: &MomentVector) -> String {
    let d = h.freq_set().dim();
    let mut out = String::new();
    let header: Vec<String> = (1..=d).map(|i| format!("k_{i}")).collect();
    writeln!(out, "{},re,im", header.join(",")).unwrap();
    for (k, v) in h.iter() {
        for ki in k {
            write!(out, "{ki},").unwrap();
        }
        writeln!(out, "{},{}", fmt_f64(v.re), fmt_f64(v.im)).unwrap();
    }
    out
}

/// Parses a moment CSV; rows may come in any order but must cover a full
/// ℓ²- or ℓ^∞-ball exactly once.
pub fn moments_from_csv(text: &str) -> Result<MomentVector> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hidx, header) = lines.next().ok_or_else(|| Error::Parse("moment CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let d = cols.len().saturating_sub(2);
    let expected: Vec<String> = (1..=d).map(|i| format!("k_{i}")).chain(["re".into(), "im".into()]).collect();
    if d == 0 || cols != expected {
        return Err(Error::Parse(format!(
            "moment CSV line {}: header must be `{}`",
            hidx + 1,
            expected.join(",")
        )));
    }
    let mut rows: Vec<(Vec<i64>, Complex64)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + 2 {
            return Err(Error::Parse(format!(
                "moment CSV line {lineno}: {} fields, expected {}",
                fields.len(),
                d + 2
            )));
        }
        let k = fields[..d]
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("moment CSV line {lineno}, field k_{}: `{f}` is not an integer", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let num = |i: usize, name: &str| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("moment CSV line {lineno}, field {name}: `{}` is not a number", fields[i])))
        };
        rows.push((k, Complex64::new(num(d, "re")?, num(d + 1, "im")?)));
    }
    let keys: BTreeSet<&Vec<i64>> = rows.iter().map(|(k, _)| k).collect();
    if keys.len() != rows.len() {
        return Err(Error::Parse("moment CSV: repeated frequency".into()));
    }
    let linf = rows.iter().flat_map(|(k, _)| k.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0);
    let l2 = rows
        .iter()
        .map(|(k, _)| k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let candidates = [
        FrequencySet::new(d, linf as u32, NormKind::Linf)?,
        FrequencySet::new(d, l2.ceil() as u32, NormKind::L2)?,
    ];
    let freq = candidates
        .into_iter()
        .find(|f| f.len() == rows.len() && rows.iter().all(|(k, _)| f.contains(k)))
        .ok_or_else(|| Error::Parse("moment CSV: frequencies do not form a full ℓ² or ℓ^∞ ball".into()))?;
    let mut values = vec![Complex64::new(0.0, 0.0); freq.len()];
    for (k, v) in rows {
        values[freq.index_of(&k).expect("checked membership")] = v;
    }
    MomentVector::new(freq, values)
}

/// One JSON object per line.
pub fn reports_to_jsonl(reports: &[TheoremReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}

pub fn reports_from_jsonl(text: &str) -> Result<Vec<TheoremReport>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !is_header_line(l))
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("report line {}: {e}", i + 1))))
        .collect()
}

/// Per-trial CSV summary.
pub fn reports_to_csv(reports: &[TheoremReport]) -> String {
    let mut out = String::from("seed,theorem,premise,lhs,rhs,margin,satisfied,structural_ok,passes\n");
    for r in reports {
        let seed = r.meta.seed.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{seed},{},{},{},{},{},{},{},{}",
            r.theorem,
            r.premise_holds,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs()),
            fmt_f64(r.margin),
            r.satisfied,
            r.structural_ok,
            r.passes()
        )
        .unwrap();
    }
    out
}
