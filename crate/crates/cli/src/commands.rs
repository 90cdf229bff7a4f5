//! Subcommand implementations.

use std::io::Write as _;
use std::path::Path;

use pronylab::io::{fmt_f64, measure_from_json, measure_to_json_with_header, moments_from_csv, moments_to_csv, reports_to_csv, reports_to_jsonl};
use pronylab::measure::moment_map;
use pronylab::stability::{
    check_esprit_stability, check_pair_cluster_bound, random_pair_cluster, run_monte_carlo, summarize, MonteCarloConfig,
    TheoremId,
};
use pronylab::torus::bottleneck_matching;
use pronylab::wasserstein::{w1_complex, w1_upper_bound_matched, w1_upper_bound_tv, DEFAULT_ANGLES};
use pronylab::{esprit_recover, DiscreteMeasure, EspritConfig, FrequencySet, LocalizerParams, NormKind, WindowKind};
use serde_json::{json, Value};

use crate::config::{pick, read, require, write, FileConfig, RunHeader};
use crate::error::{CliError, Result};
use crate::{CheckArgs, Cli, Command, EspritArgs, MomentsArgs, PsiArgs, VandermondeArgs, W1Args};

/// Largest per-axis grid for `psi-sample`.
pub const MAX_GRID: usize = 2001;

pub fn run(cli: &Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let det = cli.deterministic;
    match &cli.command {
        Command::Moments(a) => moments(a, &file, det),
        Command::Check(a) => check(a, &file, det),
        Command::PsiSample(a) => psi_sample(a, &file, det),
        Command::Esprit(a) => esprit(a, &file, det),
        Command::W1(a) => w1(a, &file, det),
        Command::Vandermonde(a) => vandermonde(a, &file, det),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn load_measure(path: &Path) -> Result<DiscreteMeasure> {
    measure_from_json(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse<T: std::str::FromStr<Err = pronylab::Error>>(raw: &str) -> Result<T> {
    Ok(raw.parse::<T>()?)
}

fn moments(a: &MomentsArgs, file: &FileConfig, det: bool) -> Result<()> {
    let n = require(a.n, file.n, "n")?;
    let norm: NormKind = parse(&pick(a.norm.clone(), file.norm.clone(), "2".into()))?;
    let mu = load_measure(&a.measure)?;
    let freq = FrequencySet::new(mu.dim(), n, norm)?;
    let h = moment_map(&mu, &freq)?;
    let mut header = RunHeader::new(det, "moments", json!({ "n": n, "norm": norm, "d": mu.dim() }));
    header.inputs.push(a.measure.clone());
    emit(a.out.as_deref(), &(header.to_csv_comment() + &moments_to_csv(&h)))
}

fn check(a: &CheckArgs, file: &FileConfig, det: bool) -> Result<()> {
    let theorem: TheoremId = parse(&require(a.theorem.clone(), file.theorem.clone(), "theorem")?)?;
    let base = MonteCarloConfig::for_theorem(theorem);
    let cfg = MonteCarloConfig {
        theorem,
        trials: pick(a.trials, file.trials, base.trials),
        seed_start: pick(a.seed_start, file.seed_start, base.seed_start),
        n: pick(a.n, file.n, base.n),
        d: pick(a.d, file.d, base.d),
        m_max: pick(a.m_max, file.m_max, base.m_max),
        c_min: pick(a.c_min, file.c_min, base.c_min),
        kappa: pick(a.kappa, file.kappa, base.kappa),
        jitter_min: pick(a.jitter_min, file.jitter_min, base.jitter_min),
        jitter_max: pick(a.jitter_max, file.jitter_max, base.jitter_max),
    };
    let reports = run_monte_carlo(&cfg)?;
    let summary = summarize(&reports);

    let mut header = RunHeader::new(det, "check", serde_json::to_value(&cfg).expect("config serializes"));
    header.seeds = cfg.seeds().collect();
    std::fs::create_dir_all(&a.out_dir).map_err(|source| CliError::Write {
        path: a.out_dir.clone(),
        source,
    })?;
    let jsonl = a.out_dir.join(format!("{theorem}.jsonl"));
    let csv = a.out_dir.join(format!("{theorem}.csv"));
    write(&jsonl, &(header.to_jsonl_line() + &reports_to_jsonl(&reports)))?;
    write(&csv, &(header.to_csv_comment() + &reports_to_csv(&reports)))?;

    println!(
        "{theorem}: {} trials, premise held in {}, violations {}, min margin {}",
        summary.trials,
        summary.premise_holding,
        summary.violations,
        fmt_f64(summary.min_margin)
    );
    if summary.violations > 0 {
        return Err(CliError::Violation(format!(
            "{} violating trials, seeds {:?}",
            summary.violations, summary.violating_seeds
        )));
    }
    Ok(())
}

/// Unit directions along the axes and the main diagonals.
fn lines(d: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..d)
        .map(|s| (0..d).map(|i| if i == s { 1.0 } else { 0.0 }).collect())
        .collect();
    for mask in 0..1usize << (d - 1) {
        out.push((0..d).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect());
    }
    out
}

fn psi_sample(a: &PsiArgs, file: &FileConfig, det: bool) -> Result<()> {
    let d = require(a.d, file.d, "d")?;
    let n = require(a.n, file.n, "n")?;
    let q = pick(a.q, file.q, (d as f64).sqrt() / n as f64);
    let window: WindowKind = parse(&pick(a.window.clone(), file.window.clone(), "hann".into()))?;
    let grid = pick(a.grid, file.grid, 201);
    let extent = pick(a.extent, file.extent, 1.25 * q);
    let freq_extent = pick(a.freq_extent, file.freq_extent, 2.0 * n as f64);
    if grid == 0 || grid > MAX_GRID {
        return Err(CliError::Usage(format!("grid {grid} outside 1..={MAX_GRID}")));
    }
    if !(extent >= 0.0 && freq_extent >= 0.0) {
        return Err(CliError::Usage("extents must be nonnegative".into()));
    }
    let p = LocalizerParams::new(d, n, q, window)?;
    let coord = |i: usize, half: f64| if grid == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (grid - 1) as f64 };

    // sample index → unit position in [−1, 1]^d
    let positions: Vec<Vec<f64>> = if d <= 2 {
        (0..grid.pow(d as u32))
            .map(|mut idx| {
                let mut x = vec![0.0; d];
                for xi in x.iter_mut().rev() {
                    *xi = coord(idx % grid, 1.0);
                    idx /= grid;
                }
                x
            })
            .collect()
    } else {
        lines(d)
            .iter()
            .flat_map(|dir| (0..grid).map(move |i| dir.iter().map(|c| c * coord(i, 1.0)).collect()))
            .collect()
    };

    let mut text = RunHeader::new(
        det,
        "psi-sample",
        json!({ "d": d, "n": n, "q": q, "window": window, "grid": grid, "extent": extent, "freq_extent": freq_extent,
                "layout": if d <= 2 { "grid" } else { "axes-and-diagonals" } }),
    )
    .to_csv_comment();
    let xs: Vec<String> = (1..=d).map(|i| format!("x_{i}")).collect();
    let vs: Vec<String> = (1..=d).map(|i| format!("v_{i}")).collect();
    text.push_str(&format!("{},psi,psi_hat,{}\n", xs.join(","), vs.join(",")));
    for u in positions {
        let x: Vec<f64> = u.iter().map(|c| c * extent).collect();
        let v: Vec<f64> = u.iter().map(|c| c * freq_extent).collect();
        let hat = if window == WindowKind::Hann { fmt_f64(p.psi_hat(&v)) } else { String::new() };
        let row: Vec<String> = x
            .iter()
            .map(|&c| fmt_f64(c))
            .chain([fmt_f64(p.psi(&x)), hat])
            .chain(v.iter().map(|&c| fmt_f64(c)))
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    emit(a.out.as_deref(), &text)
}

fn esprit(a: &EspritArgs, file: &FileConfig, det: bool) -> Result<()> {
    let m = require(a.m, file.m, "m")?;
    let h = moments_from_csv(&read(&a.moments)?).map_err(|e| CliError::Usage(format!("{}: {e}", a.moments.display())))?;
    let n = h.freq_set().order();
    let cfg = EspritConfig {
        n,
        m,
        pencil_rows: a.pencil_rows.or(file.pencil_rows),
    };
    let r = esprit_recover(&h, &cfg)?;
    eprintln!(
        "singular gap σ_M/σ_(M+1) = {}{}",
        fmt_f64(r.gap_ratio),
        if r.reliable { "" } else { " (below threshold: signal subspace unreliable)" }
    );
    let mut header = RunHeader::new(det, "esprit", serde_json::to_value(cfg).expect("config serializes"));
    header.inputs.push(a.moments.clone());
    let mut diag = json!({ "gap_ratio": r.gap_ratio, "reliable": r.reliable });
    if let Some(path) = &a.reference {
        header.inputs.push(path.clone());
        let truth = load_measure(path)?;
        let noise = h.sub(&moment_map(&truth, h.freq_set())?)?;
        let report = check_esprit_stability(&truth, &noise, n)?;
        let md = bottleneck_matching(truth.nodes(), &r.nodes).map(|b| b.value).ok();
        eprintln!(
            "noise ‖e‖∞ = {}, premise {}, md(recovered, truth) = {}, bound {}",
            fmt_f64(noise.linf_norm()),
            report.premise_holds,
            md.map_or_else(|| "n/a".into(), fmt_f64),
            fmt_f64(report.rhs())
        );
        diag["stability"] = serde_json::to_value(&report).expect("report serializes");
        if !report.passes() {
            emit_measure(a, &r, &header, diag)?;
            return Err(CliError::Violation("ESPRIT stability bound violated".into()));
        }
    }
    emit_measure(a, &r, &header, diag)
}

fn emit_measure(a: &EspritArgs, r: &pronylab::EspritRecovery, header: &RunHeader, diag: Value) -> Result<()> {
    let mut h = header.to_json();
    h["diagnostics"] = diag;
    let mu = r.to_measure().or_else(|_| {
        // weights need not sum to one under noise; rescale only for the file format
        let total: pronylab::Complex64 = r.weights.iter().sum();
        DiscreteMeasure::new(r.nodes.clone(), r.weights.iter().map(|w| w / total).collect())
    })?;
    if mu.weights() != r.weights.as_slice() {
        h["diagnostics"]["weights_rescaled"] = json!(true);
    }
    emit(a.out.as_deref(), &(measure_to_json_with_header(&mu, &h) + "\n"))
}

fn w1(a: &W1Args, file: &FileConfig, det: bool) -> Result<()> {
    let angles = pick(a.angles, file.angles, DEFAULT_ANGLES);
    let mu1 = load_measure(&a.mu1)?;
    let mu2 = load_measure(&a.mu2)?;
    let r = w1_complex(&mu1, &mu2, angles)?;
    let tv = w1_upper_bound_tv(&mu1, &mu2)? + 0.0;
    let matched = if mu1.len() == mu2.len() && mu1.dim() == mu2.dim() {
        let eta = bottleneck_matching(mu1.nodes(), mu2.nodes())?.perm;
        Some(w1_upper_bound_matched(&mu1, &mu2, &eta)?)
    } else {
        None
    };
    let mut header = RunHeader::new(det, "w1", json!({ "angles": angles }));
    header.inputs.extend([a.mu1.clone(), a.mu2.clone()]);
    let out = json!({
        "w1": r.value,
        "theta": r.argmax_angle,
        "tv_bound": tv,
        "matched_bound": matched,
        "upper_bound": r.upper_bound,
        "gap": r.gap,
        "header": header.to_json(),
    });
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&out).expect("json") + "\n"))
}

fn vandermonde(a: &VandermondeArgs, file: &FileConfig, det: bool) -> Result<()> {
    let mut header;
    let (nodes, n, d) = match &a.nodes {
        Some(path) => {
            let mu = load_measure(path)?;
            let n = require(a.n, file.n, "n")?;
            header = RunHeader::new(det, "vandermonde", json!({ "n": n, "d": mu.dim() }));
            header.inputs.push(path.clone());
            (mu.nodes().clone(), n, mu.dim())
        }
        None => {
            let n = require(a.n, file.n, "n")?;
            let d = pick(a.d, file.d, 2);
            let pairs = pick(a.pairs, file.pairs, 2);
            let singles = pick(a.singles, file.singles, 1);
            let tau = pick(a.tau, file.tau, 0.1 / n as f64);
            let seed = pick(a.seed, file.seed, 0);
            header = RunHeader::new(
                det,
                "vandermonde",
                json!({ "n": n, "d": d, "pairs": pairs, "singles": singles, "tau": tau }),
            );
            header.seeds.push(seed);
            (random_pair_cluster(d, n, pairs, singles, tau, seed)?, n, d)
        }
    };
    let report = check_pair_cluster_bound(&nodes, n, d)?;
    let out = json!({
        "nodes": nodes.iter().map(|t| t.coords().to_vec()).collect::<Vec<_>>(),
        "report": report,
        "header": header.to_json(),
    });
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&out).expect("json") + "\n"))?;
    if !report.passes() {
        return Err(CliError::Violation("pair-cluster bound violated".into()));
    }
    Ok(())
}
