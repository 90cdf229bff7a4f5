//! Independent oracles for the core numerics.

use std::f64::consts::PI;

use pronylab::localizer::{autocorr_quadrature, QUADRATURE_PANELS};
use pronylab::measure::moment_map;
use pronylab::numerics::{hermitian_eigen, CMatrix};
use pronylab::stability::{random_pair_cluster, vandermonde_matrix, vandermonde_sigma_min};
use pronylab::torus::{bottleneck_matching, matching_distance};
use pronylab::wasserstein::{w1_complex, DEFAULT_ANGLES};
use pronylab::{Complex64, DiscreteMeasure, FrequencySet, LocalizerParams, NodeSet, NormKind, TorusPoint, WindowKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn brute_force_md(y: &NodeSet, z: &NodeSet) -> f64 {
    permutations(y.len())
        .iter()
        .map(|p| (0..y.len()).map(|i| y.get(i).distance(z.get(p[i]))).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn node_set(d: usize, coords: &[f64]) -> Option<NodeSet> {
    NodeSet::from_coords(coords.chunks(d).map(|c| c.to_vec())).ok()
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bottleneck_matches_brute_force(m in 1usize..=7, d in 1usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..m * d).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..m * d).map(|_| rng.random()).collect();
        let (Some(y), Some(z)) = (node_set(d, &a), node_set(d, &b)) else { return Ok(()) };
        let bm = bottleneck_matching(&y, &z).unwrap();
        prop_assert_eq!(bm.value, brute_force_md(&y, &z));
        let achieved = (0..m).map(|i| y.get(i).distance(z.get(bm.perm[i]))).fold(0.0, f64::max);
        prop_assert_eq!(achieved, bm.value);
    }

    #[test]
    fn torus_norm_is_a_metric(x in point(3), y in point(3), z in point(3), s in point(3)) {
        let p = |v: &Vec<f64>| TorusPoint::new(v.clone()).unwrap();
        let (a, b, c) = (p(&x), p(&y), p(&z));
        prop_assert_eq!(a.distance(&b), b.distance(&a));
        prop_assert!(a.distance(&c) <= a.distance(&b) + b.distance(&c) + 1e-15);
        prop_assert!(a.distance(&b) <= 3f64.sqrt() / 2.0 + 1e-15);
        let shifted = (a.translate(&s).unwrap(), b.translate(&s).unwrap());
        prop_assert!((shifted.0.distance(&shifted.1) - a.distance(&b)).abs() < 1e-12);
    }

    #[test]
    fn matching_distance_is_a_metric(seed in any::<u64>(), m in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || node_set(2, &(0..2 * m).map(|_| rng.random()).collect::<Vec<f64>>());
        let (Some(a), Some(b), Some(c)) = (draw(), draw(), draw()) else { return Ok(()) };
        let md = |x: &NodeSet, y: &NodeSet| matching_distance(x, y).unwrap();
        prop_assert_eq!(md(&a, &a), 0.0);
        prop_assert_eq!(md(&a, &b), md(&b, &a));
        prop_assert!(md(&a, &c) <= md(&a, &b) + md(&b, &c) + 1e-15);
    }
}

#[test]
fn grid_moments_invert_by_dft() {
    // weights on j/L are recovered by the inverse DFT of one period of moments
    let l = 13usize;
    let n = 6u32;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let idx = [0usize, 2, 5, 9, 12];
    let mut w: Vec<Complex64> = idx.iter().map(|_| Complex64::new(rng.random(), rng.random_range(-1.0..1.0))).collect();
    let total: Complex64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let nodes = NodeSet::from_scalars(&idx.iter().map(|&i| i as f64 / l as f64).collect::<Vec<_>>()).unwrap();
    let mu = DiscreteMeasure::new(nodes, w.clone()).unwrap();
    let h = moment_map(&mu, &FrequencySet::univariate(n)).unwrap();
    for j in 0..l {
        let got: Complex64 = (-(n as i64)..=n as i64)
            .map(|k| h.get(&[k]).unwrap() * Complex64::from_polar(1.0, 2.0 * PI * (k * j as i64) as f64 / l as f64))
            .sum::<Complex64>()
            / l as f64;
        let want = idx.iter().position(|&i| i == j).map_or(Complex64::new(0.0, 0.0), |p| w[p]);
        assert!((got - want).norm() < 1e-13, "j = {j}: {got} vs {want}");
    }
}

#[test]
fn moments_are_hermitian_for_real_weights() {
    let mu = DiscreteMeasure::new(
        NodeSet::from_coords([vec![0.1, 0.7], vec![0.4, 0.2], vec![0.9, 0.95]]).unwrap(),
        vec![Complex64::new(0.2, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.0)],
    )
    .unwrap();
    let f = FrequencySet::new(2, 5, NormKind::L2).unwrap();
    let h = moment_map(&mu, &f).unwrap();
    for k in f.members() {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        assert!((h.get(k).unwrap() - h.get(&neg).unwrap().conj()).norm() < 1e-15);
    }
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier, highest degree first.
fn char_poly(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut m = CMatrix::zeros(n, n);
    let mut c = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += c;
        }
        m = next;
        let am = a.matmul(&m);
        let tr: Complex64 = (0..n).map(|i| am[(i, i)]).sum();
        c = -tr / k as f64;
        coeffs.push(c);
    }
    coeffs
}

#[test]
fn hermitian_eigenvalues_are_char_poly_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 8;
    let b = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut a = b.matmul(&b.adjoint());
    for i in 0..n {
        a[(i, i)] -= Complex64::new(3.0, 0.0);
    }
    let p: Vec<f64> = char_poly(&a).iter().map(|c| c.re).collect();
    let eval = |x: f64| p.iter().fold(0.0, |acc, &c| acc * x + c);
    // roots by bisection on sign changes of a fine scan
    let bound = 1.0 + p.iter().skip(1).map(|c| c.abs()).fold(0.0, f64::max);
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut prev = (-bound, eval(-bound));
    for i in 1..=steps {
        let x = -bound + 2.0 * bound * i as f64 / steps as f64;
        let v = eval(x);
        if v == 0.0 || v.signum() != prev.1.signum() {
            let (mut lo, mut hi) = (prev.0, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval(mid).signum() == eval(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (x, v);
    }
    let eig = hermitian_eigen(&a).unwrap().values;
    assert_eq!(roots.len(), n, "distinct real roots expected");
    for (r, e) in roots.iter().zip(&eig) {
        assert!((r - e).abs() < 1e-9 * (1.0 + e.abs()), "{r} vs {e}");
    }
}

#[test]
fn vandermonde_sigma_min_below_random_probes() {
    let (n, d) = (8u32, 2usize);
    let y = random_pair_cluster(d, n, 2, 1, 0.05, 17).unwrap();
    let f = FrequencySet::new(d, n, NormKind::L2).unwrap();
    let v = vandermonde_matrix(&y, &f).unwrap();
    let smin = vandermonde_sigma_min(&y, n, d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut best = f64::INFINITY;
    for _ in 0..100_000 {
        let x: Vec<Complex64> = (0..y.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.mul_vec(&x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        best = best.min(nv / nx);
    }
    assert!(smin <= best * (1.0 + 1e-12));
    assert!(smin > 0.0);
}

#[test]
fn fourier_coefficients_match_quadrature() {
    // ψ̂(k) against a direct midpoint rule on ψ in d = 1
    let p = LocalizerParams::new(1, 10, (5.0f64 / 3.0).sqrt() / 10.0, WindowKind::Hann).unwrap();
    let panels = 20_000;
    let h = 2.0 * p.q / panels as f64;
    for k in [0i64, 1, 4, 10, 11, 17, 30] {
        let integral: f64 = (0..panels)
            .map(|i| {
                let x = -p.q + (i as f64 + 0.5) * h;
                p.psi(&[x]) * (2.0 * PI * k as f64 * x).cos() * h
            })
            .sum();
        let want = p.psi_hat(&[k as f64]);
        assert!((integral - want).abs() < 1e-6 * p.psi_hat(&[0.0]), "k = {k}: {integral} vs {want}");
    }
}

#[test]
fn autocorrelation_quadrature_agrees_across_windows() {
    for kind in [WindowKind::Hann, WindowKind::Parabolic, WindowKind::PlainCosine] {
        for x in [0.0, 0.1, 0.37, 0.8] {
            let a = autocorr_quadrature(kind, 1.0, x, QUADRATURE_PANELS);
            let b = autocorr_quadrature(kind, 1.0, x, 2 * QUADRATURE_PANELS);
            assert!((a - b).abs() < 1e-9, "{kind:?} at {x}");
        }
    }
}

/// `W₁` on the circle for real signed measures: `min_c ∫ |F − c|`.
fn circle_w1(atoms: &[(f64, f64)]) -> f64 {
    let mut a = atoms.to_vec();
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut cum = 0.0;
    let mut segments = Vec::new();
    for (i, &(t, m)) in a.iter().enumerate() {
        cum += m;
        let next = a.get(i + 1).map_or(1.0 + a[0].0, |n| n.0);
        segments.push((cum, next - t));
    }
    let mut levels: Vec<f64> = segments.iter().map(|s| s.0).collect();
    levels.sort_by(f64::total_cmp);
    levels
        .iter()
        .map(|&c| segments.iter().map(|(f, len)| (f - c).abs() * len).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w1_matches_circle_cdf_formula(seed in any::<u64>(), m1 in 1usize..=4, m2 in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |m: usize| {
            let ts: Vec<f64> = (0..m).map(|_| rng.random()).collect();
            let mut ws: Vec<f64> = (0..m).map(|_| rng.random_range(-0.5..1.0)).collect();
            let s: f64 = ws.iter().sum();
            if s.abs() < 0.1 {
                ws[0] += 1.0;
            }
            let s: f64 = ws.iter().sum();
            ws.iter_mut().for_each(|w| *w /= s);
            (ts, ws)
        };
        let (t1, w1) = draw(m1);
        let (t2, w2) = draw(m2);
        let mk = |t: &[f64], w: &[f64]| {
            NodeSet::from_scalars(t).ok().and_then(|n| DiscreteMeasure::new(n, w.iter().map(|&x| Complex64::new(x, 0.0)).collect()).ok())
        };
        let (Some(a), Some(b)) = (mk(&t1, &w1), mk(&t2, &w2)) else { return Ok(()) };
        let atoms: Vec<(f64, f64)> = t1.iter().zip(&w1).map(|(&t, &w)| (t, w))
            .chain(t2.iter().zip(&w2).map(|(&t, &w)| (t, -w))).collect();
        let want = circle_w1(&atoms);
        let got = w1_complex(&a, &b, DEFAULT_ANGLES).unwrap();
        prop_assert!(got.value <= want + 1e-10 && want <= got.upper_bound + 1e-10,
            "bracket [{}, {}] vs oracle {}", got.value, got.upper_bound, want);
    }
}
