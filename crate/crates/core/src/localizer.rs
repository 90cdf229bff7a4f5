//! Window functions, their autocorrelations and the localizing function `ψ`.
//!
//! For a window `φ` supported on `[−q/2, q/2]` with autocorrelation
//! `A = φ * φ`, the localizer is
//!
//! ```text
//! ψ(x) = (2πN)² Π_ℓ A(x_ℓ) + Σ_s A''(x_s) Π_{i≠s} A(x_i)
//! ψ̂(v) = ((2πN)² − Σ_s (2πv_s)²) Π_ℓ φ̂(v_ℓ)²
//! ```
//!
//! so `ψ̂ ≥ 0` on `‖v‖₂ ≤ N` and `ψ̂ ≤ 0` outside. For the Hann window
//! `cos²(πx/q)` everything is available in closed form; the other windows are
//! evaluated with Simpson quadrature and finite differences.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Window shape, all supported on `[−q/2, q/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// `cos²(πx/q)`
    Hann,
    /// `1 − (2x/q)²`
    Parabolic,
    /// `cos(πx/q)`
    PlainCosine,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(WindowKind::Hann),
            "parabolic" => Ok(WindowKind::Parabolic),
            "plain-cosine" | "cosine" => Ok(WindowKind::PlainCosine),
            other => Err(Error::Parse(format!(
                "unknown window '{other}' (expected hann, parabolic or plain-cosine)"
            ))),
        }
    }
}

/// Panels used whenever an autocorrelation is computed numerically.
pub const QUADRATURE_PANELS: usize = 4096;

/// Relative finite-difference step for numerically built localizers.
pub const FD_STEP: f64 = 1e-4;

/// Window value at `x`; zero outside `(−q/2, q/2)`.
pub fn window_eval(kind: WindowKind, q: f64, x: f64) -> f64 {
    let x = x.abs();
    if x >= q / 2.0 {
        return 0.0;
    }
    match kind {
        WindowKind::Hann => (PI * x / q).cos().powi(2),
        WindowKind::Parabolic => 1.0 - (2.0 * x / q).powi(2),
        WindowKind::PlainCosine => (PI * x / q).cos(),
    }
}

/// Closed-form Hann autocorrelation
/// `(q−|x|)/4 (1 + ½cos(2πx/q)) + 3q/(16π) sin(2π|x|/q)` for `|x| < q`.
pub fn autocorr_eval(kind: WindowKind, q: f64, x: f64) -> Result<f64> {
    match kind {
        WindowKind::Hann => Ok(hann_autocorr(q, x)),
        _ => Err(Error::ClosedFormUnavailable("autocorrelation of non-Hann window")),
    }
}

pub(crate) fn hann_autocorr(q: f64, x: f64) -> f64 {
    let x = x.abs();
    if x >= q {
        return 0.0;
    }
    let w = 2.0 * PI * x / q;
    (q - x) / 4.0 * (1.0 + 0.5 * w.cos()) + 3.0 * q / (16.0 * PI) * w.sin()
}

/// `g(x) = (q/2π) sin(2π|x|/q) + q − |x|` on `|x| < q`, zero elsewhere.
pub fn hann_g(q: f64, x: f64) -> f64 {
    let x = x.abs();
    if x >= q {
        return 0.0;
    }
    q / (2.0 * PI) * (2.0 * PI * x / q).sin() + q - x
}

/// First derivative of the Hann autocorrelation.
pub fn hann_autocorr_d1(q: f64, x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    if x >= q || x == 0.0 {
        return 0.0;
    }
    let w = 2.0 * PI * x / q;
    let v = -0.25 * (1.0 + 0.5 * w.cos()) - (q - x) / 4.0 * (PI / q) * w.sin()
        + 0.375 * w.cos();
    s * v
}

/// Second derivative `A'' = −(4π²/q²) A + (π²/q²) g`.
pub fn hann_autocorr_d2(q: f64, x: f64) -> f64 {
    if x.abs() >= q {
        return 0.0;
    }
    let c = PI * PI / (q * q);
    -4.0 * c * hann_autocorr(q, x) + c * hann_g(q, x)
}

/// Composite Simpson approximation of `∫ φ(y) φ(x − y) dy` with `n` panels.
pub fn autocorr_quadrature(kind: WindowKind, q: f64, x: f64, n: usize) -> f64 {
    let x = x.abs();
    if x >= q {
        return 0.0;
    }
    let n = n.max(2) + n % 2;
    // overlap of [−q/2, q/2] and [x − q/2, x + q/2]
    let (a, b) = (x - q / 2.0, q / 2.0);
    let h = (b - a) / n as f64;
    let f = |y: f64| window_eval(kind, q, y) * window_eval(kind, q, x - y);
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Fourier transform of the Hann window,
/// `φ̂(v) = (q/2) sinc(qv) / (1 − (qv)²)` with `sinc(u) = sin(πu)/(πu)`.
pub fn hann_hat(q: f64, v: f64) -> f64 {
    let u = (q * v).abs();
    let eps = u - 1.0;
    if (PI * eps).abs() < 1e-4 {
        // sin(π(1+ε)) / (π(1+ε)(−ε)(2+ε)) = sinc(ε) / ((1+ε)(2+ε))
        return q / 2.0 * sinc(eps) / ((1.0 + eps) * (2.0 + eps));
    }
    q / 2.0 * sinc(u) / (1.0 - u * u)
}

fn sinc(u: f64) -> f64 {
    let z = PI * u;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Parameters of a localizer on `T^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizerParams {
    pub d: usize,
    pub n: u32,
    pub q: f64,
    pub window: WindowKind,
}

impl LocalizerParams {
    pub fn new(d: usize, n: u32, q: f64, window: WindowKind) -> Result<Self> {
        if d == 0 || n == 0 || !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "localizer needs d >= 1, N >= 1, q > 0 (got d={d}, N={n}, q={q})"
            )));
        }
        Ok(Self { d, n, q, window })
    }

    /// Hann localizer with the smallest admissible support `q = √d / N`.
    pub fn critical(d: usize, n: u32) -> Self {
        Self::new(d, n, (d as f64).sqrt() / n as f64, WindowKind::Hann).expect("valid parameters")
    }

    /// Whether `N q ≥ √d`, the condition for a global maximum at the origin.
    pub fn maximality_gate(&self) -> bool {
        self.n as f64 * self.q >= (self.d as f64).sqrt() * (1.0 - 1e-12)
    }

    fn two_pi_n_sq(&self) -> f64 {
        (2.0 * PI * self.n as f64).powi(2)
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(x.len(), self.d, "point dimension must match the localizer");
    }

    /// `ψ(x)`: closed form for Hann, quadrature-based otherwise.
    pub fn psi(&self, x: &[f64]) -> f64 {
        match self.window {
            WindowKind::Hann => self.psi_hann(x),
            _ => self.psi_numeric(x),
        }
    }

    fn psi_hann(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        let q = self.q;
        if x.iter().any(|v| v.abs() >= q) {
            return 0.0;
        }
        let a: Vec<f64> = x.iter().map(|&v| hann_autocorr(q, v)).collect();
        let g: Vec<f64> = x.iter().map(|&v| hann_g(q, v)).collect();
        let c = PI * PI / (q * q);
        let prod: f64 = a.iter().product();
        let mut mixed = 0.0;
        for s in 0..self.d {
            let mut t = g[s];
            for (i, ai) in a.iter().enumerate() {
                if i != s {
                    t *= ai;
                }
            }
            mixed += t;
        }
        (self.two_pi_n_sq() - 4.0 * self.d as f64 * c) * prod + c * mixed
    }

    /// `ψ(x)` from a quadrature autocorrelation and Richardson-extrapolated
    /// central second differences with base step `q·10⁻⁴`; works for every window.
    pub fn psi_numeric(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        let q = self.q;
        if x.iter().any(|v| v.abs() >= q) {
            return 0.0;
        }
        let h = q * FD_STEP;
        let acorr = |t: f64| autocorr_quadrature(self.window, q, t, QUADRATURE_PANELS);
        let a: Vec<f64> = x.iter().map(|&v| acorr(v)).collect();
        // Richardson step 2·D(h/2) − D(h) removes the O(h) bias of the
        // central difference at the |x|³ kink of non-smooth windows
        let diff2 = |v: f64, av: f64, h: f64| (acorr(v + h) - 2.0 * av + acorr(v - h)) / (h * h);
        let a2: Vec<f64> = x
            .iter()
            .zip(&a)
            .map(|(&v, &av)| 2.0 * diff2(v, av, h / 2.0) - diff2(v, av, h))
            .collect();
        let prod: f64 = a.iter().product();
        let mut mixed = 0.0;
        for s in 0..self.d {
            let mut t = a2[s];
            for (i, ai) in a.iter().enumerate() {
                if i != s {
                    t *= ai;
                }
            }
            mixed += t;
        }
        self.two_pi_n_sq() * prod + mixed
    }

    /// `ψ̂(v)` (Hann window).
    pub fn psi_hat(&self, v: &[f64]) -> f64 {
        self.check_dim(v);
        let pre = self.two_pi_n_sq() - v.iter().map(|s| (2.0 * PI * s).powi(2)).sum::<f64>();
        pre * v.iter().map(|&s| hann_hat(self.q, s).powi(2)).product::<f64>()
    }

    /// `ψ(0)`.
    pub fn psi0(&self) -> f64 {
        self.psi(&vec![0.0; self.d])
    }

    /// `Σ_{ℓ ∈ {−1,0,1}^d} ψ(x + ℓ)`, the periodization of `ψ` (exact when `q ≤ 1/2`).
    pub fn periodized_psi(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        let mut total = 0.0;
        let mut shift = vec![-1i32; self.d];
        let mut y = vec![0.0; self.d];
        loop {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = x[i] + shift[i] as f64;
            }
            total += self.psi(&y);
            let mut i = 0;
            loop {
                if i == self.d {
                    return total;
                }
                if shift[i] < 1 {
                    shift[i] += 1;
                    break;
                }
                shift[i] = -1;
                i += 1;
            }
        }
    }

    /// Truncated Fourier series `Σ_{‖k‖_∞ ≤ K} ψ̂(k) e^{2πik·x}`.
    pub fn fourier_series(&self, x: &[f64], k_max: i64) -> f64 {
        self.check_dim(x);
        // ψ̂ is even, so the series is a product-free cosine sum
        let mut total = 0.0;
        let mut k = vec![-k_max; self.d];
        let mut kf = vec![0.0; self.d];
        loop {
            for (f, &ki) in kf.iter_mut().zip(&k) {
                *f = ki as f64;
            }
            let phase: f64 = kf.iter().zip(x).map(|(a, b)| a * b).sum();
            total += self.psi_hat(&kf) * (2.0 * PI * (phase - phase.round())).cos();
            let mut i = 0;
            loop {
                if i == self.d {
                    return total;
                }
                if k[i] < k_max {
                    k[i] += 1;
                    break;
                }
                k[i] = -k_max;
                i += 1;
            }
        }
    }
}

/// Bivariate `ψ` for a non-Hann window, from quadrature and finite differences.
pub fn psi_counterexample_eval(kind: WindowKind, n: u32, q: f64, x: [f64; 2]) -> Result<f64> {
    Ok(LocalizerParams::new(2, n, q, kind)?.psi_numeric(&x))
}

/// Analytic lower bound for `ψ(0) − ψ(x)` on `‖x‖_∞ ≤ q` (Hann window).
///
/// `d = 1` (with `q = κ/N`): `5π²(κ²−1)/q³ |x|²` for `|x| ≤ q/2` and
/// `(3κ²−2)/2 · π²|x|/q²` on `[q/2, q]`.
///
/// `d ≥ 2` (with `q = √d/N`): `(10/3)(d−1)(3q/8)^{d−1} π²‖x‖²/q³` for
/// `‖x‖ ≤ q/2` and `(d−½)(3q/8)^{d−1} π²‖x‖/q²` on `[q/2, q]`.
pub fn drop_lower_bound(params: &LocalizerParams, x: &[f64], kappa: Option<f64>) -> Result<f64> {
    if x.len() != params.d {
        return Err(Error::DimensionMismatch {
            expected: params.d,
            found: x.len(),
        });
    }
    let q = params.q;
    let r = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if r > q * (1.0 + 1e-12) {
        return Err(Error::OutOfDomain);
    }
    let pi2 = PI * PI;
    if params.d == 1 {
        let k = kappa.ok_or_else(|| Error::InvalidParameter("d = 1 drop bound needs κ".into()))?;
        if !(k > 1.0) {
            return Err(Error::InvalidParameter(format!("κ must exceed 1, got {k}")));
        }
        let k2 = k * k;
        return Ok(if r <= q / 2.0 {
            5.0 * pi2 * (k2 - 1.0) / q.powi(3) * r * r
        } else {
            (3.0 * k2 - 2.0) / 2.0 * pi2 * r / (q * q)
        });
    }
    let d = params.d as f64;
    let c = (3.0 * q / 8.0).powi(params.d as i32 - 1) * pi2;
    Ok(if r <= q / 2.0 {
        10.0 / 3.0 * (d - 1.0) * c * r * r / q.powi(3)
    } else {
        (d - 0.5) * c * r / (q * q)
    })
}

/// The single-formula bound `(d−½)(3q/8)^{d−1} π² ‖x‖²/q³`, valid on all of `‖x‖_∞ ≤ q`.
pub fn drop_lower_bound_general(params: &LocalizerParams, x: &[f64]) -> Result<f64> {
    if params.d < 2 {
        return Err(Error::InvalidParameter("general drop bound needs d >= 2".into()));
    }
    let q = params.q;
    let r = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if r > q * (1.0 + 1e-12) {
        return Err(Error::OutOfDomain);
    }
    let d = params.d as f64;
    Ok((d - 0.5) * (3.0 * q / 8.0).powi(params.d as i32 - 1) * PI * PI * r * r / q.powi(3))
}

/// Successive upper bounds `a_k` with `a_0 = 1` and
/// `a_{k+1} = 3d / (5d − 2 − 8 m_k (d−1))`, where `m_k` is the secant slope
/// of `A` between `q/2` and `a_k q`.
pub fn bound_sequence(d: usize, q: f64, max_iter: usize) -> Vec<f64> {
    let df = d as f64;
    let mut seq = vec![1.0];
    let half = hann_autocorr(q, q / 2.0);
    for _ in 0..max_iter {
        let a = *seq.last().expect("nonempty");
        if a <= 0.5 + 1e-9 {
            break;
        }
        let m = (hann_autocorr(q, a * q) - half) / (a * q - q / 2.0);
        let next = 3.0 * df / (5.0 * df - 2.0 - 8.0 * m * (df - 1.0));
        seq.push(if next < 0.5 { 0.5 } else { next });
    }
    seq
}

/// Result of a grid search for the maximum of `ψ` on `[−q, q]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMaximum {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub psi0: f64,
}

/// Grid search on `[−q, q]^d` with `per_axis` points per axis (odd counts
/// include the origin), followed by one refinement pass around the incumbent.
pub fn grid_maximum(params: &LocalizerParams, per_axis: usize) -> GridMaximum {
    let d = params.d;
    let q = params.q;
    let per_axis = per_axis.max(3);
    let step = 2.0 * q / (per_axis - 1) as f64;
    let axis: Vec<f64> = (0..per_axis).map(|i| -q + i as f64 * step).collect();
    let total = per_axis.pow(d as u32);

    let point = |mut idx: usize, ax: &[f64], centre: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; d];
        for xi in x.iter_mut().rev() {
            *xi = ax[idx % ax.len()];
            idx /= ax.len();
        }
        for (xi, c) in x.iter_mut().zip(centre) {
            *xi += c;
        }
        x
    };

    let zero = vec![0.0; d];
    let best = (0..total)
        .into_par_iter()
        .map(|i| {
            let x = point(i, &axis, &zero);
            (params.psi(&x), i)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
    let mut argmax = point(best.1, &axis, &zero);
    let mut value = best.0;

    let fine_n = 21usize;
    let fine: Vec<f64> = (0..fine_n)
        .map(|i| -step + 2.0 * step * i as f64 / (fine_n - 1) as f64)
        .collect();
    let centre = argmax.clone();
    let refined = (0..fine_n.pow(d as u32))
        .into_par_iter()
        .map(|i| {
            let x = point(i, &fine, &centre);
            (params.psi(&x), i)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
    if refined.0 > value {
        value = refined.0;
        argmax = point(refined.1, &fine, &centre);
    }
    GridMaximum {
        argmax,
        value,
        psi0: params.psi0(),
    }
}

// ties resolve to the lower index so the search is deterministic
fn pick_max(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn window_values() {
        let q = 0.3;
        assert_eq!(window_eval(WindowKind::Hann, q, 0.0), 1.0);
        assert!(window_eval(WindowKind::Hann, q, q / 2.0).abs() < 1e-300);
        assert!(window_eval(WindowKind::Hann, q, -q / 2.0).abs() < 1e-300);
        assert!((window_eval(WindowKind::Parabolic, q, q / 4.0) - 0.75).abs() < 1e-15);
        assert_eq!(window_eval(WindowKind::PlainCosine, q, 0.2), 0.0);
    }

    #[test]
    fn autocorr_anchors() {
        let q = 0.7;
        assert!(rel(autocorr_eval(WindowKind::Hann, q, 0.0).unwrap(), 3.0 * q / 8.0) < 1e-14);
        assert!(rel(autocorr_eval(WindowKind::Hann, q, q / 2.0).unwrap(), q / 16.0) < 1e-14);
        assert_eq!(autocorr_eval(WindowKind::Hann, q, q).unwrap(), 0.0);
        assert!(autocorr_eval(WindowKind::Parabolic, q, 0.0).is_err());
        assert!((hann_autocorr_d1(q, q / 2.0) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let q = 0.2;
        for i in 0..50 {
            let x = -q + 2.0 * q * i as f64 / 49.0;
            let a = autocorr_quadrature(WindowKind::Hann, q, x, 2048);
            assert!((a - hann_autocorr(q, x)).abs() < 1e-10, "x={x}");
        }
        let p = autocorr_quadrature(WindowKind::Parabolic, 1.0, 0.0, 2048);
        assert!((p - 8.0 / 15.0).abs() < 1e-12);
        assert_eq!(autocorr_quadrature(WindowKind::PlainCosine, 1.0, 1.0, 64), 0.0);
    }

    #[test]
    fn hann_transform_limits() {
        let q = 0.4;
        assert!((hann_hat(q, 0.0) - q / 2.0).abs() < 1e-16);
        assert!((hann_hat(q, 1.0 / q) - q / 4.0).abs() < 1e-15);
        assert!((hann_hat(q, -1.0 / q) - q / 4.0).abs() < 1e-15);
        // continuity across the switch to the series branch
        for v in [1.0 / q * (1.0 + 3.1e-5), 1.0 / q * (1.0 + 3.3e-5), 3e-5 / q, 3.3e-5 / q] {
            let a = hann_hat(q, v);
            let b = hann_hat(q, v * (1.0 + 1e-9));
            assert!((a - b).abs() < 1e-9);
        }
        // direct quadrature of the window transform at a generic frequency
        let v = 3.7;
        let n = 20000;
        let h = q / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = -q / 2.0 + i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * window_eval(WindowKind::Hann, q, x) * (2.0 * PI * x * v).cos();
        }
        assert!((s * h / 3.0 - hann_hat(q, v)).abs() < 1e-12);
    }

    #[test]
    fn psi_anchors() {
        let p = LocalizerParams::critical(2, 15);
        assert!(rel(p.psi0(), 0.75 * PI * PI) < 1e-12);
        assert!(rel(p.psi(&[p.q / 2.0, p.q / 2.0]), PI * PI / 16.0) < 1e-12);
        let p3 = LocalizerParams::critical(3, 8);
        let want = 8.0 * 3.0 * PI * PI / (p3.q * p3.q) * (p3.q / 16.0).powi(3);
        assert!(rel(p3.psi(&[p3.q / 2.0; 3]), want) < 1e-12);
        for d in 1..=3 {
            let p = LocalizerParams::critical(d, 10);
            let want = 4.0 * PI * PI * 100.0 * (p.q / 2.0).powi(2 * d as i32);
            assert!(rel(p.psi_hat(&vec![0.0; d]), want) < 1e-12);
        }
        assert_eq!(p.psi_hat(&[15.0, 0.0]), 0.0);
        assert_eq!(p.psi(&[p.q, 0.0]), 0.0);
    }

    #[test]
    fn univariate_psi_closed_form() {
        let n = 32u32;
        let kappa = (5.0f64 / 3.0).sqrt();
        let q = kappa / n as f64;
        let p = LocalizerParams::new(1, n, q, WindowKind::Hann).unwrap();
        let k2 = kappa * kappa;
        assert!(rel(p.psi0(), PI * PI * (3.0 * k2 - 1.0) / (2.0 * q)) < 1e-12);
        assert!(rel(p.psi(&[q / 2.0]), PI * PI * (k2 + 1.0) / (4.0 * q)) < 1e-12);
    }

    #[test]
    fn numeric_psi_agrees_with_hann_closed_form() {
        let p = LocalizerParams::critical(2, 6);
        for x in [[0.0, 0.0], [0.3 * p.q, -0.1 * p.q], [0.7 * p.q, 0.45 * p.q]] {
            let a = p.psi(&x);
            let b = p.psi_numeric(&x);
            assert!((a - b).abs() < 1e-6 * p.psi0(), "{a} vs {b}");
        }
    }

    #[test]
    fn drop_bound_values() {
        let p = LocalizerParams::critical(2, 16);
        let b = drop_lower_bound(&p, &[p.q / 2.0, 0.1 * p.q], None).unwrap();
        assert!(rel(b, 5.0 * PI * PI / 16.0) < 1e-12);
        let p3 = LocalizerParams::critical(3, 8);
        let b3 = drop_lower_bound(&p3, &[p3.q, 0.0, 0.0], None).unwrap();
        let want = 2.5 * (3.0 * p3.q / 8.0).powi(2) * PI * PI / p3.q;
        assert!(rel(b3, want) < 1e-12);
        let g3 = drop_lower_bound_general(&p3, &[p3.q, 0.0, 0.0]).unwrap();
        assert!(rel(g3, want) < 1e-12);
        let p1 = LocalizerParams::new(1, 32, 1.3 / 32.0, WindowKind::Hann).unwrap();
        assert_eq!(drop_lower_bound(&p1, &[0.0], Some(1.3)).unwrap(), 0.0);
        assert!(drop_lower_bound(&p1, &[0.0], None).is_err());
        assert_eq!(drop_lower_bound(&p, &[1.5 * p.q, 0.0], None), Err(Error::OutOfDomain));
    }

    #[test]
    fn published_linear_univariate_constant_fails_at_support_edge() {
        // 15/4 π²(κ²−1)|x|/q² exceeds the true drop at |x| = q
        let n = 32u32;
        let kappa = (5.0f64 / 3.0).sqrt();
        let q = kappa / n as f64;
        let p = LocalizerParams::new(1, n, q, WindowKind::Hann).unwrap();
        let drop = p.psi0() - p.psi(&[q * (1.0 - 1e-12)]);
        let published = 3.75 * PI * PI * (kappa * kappa - 1.0) / q;
        assert!(drop < published);
        assert!(drop >= drop_lower_bound(&p, &[q], Some(kappa)).unwrap());
    }

    #[test]
    fn bound_sequence_two_dims() {
        let q = 2f64.sqrt() / 16.0;
        let seq = bound_sequence(2, q, 50);
        assert_eq!(seq[0], 1.0);
        assert!((seq[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(seq.windows(2).all(|w| w[1] <= w[0]));
        assert!(seq.iter().all(|&a| (0.5..=1.0).contains(&a)));
        assert!((seq.last().unwrap() - 0.5).abs() < 1e-6);
        let s3 = bound_sequence(3, 3f64.sqrt() / 8.0, 50);
        assert_eq!(*s3.last().unwrap(), 0.5);
    }

    #[test]
    fn counterexample_slopes() {
        for (n, q) in [(2u32, 1.0), (15, 2f64.sqrt() / 15.0)] {
            let eps = q / 1e3;
            let slope = |kind| {
                let a = psi_counterexample_eval(kind, n, q, [eps, eps]).unwrap();
                let b = psi_counterexample_eval(kind, n, q, [0.0, 0.0]).unwrap();
                (a - b) / eps
            };
            assert!(rel(slope(WindowKind::Parabolic), 256.0 / (15.0 * q)) < 0.05);
            assert!(rel(slope(WindowKind::PlainCosine), PI * PI / q) < 0.05);
            assert!(psi_counterexample_eval(WindowKind::Hann, n, q, [eps, eps]).unwrap() < LocalizerParams::new(2, n, q, WindowKind::Hann).unwrap().psi_numeric(&[0.0, 0.0]));
        }
    }

    #[test]
    fn hann_maximum_at_origin() {
        let p = LocalizerParams::critical(2, 8);
        let gm = grid_maximum(&p, 101);
        assert_eq!(gm.argmax, vec![0.0, 0.0]);
        assert_eq!(gm.value, gm.psi0);
    }

    proptest! {
        #[test]
        fn psi_vanishes_outside_support(x in -1.0..1.0f64, y in -1.0..1.0f64) {
            let p = LocalizerParams::critical(2, 12);
            if x.abs().max(y.abs()) >= p.q {
                prop_assert_eq!(p.psi(&[x, y]), 0.0);
            }
        }

        #[test]
        fn psi_hat_sign_pattern(a in -40i32..=40, b in -40i32..=40) {
            let p = LocalizerParams::critical(2, 12);
            let v = [a as f64, b as f64];
            let r2 = v[0] * v[0] + v[1] * v[1];
            let h = p.psi_hat(&v);
            let scale = 1e-12 * p.psi_hat(&[0.0, 0.0]);
            if r2 <= 144.0 {
                prop_assert!(h >= -scale);
            } else {
                prop_assert!(h <= scale);
            }
        }

        #[test]
        fn second_derivative_identity(t in 0.01..0.99f64) {
            let q = 0.37;
            let x = t * q;
            let h = 1e-5 * q;
            let fd = (hann_autocorr(q, x + h) - 2.0 * hann_autocorr(q, x) + hann_autocorr(q, x - h)) / (h * h);
            let scale = 4.0 * PI * PI / (q * q) * hann_autocorr(q, 0.0);
            prop_assert!((fd - hann_autocorr_d2(q, x)).abs() <= 1e-6 * scale);
        }
    }
}
