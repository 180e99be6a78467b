//! Globally adaptive Gauss-Kronrod (7/15) quadrature, plus a tanh-sinh rule
//! used as an independent second opinion.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Maximum number of panels one call may create.
pub const PANEL_BUDGET: usize = 10_000;

// Kronrod abscissae; odd entries (1, 3, 5, 7) are the Gauss-Legendre nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature { value: self.value, error: self.error, panels: self.panels })
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = kron.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        f1[j] = v1;
        f2[j] = v2;
        kron += WGK[j] * (v1 + v2);
        resabs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (v1 + v2);
        }
    }
    let mean = 0.5 * kron;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = kron * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error, abs: resabs }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The worst panel is bisected until the summed error estimate drops below
/// `tol` (or below a rounding floor relative to the result). Panels are summed
/// in interval order so the result does not depend on refinement history.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadratureResult {
    if a == b {
        return QuadratureResult { value: 0.0, error: 0.0, panels: 0, converged: true };
    }
    if a > b {
        let r = adaptive_quadrature(f, b, a, tol);
        return QuadratureResult { value: -r.value, ..r };
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut total_err = first.error;
    let mut total_val = first.value;
    let mut total_abs = first.abs;
    heap.push(first);
    let mut panels = 1;
    let converged = loop {
        // per-panel estimates never drop below 50 eps ∫|f|
        let floor = 1e3 * f64::EPSILON * total_val.abs() + 100.0 * f64::EPSILON * total_abs;
        if total_err <= tol.max(floor) {
            break true;
        }
        if panels >= PANEL_BUDGET {
            break false;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in floating point.
            heap.push(worst);
            break false;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        total_val += left.value + right.value - worst.value;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        panels += 1;
    };
    let mut all = heap.into_vec();
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = all.iter().map(|p| p.value).sum();
    let error = all.iter().map(|p| p.error).sum();
    QuadratureResult { value, error, panels, converged }
}

/// Convenience wrapper returning an error when the tolerance is not reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive_quadrature(f, a, b, tol).into_result()
}

/// Integrates over consecutive intervals between sorted break points.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    let pieces = breaks.len().saturating_sub(1).max(1);
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        sum += integrate(&f, w[0], w[1], tol / pieces as f64)?;
    }
    Ok(sum)
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`.
///
/// Step halving continues until two successive levels agree to `tol`.
/// Endpoint singularities are handled because nodes are computed from their
/// distance to the nearest endpoint, never from `b - x`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadratureResult {
    if a == b {
        return QuadratureResult { value: 0.0, error: 0.0, panels: 0, converged: true };
    }
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Far enough that nodes sit within rounding of the endpoints.
    const T_MAX: f64 = 6.5;
    // Sum over t = k*h, contribution w(t) [f(c - half*x) + f(c + half*x)] for t > 0.
    let term = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let dist = half * 2.0 * e / (1.0 + e);
        let w = half * 0.5 * PI * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if dist == 0.0 || w == 0.0 {
            return 0.0;
        }
        // node distance from the nearest endpoint
        if t == 0.0 {
            return w * f(c);
        }
        let (lo, hi) = (a + dist, b - dist);
        let fl = if lo > a { f(lo) } else { 0.0 };
        let fh = if hi < b { f(hi) } else { 0.0 };
        w * (fl + fh)
    };
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        sum += term(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut evals = 2 * k;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            sum += term(k as f64 * h);
            k += 2;
            evals += 2;
        }
        let next = sum * h;
        let err = (next - estimate).abs();
        estimate = next;
        if err <= tol.max(1e3 * f64::EPSILON * next.abs()) {
            return QuadratureResult { value: next, error: err, panels: evals, converged: true };
        }
    }
    QuadratureResult { value: estimate, error: f64::INFINITY, panels: evals, converged: false }
}
