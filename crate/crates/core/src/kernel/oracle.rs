//! Matrix entries by direct quadrature along the evaluation line.

use super::basis::PreparedModel;
use super::{AbPair, WindowFamily, WindowSpec};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive_quadrature, tanh_sinh, QuadratureResult};

/// A Gaussian window is integrated over |s| ≤ GAUSS_WINDOW_REACH/ν; the
/// neglected tail is below e^{-100} times the peak.
pub const GAUSS_WINDOW_REACH: f64 = 10.0;

/// Break points covering the support of s ↦ P(as + b)·w(x_s), or `None` when
/// the integrand vanishes identically.
pub(crate) fn pieces(prep: &PreparedModel, window: &WindowSpec, ab: AbPair) -> Result<Option<Vec<f64>>> {
    let r = ab.r;
    let (mut lo, mut hi) = match window.family {
        WindowFamily::None => (f64::NEG_INFINITY, f64::INFINITY),
        WindowFamily::Truncation { l } => {
            if r.abs() >= l {
                return Ok(None);
            }
            let s = (l * l - r * r).sqrt();
            (-s, s)
        }
        WindowFamily::Gaussian { nu } => (-GAUSS_WINDOW_REACH / nu, GAUSS_WINDOW_REACH / nu),
        WindowFamily::Compact { nu } => {
            if nu * r.abs() >= 1.0 {
                return Ok(None);
            }
            let s = (1.0 / (nu * nu) - r * r).sqrt();
            (-s, s)
        }
    };
    let t = prep.support();
    let mut breaks = Vec::with_capacity(3);
    if ab.a == 0.0 {
        if ab.b.abs() > t {
            return Ok(None);
        }
    } else {
        let s0 = (-t - ab.b) / ab.a;
        let s1 = (t - ab.b) / ab.a;
        lo = lo.max(s0.min(s1));
        hi = hi.min(s0.max(s1));
    }
    if !(lo < hi) {
        return Ok(None);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain("entry diverges: a = 0 needs a window".into()));
    }
    breaks.push(lo);
    if ab.a != 0.0 {
        let peak = -ab.b / ab.a;
        if lo < peak && peak < hi {
            breaks.push(peak);
        }
    }
    breaks.push(hi);
    Ok(Some(breaks))
}

fn integrand<'a>(prep: &'a PreparedModel, window: &'a WindowSpec, ab: AbPair) -> impl Fn(f64) -> f64 + 'a {
    move |s| prep.profile(ab.a * s + ab.b) * window.weight(ab.r, s)
}

fn run(
    prep: &PreparedModel,
    window: &WindowSpec,
    ab: AbPair,
    tol: f64,
    rule: fn(&dyn Fn(f64) -> f64, f64, f64, f64) -> QuadratureResult,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let Some(br) = pieces(prep, window, ab)? else {
        return Ok(0.0);
    };
    let f = integrand(prep, window, ab);
    let share = tol / (br.len() - 1) as f64;
    let mut sum = 0.0;
    for w in br.windows(2) {
        sum += rule(&f, w[0], w[1], share).into_result()?;
    }
    Ok(sum)
}

fn gk_rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> QuadratureResult {
    adaptive_quadrature(f, a, b, tol)
}

fn ts_rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> QuadratureResult {
    tanh_sinh(f, a, b, tol)
}

/// Entry by adaptive Gauss-Kronrod quadrature, absolute error ≤ tol.
pub fn oracle_entry_ab(prep: &PreparedModel, window: &WindowSpec, ab: AbPair, tol: f64) -> Result<f64> {
    run(prep, window, ab, tol, gk_rule)
}

/// The same integral by tanh-sinh quadrature.
pub fn oracle_entry_alt_ab(prep: &PreparedModel, window: &WindowSpec, ab: AbPair, tol: f64) -> Result<f64> {
    run(prep, window, ab, tol, ts_rule)
}
