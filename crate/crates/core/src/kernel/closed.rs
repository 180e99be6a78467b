//! Closed-form matrix entries a_kj = ∫ P(as + b) w(x_s) ds.

use super::AbPair;
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::special::{acosh, asinh, erf_diff};
use std::f64::consts::PI;

fn half_chord(radius: f64, r: f64) -> f64 {
    if r.abs() >= radius {
        0.0
    } else {
        (radius * radius - r * r).sqrt()
    }
}

/// Gaussian basis, window χ(‖x‖ ≤ L).
pub fn gaussian_truncation(eps: f64, l: f64, ab: AbPair) -> f64 {
    let s = half_chord(l, ab.r);
    if s == 0.0 {
        return 0.0;
    }
    if ab.a == 0.0 {
        2.0 * PI.sqrt() / eps * (-eps * eps * ab.b * ab.b).exp() * s
    } else {
        let a = ab.a.abs();
        PI / (2.0 * eps * eps * a) * erf_diff(eps * (ab.b - a * s), eps * (ab.b + a * s))
    }
}

/// Gaussian basis, window exp(-ν²‖x‖²). Valid for a = 0 as well.
pub fn gaussian_gaussian(eps: f64, nu: f64, ab: AbPair) -> f64 {
    let q = ab.a * ab.a * eps * eps + nu * nu;
    PI * (-nu * nu * (ab.r * ab.r + eps * eps * ab.b * ab.b / q)).exp() / (eps * q.sqrt())
}

/// IMQ basis with support L₁, window χ(‖x‖ ≤ H), a = 0.
pub fn imq_truncation_zero(eps: f64, l1: f64, h: f64, ab: AbPair) -> f64 {
    if ab.b.abs() >= l1 || ab.r.abs() >= h {
        return 0.0;
    }
    let q = (l1 * l1 - ab.b * ab.b) / (1.0 + eps * eps * ab.b * ab.b);
    4.0 / eps * asinh(eps * q.sqrt()) * half_chord(h, ab.r)
}

/// Integration bounds in u = ε(as + b) for the IMQ a ≠ 0 entry.
pub fn imq_bounds(eps: f64, l1: f64, h: f64, ab: AbPair) -> Option<(f64, f64)> {
    let s = half_chord(h, ab.r);
    let a = ab.a.abs();
    let c1 = eps * (-l1).max(ab.b - a * s);
    let c2 = eps * l1.min(ab.b + a * s);
    (c1 < c2).then_some((c1, c2))
}

fn imq_u_integrand(m: f64, u: f64) -> f64 {
    let q = ((m * m - u * u) / (1.0 + u * u)).max(0.0);
    asinh(q.sqrt())
}

fn imq_antiderivative_raw(u: f64, m: f64) -> f64 {
    let m2 = m * m;
    let s = (m2 + 1.0).sqrt();
    let w = (m2 - u * u).max(0.0);
    let root = w.sqrt();
    0.5 * u * imq_u_integrand(m, u) - (1.0 + m2) * u.atan()
        + s * (s - 1.0) * (u / m).clamp(-1.0, 1.0).acos()
        + m2 * (u * ((m2 + 1.0) / w).sqrt()).atan()
        + 2.0 * (m2 + 1.0) * (u / (root + s + 1.0)).atan()
}

/// The printed antiderivative of asinh(√((M² - u²)/(1 + u²))).
pub fn imq_antiderivative(u: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) || u.abs() >= m {
        return Err(Error::Domain(format!("antiderivative needs |u| < M, got u={u}, M={m}")));
    }
    Ok(imq_antiderivative_raw(u, m))
}

/// IMQ a ≠ 0 entry through the printed antiderivative.
pub fn imq_truncation_antiderivative(eps: f64, l1: f64, h: f64, ab: AbPair) -> f64 {
    match imq_bounds(eps, l1, h, ab) {
        None => 0.0,
        Some((c1, c2)) => {
            let m = eps * l1;
            2.0 / (eps * eps * ab.a.abs()) * (imq_antiderivative_raw(c2, m) - imq_antiderivative_raw(c1, m))
        }
    }
}

/// IMQ a ≠ 0 entry by quadrature of the u-integrand.
pub fn imq_truncation_quadrature(eps: f64, l1: f64, h: f64, ab: AbPair, tol: f64) -> Result<f64> {
    let Some((c1, c2)) = imq_bounds(eps, l1, h, ab) else {
        return Ok(0.0);
    };
    let m = eps * l1;
    let pre = 2.0 / (eps * eps * ab.a.abs());
    let f = |u| imq_u_integrand(m, u);
    // cusp of the integrand at u = 0
    let v = if c1 < 0.0 && c2 > 0.0 {
        integrate(f, c1, 0.0, 0.5 * tol / pre)? + integrate(f, 0.0, c2, 0.5 * tol / pre)?
    } else {
        integrate(f, c1, c2, tol / pre)?
    };
    Ok(pre * v)
}

/// The printed multiquadric entry under a Gaussian window.
pub fn mq_gaussian_printed(rho: f64, eps: f64, nu: f64, ab: AbPair) -> f64 {
    let (a, b, r) = (ab.a, ab.b, ab.r);
    let q = nu * nu + eps * eps * a * a;
    let e = 1.0 / (eps * eps) - nu * nu * eps * eps * b * b / q - nu * nu * r * r;
    let bracket = 1.0 / rho + 0.5 * rho * (a * a * q + 2.0 * b * b * nu.powi(4)) / (q * q);
    PI * e.exp() / (2.0 * eps * q.sqrt()) * bracket
}

fn u3_acosh(u: f64) -> f64 {
    if u.abs() < 1e-100 {
        0.0
    } else {
        u * u * u * acosh(1.0 / u.abs()).unwrap_or(0.0)
    }
}

/// Bracketed antiderivative of the compact-window Wendland entry, a ≠ 0.
pub(crate) fn wendland_bracket(u: f64, eps: f64, nu: f64, ab: AbPair) -> f64 {
    let be = ab.b * eps;
    let w = 1.0 - nu * nu * ab.r * ab.r;
    let k = nu * nu / (eps * eps * ab.a * ab.a);
    let q1 = 6.0 * u * u - 15.0 * be * u + 10.0 * be * be;
    let q2 = 20.0 / 3.0 * u.powi(5) - 16.0 * be * u.powi(4) + (10.0 * be * be + 19.0 / 3.0) * u.powi(3)
        - 14.0 / 3.0 * be * u * u
        + (15.0 * be * be - 0.5) * u
        - 28.0 / 3.0 * be;
    let root = (1.0 - u * u).max(0.0).sqrt();
    0.5 * u.asin() * (w - k * (be * be + 0.1))
        + root * (u * (u * u + 1.5) * w - k * q2 / 10.0 - 4.0 * k * be / 3.0 * (1.0 - u * u))
        + u3_acosh(u) * (k * q1 / 5.0 - 2.0 * w)
}

/// Wendland φ₂,₀ basis, window (1 - ν²‖x‖²)₊: the printed piecewise formulas.
pub fn wendland_ab(eps: f64, nu: f64, ab: AbPair) -> f64 {
    if nu * ab.r.abs() > 1.0 {
        return 0.0;
    }
    let (b, r) = (ab.b, ab.r);
    if ab.a == 0.0 {
        if eps * b.abs() > 1.0 {
            return 0.0;
        }
        if b == 0.0 {
            return 8.0 / (9.0 * eps) * (1.0 / (nu * nu) - r * r).powf(2.0 / 3.0);
        }
        let x = eps * b.abs();
        let x2 = x * x;
        let w = 1.0 - nu * nu * r * r;
        return 8.0 / 3.0 * w.powf(1.5) / (eps * nu)
            * ((1.0 - x2).sqrt() * (2.0 * x2 + 1.0) / 3.0 - 2.0 * x2 * acosh(1.0 / x).unwrap_or(0.0));
    }
    let a = ab.a.abs();
    let s = (1.0 / (nu * nu) - r * r).max(0.0).sqrt();
    let c1 = (-1.0f64).max(b * eps - eps * a * s);
    let c2 = 1.0f64.min(b * eps + eps * a * s);
    if c1 >= c2 {
        return 0.0;
    }
    (wendland_bracket(c2, eps, nu, ab) - wendland_bracket(c1, eps, nu, ab)) / (3.0 * eps * eps * a)
}
