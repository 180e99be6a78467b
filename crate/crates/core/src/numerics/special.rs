use crate::error::{Error, Result};

/// Error function. Delegates to the musl-derived `libm` routine (sub-ulp accurate).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// erf(hi) - erf(lo) without cancellation when both arguments sit in the same tail.
pub fn erf_diff(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        erfc(lo) - erfc(hi)
    } else if hi <= 0.0 {
        erfc(-hi) - erfc(-lo)
    } else {
        erf(hi) - erf(lo)
    }
}

pub fn asinh(x: f64) -> f64 {
    // std uses a log1p formulation, which already avoids the cancellation of
    // ln(x + sqrt(1 + x^2)) near zero; the odd series is kept for tiny x.
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x * (1.0 - x2 / 6.0 + 3.0 * x2 * x2 / 40.0)
    } else {
        x.asinh()
    }
}

pub fn acosh(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 {
        return Err(Error::Domain(format!("acosh({x}) needs x >= 1")));
    }
    let y = x - 1.0;
    if y < 1e-6 {
        // acosh(1 + y) = sqrt(2y) (1 - y/12 + 3y^2/160)
        Ok((2.0 * y).sqrt() * (1.0 - y / 12.0 + 3.0 * y * y / 160.0))
    } else {
        Ok(x.acosh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate;
    use std::f64::consts::PI;

    #[test]
    fn erf_basics() {
        assert_eq!(erf(0.0), 0.0);
        for &x in &[0.1, 0.7, 1.3, 2.9, 5.0] {
            assert!((erf(-x) + erf(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn erf_against_its_definition() {
        for &x in &[0.25, 1.0, 2.0, 3.5] {
            let q = integrate(|u| (-u * u).exp(), 0.0, x, 1e-14).unwrap();
            assert!((erf(x) - 2.0 / PI.sqrt() * q).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn erf_diff_tails() {
        let d = erf_diff(6.0, 7.0);
        let q = 2.0 / PI.sqrt() * integrate(|u| (-u * u).exp(), 6.0, 7.0, 1e-30).unwrap();
        assert!((d - q).abs() / q < 1e-10);
        assert_eq!(erf_diff(-7.0, -6.0), erf_diff(6.0, 7.0));
    }

    #[test]
    fn inverse_hyperbolics() {
        assert_eq!(asinh(0.0), 0.0);
        assert_eq!(acosh(1.0).unwrap(), 0.0);
        assert!((asinh(1.0) - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!(acosh(0.5).is_err());
        for &x in &[1e-8f64, 1e-5, 3e-4, 0.5, 4.0] {
            // x - x³/6 + 3x⁵/40 is exact to rounding below 1e-3
            let exact = if x < 1e-3 { x - x.powi(3) / 6.0 + 3.0 * x.powi(5) / 40.0 } else { (x + (1.0 + x * x).sqrt()).ln() };
            assert!((asinh(x) - exact).abs() <= 1e-13 * exact.abs().max(1e-300) + 1e-16);
        }
        for &x in &[1.0f64 + 1e-9, 1.0 + 1e-7, 1.5, 10.0] {
            let e = x - 1.0;
            let exact = if e < 1e-3 { (2.0 * e).sqrt() * (1.0 - e / 12.0 + 3.0 * e * e / 160.0) } else { (x + (x * x - 1.0).sqrt()).ln() };
            assert!((acosh(x).unwrap() - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn asinh_sinh_round_trip() {
        let mut x: f64 = -10.0;
        while x <= 10.0 {
            let s = (x.exp() - (-x).exp()) / 2.0;
            assert!((asinh(s) - x).abs() < 1e-12, "x={x}");
            x += 0.173;
        }
    }

    #[test]
    fn erf_monotone_and_bounded() {
        let mut prev = -1.0;
        // In double precision erf rounds to +-1 beyond |x| ~ 5.9, so strictness is checked inside that.
        for i in -800..=800 {
            let x = i as f64 * 0.01;
            let v = erf(x);
            assert!(v >= prev && (-1.0..=1.0).contains(&v));
            if x.abs() <= 5.0 {
                assert!(v > -1.0 && v < 1.0);
            }
            prev = v;
        }
    }
}
