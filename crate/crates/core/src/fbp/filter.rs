//! Low-pass ramp filters and their inverse Fourier transforms.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterFamily {
    RamLak,
    SheppLogan,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub family: FilterFamily,
    /// Band limit L (angular frequency); the response vanishes for |ω| > L.
    pub bandlimit: f64,
}

impl FilterSpec {
    pub fn new(family: FilterFamily, bandlimit: f64) -> Result<Self> {
        if !(bandlimit > 0.0 && bandlimit.is_finite()) {
            return Err(Error::InvalidArgument(format!("band limit must be positive, got {bandlimit}")));
        }
        Ok(Self { family, bandlimit })
    }

    /// Band limit matched to offset spacing d through 1/(2L) = d.
    pub fn for_spacing(family: FilterFamily, d: f64) -> Result<Self> {
        Self::new(family, 1.0 / (2.0 * d))
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterFamily::RamLak => "ram-lak",
            FilterFamily::SheppLogan => "shepp-logan",
            FilterFamily::Cosine => "cosine",
        })
    }
}

impl FromStr for FilterFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ram-lak" | "ramlak" => Ok(FilterFamily::RamLak),
            "shepp-logan" => Ok(FilterFamily::SheppLogan),
            "cosine" => Ok(FilterFamily::Cosine),
            _ => Err(Error::InvalidArgument(format!("unknown filter '{s}'"))),
        }
    }
}

/// Frequency response A(ω).
pub fn filter_response(spec: &FilterSpec, omega: f64) -> f64 {
    let l = spec.bandlimit;
    let w = omega.abs();
    if w > l {
        return 0.0;
    }
    let half = PI / (2.0 * l);
    match spec.family {
        FilterFamily::RamLak => w,
        FilterFamily::SheppLogan => (2.0 * l / PI) * (half * w).sin(),
        FilterFamily::Cosine => w * (half * w).cos(),
    }
}

/// ∫₀ᴸ ω cos(kω) dω.
fn ramp_cos(k: f64, l: f64) -> f64 {
    let z = k * l;
    if z.abs() < 0.1 {
        // Σ (-1)^j z^{2j} / ((2j)! (2j+2))
        let z2 = z * z;
        let mut term = 1.0;
        let mut sum = 0.5;
        let mut fact = 1.0;
        for j in 1..6 {
            term *= -z2;
            fact *= ((2 * j - 1) * (2 * j)) as f64;
            sum += term / (fact * (2 * j + 2) as f64);
        }
        l * l * sum
    } else {
        l * z.sin() / k + (z.cos() - 1.0) / (k * k)
    }
}

/// ∫₀ᴸ sin(kω) dω.
fn sin_integral(k: f64, l: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        let s = (0.5 * k * l).sin();
        2.0 * s * s / k
    }
}

/// F⁻¹A(x) = (1/2π) ∫ A(ω) e^{iωx} dω, evaluated in closed form at any x.
pub fn filter_ift(spec: &FilterSpec, x: f64) -> f64 {
    let l = spec.bandlimit;
    let a = PI / (2.0 * l);
    match spec.family {
        FilterFamily::RamLak => ramp_cos(x, l) / PI,
        FilterFamily::SheppLogan => l / (PI * PI) * (sin_integral(a + x, l) + sin_integral(a - x, l)),
        FilterFamily::Cosine => (ramp_cos(a + x, l) + ramp_cos(a - x, l)) / (2.0 * PI),
    }
}

/// F⁻¹A at x = nπ/L, from the sampled closed forms.
pub fn filter_sampled_ift(spec: &FilterSpec, n: i64) -> f64 {
    let l = spec.bandlimit;
    let nf = n as f64;
    let q = 1.0 - 4.0 * nf * nf;
    match spec.family {
        FilterFamily::SheppLogan => 4.0 * l * l / (PI.powi(3) * q),
        FilterFamily::RamLak => {
            if n == 0 {
                l * l / (2.0 * PI)
            } else {
                // sin(πn) = 0 and sin²(πn/2) is 1 for odd n, 0 for even n.
                let odd = if n % 2 != 0 { 1.0 } else { 0.0 };
                let half = PI * nf / 2.0;
                -l * l / (2.0 * PI) * odd / (half * half)
            }
        }
        FilterFamily::Cosine => {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * l * l / PI.powi(3) * (PI * sign / q - 2.0 * (1.0 + 4.0 * nf * nf) / (q * q))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn spec(f: FilterFamily) -> FilterSpec {
        FilterSpec::new(f, 10.0).unwrap()
    }

    #[test]
    fn shepp_logan_values() {
        let s = spec(FilterFamily::SheppLogan);
        let p3 = PI.powi(3);
        assert!((filter_sampled_ift(&s, 0) - 400.0 / p3).abs() < 1e-12);
        assert!((filter_sampled_ift(&s, 0) - 12.900_613_773_279_8).abs() < 1e-9);
        assert!((filter_sampled_ift(&s, 1) + 400.0 / (3.0 * p3)).abs() < 1e-12);
        assert!((filter_sampled_ift(&s, 2) + 400.0 / (15.0 * p3)).abs() < 1e-12);
        assert!((filter_sampled_ift(&s, 3) + 400.0 / (35.0 * p3)).abs() < 1e-12);
    }

    #[test]
    fn ram_lak_limit() {
        let s = spec(FilterFamily::RamLak);
        assert!((filter_sampled_ift(&s, 0) - 100.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((filter_sampled_ift(&s, 0) - 15.915_494_309_189_533).abs() < 1e-12);
        assert_eq!(filter_sampled_ift(&s, 2), 0.0);
    }

    #[test]
    fn sampled_forms_agree_with_quadrature() {
        for fam in [FilterFamily::RamLak, FilterFamily::SheppLogan, FilterFamily::Cosine] {
            let s = spec(fam);
            for n in -5..=5 {
                let x = n as f64 * PI / s.bandlimit;
                let q = integrate(|w| filter_response(&s, w) * (w * x).cos(), 0.0, s.bandlimit, 1e-13).unwrap() / PI;
                let v = filter_sampled_ift(&s, n);
                assert!((q - v).abs() < 1e-8, "{fam} n={n}: {v} vs {q}");
                assert!((filter_ift(&s, x) - v).abs() < 1e-10, "{fam} n={n}");
            }
        }
    }

    #[test]
    fn continuous_form_off_grid() {
        for fam in [FilterFamily::RamLak, FilterFamily::SheppLogan, FilterFamily::Cosine] {
            let s = FilterSpec::new(fam, 7.3).unwrap();
            for &x in &[0.0, 1e-9, 0.013, 0.2151, PI / (2.0 * 7.3), 1.7] {
                let q = integrate(|w| filter_response(&s, w) * (w * x).cos(), 0.0, s.bandlimit, 1e-13).unwrap() / PI;
                assert!((filter_ift(&s, x) - q).abs() < 1e-9, "{fam} x={x}");
            }
        }
    }

    #[test]
    fn bandlimit_from_spacing() {
        assert_eq!(FilterSpec::for_spacing(FilterFamily::SheppLogan, 0.05).unwrap().bandlimit, 10.0);
        assert!(FilterSpec::new(FilterFamily::Cosine, 0.0).is_err());
    }
}
