//! Finitely supported discrete signals: convolution and W-interpolation.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Samples f_n for n = start, start+1, ..., zero elsewhere, at spacing d.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSignal {
    pub start: i64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl DiscreteSignal {
    pub fn new(start: i64, spacing: f64, values: Vec<f64>) -> Self {
        Self { start, spacing, values }
    }

    /// Samples on the symmetric window -M..M.
    pub fn centered(spacing: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() % 2 != 1 {
            return Err(Error::InvalidArgument("centered signal needs an odd number of samples".into()));
        }
        let m = (values.len() / 2) as i64;
        Ok(Self::new(-m, spacing, values))
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    #[inline]
    pub fn get(&self, n: i64) -> f64 {
        let i = n - self.start;
        if i >= 0 && (i as usize) < self.values.len() {
            self.values[i as usize]
        } else {
            0.0
        }
    }
}

/// Full convolution (f*g)_m = Σ_j f_j g_{m-j}.
pub fn discrete_convolve(f: &DiscreteSignal, g: &DiscreteSignal) -> Result<DiscreteSignal> {
    if (f.spacing - g.spacing).abs() > 1e-12 * f.spacing.abs().max(g.spacing.abs()) {
        return Err(Error::SpacingMismatch(f.spacing, g.spacing));
    }
    if f.values.is_empty() || g.values.is_empty() {
        return Ok(DiscreteSignal::new(f.start + g.start, f.spacing, Vec::new()));
    }
    let mut out = vec![0.0; f.values.len() + g.values.len() - 1];
    for (i, &a) in f.values.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in g.values.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Ok(DiscreteSignal::new(f.start + g.start, f.spacing, out))
}

/// Convolution of the (2M+1)-periodic extensions of f and g restricted to
/// -M..M, evaluated at m = -M..M.
pub fn periodic_convolve(f: &DiscreteSignal, g: &DiscreteSignal, m: usize) -> Result<DiscreteSignal> {
    if (f.spacing - g.spacing).abs() > 1e-12 * f.spacing.abs().max(g.spacing.abs()) {
        return Err(Error::SpacingMismatch(f.spacing, g.spacing));
    }
    let mi = m as i64;
    let p = 2 * mi + 1;
    let wrap = |n: i64| (n + mi).rem_euclid(p) - mi;
    let out = (-mi..=mi)
        .map(|k| (-mi..=mi).map(|j| g.get(j) * f.get(wrap(k - j))).sum())
        .collect();
    Ok(DiscreteSignal::new(-mi, f.spacing, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Nearest,
    Linear,
    /// Catmull-Rom four-point kernel.
    Cubic,
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpolation::Nearest => "nearest",
            Interpolation::Linear => "linear",
            Interpolation::Cubic => "cubic",
        })
    }
}

impl FromStr for Interpolation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Interpolation::Nearest),
            "linear" => Ok(Interpolation::Linear),
            "cubic" => Ok(Interpolation::Cubic),
            _ => Err(Error::InvalidArgument(format!("unknown interpolation '{s}'"))),
        }
    }
}

fn catmull_rom(u: f64) -> f64 {
    let a = u.abs();
    if a <= 1.0 {
        (1.5 * a - 2.5) * a * a + 1.0
    } else if a < 2.0 {
        ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0
    } else {
        0.0
    }
}

/// I_W(f)(x) = Σ_m f_m W(x/d - m), with zero outside the sampled range.
pub fn interpolate(f: &DiscreteSignal, x: f64, scheme: Interpolation) -> f64 {
    if f.values.is_empty() {
        return 0.0;
    }
    let mut u = x / f.spacing;
    // x = k*d must land exactly on k even when the division rounds
    if (u - u.round()).abs() < 1e-9 {
        u = u.round();
    }
    let lo = f.start as f64;
    let hi = (f.end() - 1) as f64;
    // small slack so x = k*d reproduces the end samples despite rounding
    if u < lo - 1e-9 || u > hi + 1e-9 {
        return 0.0;
    }
    match scheme {
        Interpolation::Nearest => {
            // ties go to the lower index
            let m = (u - 0.5).ceil() as i64;
            f.get(m)
        }
        Interpolation::Linear => {
            let m = u.floor();
            let w = u - m;
            let m = m as i64;
            if w == 0.0 {
                f.get(m)
            } else {
                (1.0 - w) * f.get(m) + w * f.get(m + 1)
            }
        }
        Interpolation::Cubic => {
            let m = u.floor();
            let w = u - m;
            let m = m as i64;
            if w == 0.0 {
                return f.get(m);
            }
            (-1..=2).map(|j| f.get(m + j) * catmull_rom(w - j as f64)).sum()
        }
    }
}
