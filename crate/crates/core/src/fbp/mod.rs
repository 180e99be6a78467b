//! Filtered back-projection on parallel-beam data.
//!
//! The filter is applied in cycle units: with band limit L and spacing
//! d = 1/(2L) the continuous kernel at t = nd equals 2π·(F⁻¹A)(nπ/L), so the
//! Riemann sum of the radial convolution carries the factor 4π²d once the
//! angular sum is written as (1/2N)·Σ_k.

pub mod filter;
pub mod signal;

pub use filter::{filter_ift, filter_response, filter_sampled_ift, FilterFamily, FilterSpec};
pub use signal::{discrete_convolve, interpolate, periodic_convolve, DiscreteSignal, Interpolation};

use crate::error::{Error, Result};
use crate::geometry::{grid_angle, unit_vector, Point, SampleLayout};
use crate::image::{pixel_center, ImageGrid};
use crate::sinogram::Sinogram;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbpAlgorithm {
    /// Convolve each projection with the sampled filter, then interpolate.
    I,
    /// Interpolate the sampled filter and weight the raw projections.
    II,
}

impl fmt::Display for FbpAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FbpAlgorithm::I => "I",
            FbpAlgorithm::II => "II",
        })
    }
}

impl FromStr for FbpAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" | "i" => Ok(FbpAlgorithm::I),
            "II" | "2" | "ii" => Ok(FbpAlgorithm::II),
            _ => Err(Error::InvalidArgument(format!("unknown FBP algorithm '{s}'"))),
        }
    }
}

/// (1/N) Σ_k h(x cos θ_k + y sin θ_k, θ_k) with θ_k = kπ/N.
pub fn back_project_discrete<H: Fn(f64, f64) -> f64>(h: H, p: Point, n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        let theta = grid_angle(k, n);
        let (c, s) = unit_vector(theta);
        sum += h(p.x * c + p.y * s, theta);
    }
    sum / n as f64
}

/// Filter kernel samples at t = nd for |n| <= reach, including the 4π²d weight.
fn kernel_samples(spec: &FilterSpec, d: f64, reach: i64) -> DiscreteSignal {
    let matched = (2.0 * spec.bandlimit * d - 1.0).abs() < 1e-12;
    let w = 4.0 * PI * PI * d;
    let values = (-reach..=reach)
        .map(|n| {
            let phi = if matched {
                filter_sampled_ift(spec, n)
            } else {
                filter_ift(spec, 2.0 * PI * n as f64 * d)
            };
            w * phi
        })
        .collect();
    DiscreteSignal::new(-reach, d, values)
}

pub fn reconstruct_fbp(
    sino: &Sinogram,
    spec: &FilterSpec,
    scheme: Interpolation,
    k: usize,
    algorithm: FbpAlgorithm,
) -> Result<ImageGrid> {
    let SampleLayout::Parallel { angles, half_offsets, spacing } = sino.samples.layout else {
        return Err(Error::ScatteredLayout);
    };
    if k == 0 {
        return Err(Error::InvalidArgument("image side must be positive".into()));
    }
    let width = 2 * half_offsets + 1;
    if sino.values.len() != angles * width {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {angles} angles x {width} offsets",
            sino.values.len()
        )));
    }
    let m = half_offsets as i64;
    let d = spacing;
    let trig: Vec<(f64, f64)> = (0..angles).map(|l| unit_vector(sino.samples.samples[l * width].theta)).collect();
    let projections: Vec<DiscreteSignal> = (0..angles)
        .map(|l| DiscreteSignal::new(-m, d, sino.values[l * width..(l + 1) * width].to_vec()))
        .collect();
    let scale = 1.0 / (2.0 * angles as f64);

    let values = match algorithm {
        FbpAlgorithm::I => {
            let phi = kernel_samples(spec, d, 2 * m);
            let filtered: Vec<DiscreteSignal> = projections
                .iter()
                .map(|p| {
                    let full = discrete_convolve(&phi, p).expect("equal spacing");
                    let vals = (-m..=m).map(|i| full.get(i)).collect();
                    DiscreteSignal::new(-m, d, vals)
                })
                .collect();
            crate::par::map_collect(k * k, |i| {
                let p = pixel_center(k, i);
                let mut sum = 0.0;
                for (g, &(c, s)) in filtered.iter().zip(&trig) {
                    sum += interpolate(g, p.x * c + p.y * s, scheme);
                }
                sum * scale
            })
        }
        FbpAlgorithm::II => {
            let reach = (2f64.sqrt() / d).ceil() as i64 + m + 3;
            let phi = kernel_samples(spec, d, reach);
            crate::par::map_collect(k * k, |i| {
                let p = pixel_center(k, i);
                let mut sum = 0.0;
                for (proj, &(c, s)) in projections.iter().zip(&trig) {
                    let t = p.x * c + p.y * s;
                    for (j, &v) in proj.values.iter().enumerate() {
                        if v != 0.0 {
                            let tj = (j as i64 - m) as f64 * d;
                            sum += v * interpolate(&phi, t - tj, scheme);
                        }
                    }
                }
                sum * scale
            })
        }
    };
    ImageGrid::from_values(k, values)
}

/// Full width at half maximum of a sampled unimodal profile.
pub fn fwhm(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::DimensionMismatch("fwhm needs matching abscissae and at least 3 samples".into()));
    }
    let imax = ys
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > ys[best] { i } else { best });
    let peak = ys[imax];
    let rising = ys[..=imax].windows(2).all(|w| w[0] <= w[1]);
    let falling = ys[imax..].windows(2).all(|w| w[0] >= w[1]);
    let half = peak / 2.0;
    if !(rising && falling) || peak <= 0.0 || ys[0] >= half || ys[ys.len() - 1] >= half {
        return Err(Error::NotUnimodal);
    }
    let cross = |i: usize, j: usize| xs[i] + (half - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i]);
    let left = (0..imax).rev().find(|&i| ys[i] < half).map(|i| cross(i, i + 1)).ok_or(Error::NotUnimodal)?;
    let right = (imax + 1..ys.len()).find(|&i| ys[i] < half).map(|i| cross(i - 1, i)).ok_or(Error::NotUnimodal)?;
    Ok(right - left)
}
