//! Lines in the plane and the sample grids on which Radon data is measured.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// The line {x : x·(cosθ, sinθ) = t}, with θ in [0, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParam {
    pub t: f64,
    pub theta: f64,
}

impl LineParam {
    pub const fn new(t: f64, theta: f64) -> Self {
        Self { t, theta }
    }

    /// Unit normal (cosθ, sinθ). Exact at θ = 0 and θ = π/2.
    #[inline]
    pub fn normal(&self) -> (f64, f64) {
        unit_vector(self.theta)
    }
}

/// (cosθ, sinθ), returning exact components on the two axis angles.
#[inline]
pub fn unit_vector(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (1.0, 0.0)
    } else if theta == std::f64::consts::FRAC_PI_2 {
        (0.0, 1.0)
    } else {
        let (s, c) = theta.sin_cos();
        (c, s)
    }
}

/// Point at arclength `s` along the line.
pub fn line_point(line: LineParam, s: f64) -> Point {
    let (c, sn) = line.normal();
    Point::new(line.t * c - s * sn, line.t * sn + s * c)
}

/// Inverse of [`line_point`]: the (t, s) coordinates of `p` for angle `theta`.
pub fn line_coordinates(p: Point, theta: f64) -> (f64, f64) {
    let (c, s) = unit_vector(theta);
    (p.x * c + p.y * s, -p.x * s + p.y * c)
}

/// Angle θ_l = lπ/N. Written as π·(l/N) so that l/N = 1/2 gives π/2 exactly.
#[inline]
pub fn grid_angle(l: usize, n: usize) -> f64 {
    PI * (l as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleLayout {
    Parallel { angles: usize, half_offsets: usize, spacing: f64 },
    Scattered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<LineParam>,
    pub layout: SampleLayout,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs_t(&self) -> f64 {
        self.samples.iter().map(|s| s.t.abs()).fold(0.0, f64::max)
    }
}

/// N angles times 2M+1 offsets t = kd, angle-major then offset ascending.
pub fn parallel_beam_samples(n: usize, m: usize, d: f64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("angle count must be positive".into()));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("offset spacing must be positive, got {d}")));
    }
    let mi = m as i64;
    let mut samples = Vec::with_capacity(n * (2 * m + 1));
    for l in 0..n {
        let theta = grid_angle(l, n);
        for k in -mi..=mi {
            samples.push(LineParam::new(k as f64 * d, theta));
        }
    }
    Ok(SampleSet { samples, layout: SampleLayout::Parallel { angles: n, half_offsets: m, spacing: d } })
}

/// `n` lines with t uniform on [-1, 1] and θ uniform on [0, π).
pub fn scattered_samples(n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let t = rng.gen_range(-1.0..=1.0);
            let theta = rng.gen_range(0.0..PI);
            LineParam::new(t, theta)
        })
        .collect();
    Ok(SampleSet { samples, layout: SampleLayout::Scattered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn line_point_examples() {
        assert_eq!(line_point(LineParam::new(1.0, 0.0), 0.0), Point::new(1.0, 0.0));
        let p = line_point(LineParam::new(0.0, std::f64::consts::FRAC_PI_2), 2.0);
        assert_eq!(p, Point::new(-2.0, 0.0));
    }

    #[test]
    fn line_coordinates_examples() {
        assert_eq!(line_coordinates(Point::new(1.0, 0.0), 0.0), (1.0, 0.0));
        assert_eq!(line_coordinates(Point::new(0.0, 1.0), 0.0), (0.0, 1.0));
        let theta = PI / 3.0;
        let (t, s) = line_coordinates(Point::new(0.3, -0.4), theta);
        let p = line_point(LineParam::new(t, theta), s);
        assert!((p.x - 0.3).abs() < 1e-15 && (p.y + 0.4).abs() < 1e-15);
    }

    #[test]
    fn parallel_grids() {
        let s = parallel_beam_samples(1, 0, 1.0).unwrap();
        assert_eq!(s.samples, vec![LineParam::new(0.0, 0.0)]);

        let s = parallel_beam_samples(18, 20, 0.05).unwrap();
        assert_eq!(s.len(), 738);
        assert!(s.samples.iter().all(|l| l.t.abs() <= 1.0 + 1e-15));

        let s = parallel_beam_samples(2, 1, 0.5).unwrap();
        let ts: Vec<f64> = s.samples.iter().map(|l| l.t).collect();
        let th: Vec<f64> = s.samples.iter().map(|l| l.theta).collect();
        assert_eq!(ts, vec![-0.5, 0.0, 0.5, -0.5, 0.0, 0.5]);
        assert_eq!(th, vec![0.0, 0.0, 0.0, PI / 2.0, PI / 2.0, PI / 2.0]);

        assert!(parallel_beam_samples(0, 3, 0.1).is_err());
        assert!(parallel_beam_samples(3, 3, 0.0).is_err());
    }

    #[test]
    fn half_angle_is_exact() {
        for n in [2, 4, 18, 30, 36, 50, 72] {
            assert_eq!(grid_angle(n / 2, n), std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn scattered() {
        assert!(scattered_samples(0, 1).is_err());
        assert_eq!(scattered_samples(5, 42).unwrap(), scattered_samples(5, 42).unwrap());
        let s = scattered_samples(1000, 1).unwrap();
        let mean = s.samples.iter().map(|l| l.t).sum::<f64>() / 1000.0;
        assert!(mean.abs() < 0.05);
        assert!(s.samples.iter().all(|l| (0.0..PI).contains(&l.theta) && l.t.abs() <= 1.0));
    }

    proptest! {
        #[test]
        fn round_trip(t in -3.0f64..3.0, theta in 0.0f64..PI, s in -3.0f64..3.0) {
            let line = LineParam::new(t, theta);
            let p = line_point(line, s);
            prop_assert!(((p.x * p.x + p.y * p.y) - (t * t + s * s)).abs() < 1e-12);
            let (t2, s2) = line_coordinates(p, theta);
            prop_assert!((t2 - t).abs() < 1e-12 && (s2 - s).abs() < 1e-12);
        }

        #[test]
        fn no_duplicates(n in 1usize..12, m in 0usize..8, d in 0.01f64..0.5) {
            let s = parallel_beam_samples(n, m, d).unwrap();
            prop_assert_eq!(s.len(), n * (2 * m + 1));
            for (i, a) in s.samples.iter().enumerate() {
                prop_assert!(a.theta < PI);
                for b in &s.samples[i + 1..] {
                    prop_assert!(a != b);
                }
            }
        }
    }
}
