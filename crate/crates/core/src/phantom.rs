//! Analytic phantoms built from discs and ellipses, with exact Radon transforms.

use crate::error::{Error, Result};
use crate::geometry::{LineParam, Point};
use crate::image::ImageGrid;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscComponent {
    pub center: Point,
    pub radius: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseComponent {
    pub center: Point,
    /// Semi-axis along the rotated x direction.
    pub a: f64,
    /// Semi-axis along the rotated y direction.
    pub b: f64,
    /// Counter-clockwise rotation in radians.
    pub phi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Disc(DiscComponent),
    Ellipse(EllipseComponent),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub name: String,
    pub components: Vec<Component>,
}

/// Chord length of a centered disc of radius `r` at offset `t`.
pub fn radon_disc(r: f64, t: f64) -> f64 {
    if t.abs() <= r {
        2.0 * (r * r - t * t).max(0.0).sqrt()
    } else {
        0.0
    }
}

fn shifted(center: Point, line: LineParam) -> f64 {
    let (c, s) = line.normal();
    line.t - center.x * c - center.y * s
}

impl Component {
    pub fn radon(&self, line: LineParam) -> f64 {
        match *self {
            Component::Disc(d) => d.weight * radon_disc(d.radius, shifted(d.center, line)),
            Component::Ellipse(e) => {
                let t = shifted(e.center, line);
                let (s, c) = (line.theta - e.phi).sin_cos();
                let rho2 = e.a * e.a * c * c + e.b * e.b * s * s;
                if t * t <= rho2 {
                    e.weight * 2.0 * e.a * e.b / rho2 * (rho2 - t * t).sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn density(&self, p: Point) -> f64 {
        match *self {
            Component::Disc(d) => {
                let (dx, dy) = (p.x - d.center.x, p.y - d.center.y);
                if dx * dx + dy * dy <= d.radius * d.radius {
                    d.weight
                } else {
                    0.0
                }
            }
            Component::Ellipse(e) => {
                let (dx, dy) = (p.x - e.center.x, p.y - e.center.y);
                let (s, c) = e.phi.sin_cos();
                let u = (dx * c + dy * s) / e.a;
                let v = (-dx * s + dy * c) / e.b;
                if u * u + v * v <= 1.0 {
                    e.weight
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Component::Disc(d) => d.weight * PI * d.radius * d.radius,
            Component::Ellipse(e) => e.weight * PI * e.a * e.b,
        }
    }
}

impl Phantom {
    pub fn new(name: impl Into<String>, components: Vec<Component>) -> Self {
        Self { name: name.into(), components }
    }

    pub fn empty() -> Self {
        Self::new("empty", Vec::new())
    }

    pub fn disc(cx: f64, cy: f64, radius: f64, weight: f64) -> Component {
        Component::Disc(DiscComponent { center: Point::new(cx, cy), radius, weight })
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64, phi_deg: f64, weight: f64) -> Component {
        Component::Ellipse(EllipseComponent {
            center: Point::new(cx, cy),
            a,
            b,
            phi: phi_deg.to_radians(),
            weight,
        })
    }

    /// Total integral of the density.
    pub fn mass(&self) -> f64 {
        self.components.iter().map(Component::mass).sum()
    }
}

/// Exact Radon transform by linearity and the shift property.
pub fn radon_analytic(ph: &Phantom, line: LineParam) -> f64 {
    ph.components.iter().map(|c| c.radon(line)).sum()
}

/// Radon transform of x -> f(h x), i.e. (1/h) Rf(h t, θ).
pub fn radon_scaled(ph: &Phantom, h: f64, line: LineParam) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {h}")));
    }
    if h == 1.0 {
        return Ok(radon_analytic(ph, line));
    }
    Ok(radon_analytic(ph, LineParam::new(h * line.t, line.theta)) / h)
}

pub fn eval_density(ph: &Phantom, p: Point) -> f64 {
    ph.components.iter().map(|c| c.density(p)).sum()
}

/// Samples the density at pixel centers of a K×K grid.
pub fn rasterize(ph: &Phantom, k: usize) -> Result<ImageGrid> {
    let mut img = ImageGrid::zeros(k)?;
    for r in 0..k {
        for s in 0..k {
            let p = img.pixel_center(r, s);
            img.set(r, s, eval_density(ph, p));
        }
    }
    Ok(img)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["crescent", "bulls-eye", "shepp-logan"];

pub fn builtin(name: &str) -> Result<Phantom> {
    match name {
        "crescent" => Ok(Phantom::new(
            "crescent",
            vec![Phantom::disc(0.0, 0.0, 0.5, 1.0), Phantom::disc(0.125, 0.0, 0.375, -0.5)],
        )),
        "bulls-eye" | "bullseye" => Ok(Phantom::new(
            "bulls-eye",
            vec![
                Phantom::disc(0.0, 0.0, 0.8, 0.5),
                Phantom::disc(0.0, 0.0, 0.55, 0.5),
                Phantom::disc(0.0, 0.0, 0.3, -0.25),
            ],
        )),
        "shepp-logan" => Ok(Phantom::new("shepp-logan", shepp_logan_components())),
        other => Err(Error::UnknownPhantom(other.to_string())),
    }
}

// Original Shepp-Logan table: center, semi-axes (x, y), rotation in degrees, intensity.
fn shepp_logan_components() -> Vec<Component> {
    const TABLE: [(f64, f64, f64, f64, f64, f64); 10] = [
        (0.0, 0.0, 0.69, 0.92, 0.0, 2.0),
        (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98),
        (0.22, 0.0, 0.11, 0.31, -18.0, -0.02),
        (-0.22, 0.0, 0.16, 0.41, 18.0, -0.02),
        (0.0, 0.35, 0.21, 0.25, 0.0, 0.01),
        (0.0, 0.1, 0.046, 0.046, 0.0, 0.01),
        (0.0, -0.1, 0.046, 0.046, 0.0, 0.01),
        (-0.08, -0.605, 0.046, 0.023, 0.0, 0.01),
        (0.0, -0.606, 0.023, 0.023, 0.0, 0.01),
        (0.06, -0.605, 0.023, 0.046, 0.0, 0.01),
    ];
    TABLE
        .iter()
        .map(|&(cx, cy, a, b, phi, w)| Phantom::ellipse(cx, cy, a, b, phi, w))
        .collect()
}
