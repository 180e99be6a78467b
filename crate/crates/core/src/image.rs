//! K×K image grids over the reconstruction square, RMSE and text encodings.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Square raster, row 0 at the top, row-major.
///
/// With c = ⌊(K+1)/2⌋ each pixel has side 1/c and pixel (r, s) has its
/// top-left corner at (s/c - 1, 1 - r/c). For even K the grid is exactly
/// [-1, 1]²; for odd K it stops 1/c short on the right and bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub k: usize,
    pub values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("image side must be positive".into()));
        }
        Ok(Self { k, values: vec![0.0; k * k] })
    }

    pub fn from_values(k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || values.len() != k * k {
            return Err(Error::DimensionMismatch(format!("{} values for a {k}x{k} image", values.len())));
        }
        Ok(Self { k, values })
    }

    /// c = ⌊(K+1)/2⌋.
    pub fn scale(&self) -> f64 {
        grid_scale(self.k)
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.values[r * self.k + s]
    }

    pub fn set(&mut self, r: usize, s: usize, v: f64) {
        self.values[r * self.k + s] = v;
    }

    pub fn pixel_center(&self, r: usize, s: usize) -> Point {
        pixel_center(self.k, r * self.k + s)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Plain-text PGM (P2), 16-bit, affine [min, max] -> [0, 65535].
    pub fn to_pgm(&self) -> String {
        let (lo, hi) = self.min_max();
        let mut out = format!("P2\n# min={lo:e} max={hi:e}\n{k} {k}\n65535\n", k = self.k);
        for r in 0..self.k {
            let row: Vec<String> = (0..self.k)
                .map(|s| {
                    let v = self.get(r, s);
                    let q = if hi > lo { ((v - lo) / (hi - lo) * 65535.0).round() } else { 0.0 };
                    format!("{}", q as u32)
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Row-major CSV with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.k {
            let row: Vec<String> = (0..self.k).map(|s| format!("{}", self.get(r, s))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut k = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            match k {
                None => k = Some(row.len()),
                Some(n) if n != row.len() => {
                    return Err(Error::Parse { line: i + 1, message: format!("expected {n} columns, found {}", row.len()) })
                }
                _ => {}
            }
            values.extend(row);
        }
        let k = k.ok_or(Error::Parse { line: 1, message: "empty image".into() })?;
        if values.len() != k * k {
            return Err(Error::Parse { line: values.len() / k + 1, message: format!("expected {k} rows") });
        }
        Ok(Self { k, values })
    }
}

pub fn grid_scale(k: usize) -> f64 {
    ((k + 1) / 2) as f64
}

/// Top-left corner of pixel `i` (row-major, 0-based).
pub fn pixel_corner(k: usize, i: usize) -> Point {
    let c = grid_scale(k);
    let (r, s) = (i / k, i % k);
    Point::new(s as f64 / c - 1.0, 1.0 - r as f64 / c)
}

pub fn pixel_center(k: usize, i: usize) -> Point {
    let c = grid_scale(k);
    let p = pixel_corner(k, i);
    Point::new(p.x + 0.5 / c, p.y - 0.5 / c)
}

/// Root mean square difference over all K² pixels.
pub fn rmse(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if a.k != b.k {
        return Err(Error::DimensionMismatch(format!("{0}x{0} vs {1}x{1}", a.k, b.k)));
    }
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((s / a.values.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rmse_examples() {
        let z = ImageGrid::zeros(4).unwrap();
        assert_eq!(rmse(&z, &z).unwrap(), 0.0);
        let o = ImageGrid::from_values(4, vec![1.0; 16]).unwrap();
        assert_eq!(rmse(&z, &o).unwrap(), 1.0);
        let a = ImageGrid::from_values(2, vec![0.0, 0.0, 3.0, 4.0]).unwrap();
        let b = ImageGrid::zeros(2).unwrap();
        assert_eq!(rmse(&a, &b).unwrap(), 2.5);
        assert!(rmse(&a, &z).is_err());
    }

    #[test]
    fn geometry_even_and_odd() {
        let g = ImageGrid::zeros(4).unwrap();
        assert_eq!(g.scale(), 2.0);
        assert_eq!(pixel_corner(4, 0), Point::new(-1.0, 1.0));
        assert_eq!(pixel_corner(4, 15), Point::new(0.5, -0.5));
        assert_eq!(g.pixel_center(0, 0), Point::new(-0.75, 0.75));
        // K = 9: c = 5, pixels of side 0.2, covering [-1, 0.8] x [-0.8, 1].
        assert_eq!(grid_scale(9), 5.0);
        let last = pixel_corner(9, 80);
        assert!((last.x - 0.6).abs() < 1e-15 && (last.y + 0.6).abs() < 1e-15);
    }

    #[test]
    fn pgm_encoding() {
        let img = ImageGrid::from_values(2, vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        let pgm = img.to_pgm();
        let body: Vec<&str> = pgm.lines().skip(4).collect();
        assert_eq!(body, vec!["0 32768", "32768 65535"]);
        let flat = ImageGrid::from_values(2, vec![3.5; 4]).unwrap().to_pgm();
        assert!(flat.lines().nth(1).unwrap().contains("min=3.5e0 max=3.5e0"));
        assert!(flat.lines().skip(4).all(|l| l == "0 0"));
    }

    #[test]
    fn csv_errors() {
        assert!(ImageGrid::from_csv("").is_err());
        assert!(ImageGrid::from_csv("1,2\n3\n").is_err());
        assert!(ImageGrid::from_csv("1,2\n3,x\n").is_err());
        assert!(ImageGrid::from_csv("1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(k in 1usize..6, seed in proptest::collection::vec(-1e6f64..1e6, 36)) {
            let img = ImageGrid::from_values(k, seed[..k * k].to_vec()).unwrap();
            prop_assert_eq!(ImageGrid::from_csv(&img.to_csv()).unwrap(), img);
        }

        #[test]
        fn rmse_is_a_metric(v in proptest::collection::vec(-5.0f64..5.0, 27)) {
            let a = ImageGrid::from_values(3, v[..9].to_vec()).unwrap();
            let b = ImageGrid::from_values(3, v[9..18].to_vec()).unwrap();
            let c = ImageGrid::from_values(3, v[18..].to_vec()).unwrap();
            let (ab, ba) = (rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
            prop_assert!(rmse(&a, &c).unwrap() <= ab + rmse(&b, &c).unwrap() + 1e-12);
        }
    }
}
