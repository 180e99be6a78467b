//! Algebraic reconstruction with pixel basis functions.

use crate::error::{Error, Result};
use crate::geometry::{unit_vector, LineParam, SampleSet};
use crate::image::{grid_scale, pixel_corner, ImageGrid};
use crate::numerics::{DenseMatrix, Lu};
use crate::sinogram::Sinogram;
use std::f64::consts::FRAC_PI_2;

/// Length of the intersection of a line with pixel `i` (row-major, 0-based).
///
/// Pixels are half-open, [x, x + 1/c) × (y - 1/c, y], with the last column
/// and last row closed on the right and bottom.
pub fn pixel_radon(i: usize, k: usize, line: LineParam) -> Result<f64> {
    if i >= k * k {
        return Err(Error::IndexOutOfRange { index: i, len: k * k });
    }
    Ok(pixel_radon_unchecked(i, k, line))
}

fn pixel_radon_unchecked(i: usize, k: usize, line: LineParam) -> f64 {
    let side = 1.0 / grid_scale(k);
    let corner = pixel_corner(k, i);
    let (x0, y0) = (corner.x, corner.y);
    let (x1, y1) = (x0 + side, y0 - side);
    let t = line.t;
    if line.theta == 0.0 {
        let last_col = i % k == k - 1;
        return if (x0 <= t && t < x1) || (last_col && t == x1) { side } else { 0.0 };
    }
    if line.theta == FRAC_PI_2 {
        let last_row = i / k == k - 1;
        return if (y1 < t && t <= y0) || (last_row && t == y1) { side } else { 0.0 };
    }
    let (c, s) = unit_vector(line.theta);
    let mut th = [x0 * c + y0 * s, x1 * c + y0 * s, x0 * c + y1 * s, x1 * c + y1 * s];
    th.sort_by(f64::total_cmp);
    if t < th[0] || t > th[3] {
        return 0.0;
    }
    let sc = (s * c).abs();
    let r2 = side * (1.0 / c.abs()).min(1.0 / s.abs());
    // min(r2, ...) also covers |sc| -> 0, where the r1/r3 ramps become vertical.
    if t < th[1] {
        r2.min((t - th[0]) / sc)
    } else if t <= th[2] {
        r2
    } else {
        r2.min((th[3] - t) / sc)
    }
}

/// Row-compressed nonnegative system matrix with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn row(&self, j: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[j], self.row_ptr[j + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn from_dense(a: &DenseMatrix, rhs: Vec<f64>) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..a.rows {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { cols: a.cols, row_ptr, col_idx, values, rhs }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|j| {
                let (c, v) = self.row(j);
                c.iter().zip(v).map(|(&i, &a)| a * x[i]).sum()
            })
            .collect()
    }

    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        self.mul_vec(x)
            .iter()
            .zip(&self.rhs)
            .map(|(a, p)| (a - p) * (a - p))
            .sum::<f64>()
            .sqrt()
    }

    pub fn with_rhs(mut self, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!("{} rhs values for {} rows", rhs.len(), self.rows())));
        }
        self.rhs = rhs;
        Ok(self)
    }
}

/// Entry (j, i) = pixel_radon(i, K, sample j); rhs is zero.
pub fn assemble_system(s: &SampleSet, k: usize) -> Result<SparseSystem> {
    if k == 0 {
        return Err(Error::InvalidArgument("image side must be positive".into()));
    }
    let rows: Vec<Vec<(usize, f64)>> = crate::par::map_collect(s.len(), |j| {
        let line = s.samples[j];
        (0..k * k)
            .filter_map(|i| {
                let v = pixel_radon_unchecked(i, k, line);
                (v != 0.0).then_some((i, v))
            })
            .collect()
    });
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for r in rows {
        for (i, v) in r {
            col_idx.push(i);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseSystem { cols: k * k, row_ptr, col_idx, values, rhs: vec![0.0; s.len()] })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KaczmarzConfig {
    pub lambda: f64,
    pub max_sweeps: usize,
    pub tol: f64,
    /// Starting vector; zero when `None`.
    pub initial: Option<Vec<f64>>,
}

impl Default for KaczmarzConfig {
    fn default() -> Self {
        Self { lambda: 1.0, max_sweeps: 50, tol: 1e-10, initial: None }
    }
}

impl KaczmarzConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 2.0) {
            return Err(Error::InvalidArgument(format!("relaxation must lie in (0, 2), got {}", self.lambda)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

/// x <- x - λ (r·x - p)/‖r‖² r, touching only the nonzero coordinates of r.
pub fn project_row(x: &mut [f64], cols: &[usize], vals: &[f64], p: f64, lambda: f64) {
    let norm2: f64 = vals.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return;
    }
    let dot: f64 = cols.iter().zip(vals).map(|(&i, &v)| v * x[i]).sum();
    let step = lambda * (dot - p) / norm2;
    for (&i, &v) in cols.iter().zip(vals) {
        x[i] -= step * v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KaczmarzResult {
    pub x: Vec<f64>,
    /// ‖Ax - p‖₂ for the starting point and after every sweep.
    pub residuals: Vec<f64>,
}

pub fn kaczmarz_solve(sys: &SparseSystem, cfg: &KaczmarzConfig) -> Result<KaczmarzResult> {
    cfg.validate()?;
    let mut x = match &cfg.initial {
        Some(v) if v.len() == sys.cols => v.clone(),
        Some(v) => return Err(Error::DimensionMismatch(format!("initial guess has {} entries, need {}", v.len(), sys.cols))),
        None => vec![0.0; sys.cols],
    };
    let mut residuals = vec![sys.residual_norm(&x)];
    for _ in 0..cfg.max_sweeps {
        if *residuals.last().unwrap() <= cfg.tol {
            break;
        }
        for j in 0..sys.rows() {
            let (c, v) = sys.row(j);
            project_row(&mut x, c, v, sys.rhs[j], cfg.lambda);
        }
        residuals.push(sys.residual_norm(&x));
    }
    Ok(KaczmarzResult { x, residuals })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresResult {
    pub x: Vec<f64>,
    pub residual: f64,
    /// Set when the damped normal matrix is numerically singular.
    pub rank_deficient: bool,
    pub rcond: f64,
}

/// Minimizes ‖Ax - p‖₂ through (AᵀA + δI) x = Aᵀp, δ = 1e-10·trace(AᵀA)/n.
pub fn least_squares_solve(sys: &SparseSystem) -> Result<LeastSquaresResult> {
    let n = sys.cols;
    let mut g = DenseMatrix::zeros(n, n);
    let mut atp = vec![0.0; n];
    for j in 0..sys.rows() {
        let (c, v) = sys.row(j);
        for (&p, &a) in c.iter().zip(v) {
            atp[p] += a * sys.rhs[j];
            for (&q, &b) in c.iter().zip(v) {
                g.data[p * n + q] += a * b;
            }
        }
    }
    let trace: f64 = (0..n).map(|i| g.get(i, i)).sum();
    let delta = if trace > 0.0 { 1e-10 * trace / n as f64 } else { 1e-300 };
    for i in 0..n {
        g.data[i * n + i] += delta;
    }
    let lu = Lu::factor(&g)?;
    let rcond = lu.rcond(g.norm_1());
    let x = if lu.is_singular() {
        return Err(Error::Singular { rcond: 0.0 });
    } else {
        crate::numerics::linalg::solve_refined(&g, &lu, &atp)?
    };
    let residual = sys.residual_norm(&x);
    Ok(LeastSquaresResult { x, residual, rank_deficient: rcond < 1e3 * f64::EPSILON, rcond })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArtSolver {
    /// Kaczmarz when there are fewer rows than pixels, least squares otherwise.
    Auto(KaczmarzConfig),
    Kaczmarz(KaczmarzConfig),
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtReconstruction {
    pub image: ImageGrid,
    pub method: &'static str,
    pub residual: f64,
    pub residual_history: Vec<f64>,
}

pub fn reconstruct_art(sino: &Sinogram, k: usize, solver: &ArtSolver) -> Result<ArtReconstruction> {
    let sys = assemble_system(&sino.samples, k)?.with_rhs(sino.values.clone())?;
    let use_kaczmarz = match solver {
        ArtSolver::Auto(_) => sys.rows() < sys.cols,
        ArtSolver::Kaczmarz(_) => true,
        ArtSolver::LeastSquares => false,
    };
    if use_kaczmarz {
        let cfg = match solver {
            ArtSolver::Auto(c) | ArtSolver::Kaczmarz(c) => c.clone(),
            ArtSolver::LeastSquares => unreachable!(),
        };
        let r = kaczmarz_solve(&sys, &cfg)?;
        let residual = *r.residuals.last().unwrap();
        Ok(ArtReconstruction { image: ImageGrid::from_values(k, r.x)?, method: "kaczmarz", residual, residual_history: r.residuals })
    } else {
        let r = least_squares_solve(&sys)?;
        Ok(ArtReconstruction { image: ImageGrid::from_values(k, r.x)?, method: "lsq", residual: r.residual, residual_history: vec![r.residual] })
    }
}
