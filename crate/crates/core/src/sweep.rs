//! Reconstruction pipelines and one-parameter sweeps over them.

use crate::art::{reconstruct_art, ArtSolver, KaczmarzConfig};
use crate::error::{Error, Result};
use crate::fbp::filter::FilterSpec;
use crate::fbp::signal::Interpolation;
use crate::fbp::{reconstruct_fbp, FbpAlgorithm};
use crate::image::{rmse, ImageGrid};
use crate::kernel::{assemble_kernel_system, solve_and_evaluate, KernelModel, WindowFamily, WindowSpec};
use crate::phantom::{rasterize, Phantom};
use crate::sinogram::Sinogram;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Fbp { filter: FilterSpec, interp: Interpolation, algorithm: FbpAlgorithm },
    Art { solver: ArtSolver },
    Kernel { model: KernelModel, window: WindowSpec, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub image: ImageGrid,
    /// Reciprocal condition estimate, for kernel systems.
    pub rcond: Option<f64>,
    /// Kaczmarz residual history or the final least-squares residual.
    pub residuals: Vec<f64>,
    pub method_detail: String,
}

/// Runs one reconstruction. `reference` supplies the analytic transform
/// needed by scaled kernel problems.
pub fn reconstruct(method: &Method, sino: &Sinogram, k: usize, reference: Option<&Phantom>) -> Result<Outcome> {
    match method {
        Method::Fbp { filter, interp, algorithm } => {
            let image = reconstruct_fbp(sino, filter, *interp, k, *algorithm)?;
            Ok(Outcome { image, rcond: None, residuals: Vec::new(), method_detail: format!("fbp-{algorithm}") })
        }
        Method::Art { solver } => {
            let r = reconstruct_art(sino, k, solver)?;
            Ok(Outcome { image: r.image, rcond: None, residuals: r.residual_history, method_detail: r.method.to_string() })
        }
        Method::Kernel { model, window, scale } => {
            let sys = assemble_kernel_system(model, window, sino, *scale, reference)?;
            let r = solve_and_evaluate(&sys, k)?;
            Ok(Outcome { image: r.image, rcond: Some(r.rcond), residuals: vec![r.residual], method_detail: model.name().to_string() })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eps,
    Nu,
    Rho,
    /// Gaussian truncation radius, or the IMQ support L₁.
    L,
    /// IMQ truncation window radius.
    L2,
    /// Scale h of the scaled kernel problem.
    Scale,
    Lambda,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Eps => "eps",
            SweepParam::Nu => "nu",
            SweepParam::Rho => "rho",
            SweepParam::L => "L",
            SweepParam::L2 => "L2",
            SweepParam::Scale => "h",
            SweepParam::Lambda => "lambda",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eps" | "epsilon" => SweepParam::Eps,
            "nu" => SweepParam::Nu,
            "rho" => SweepParam::Rho,
            "L" | "L1" | "l" => SweepParam::L,
            "L2" | "H" => SweepParam::L2,
            "h" | "scale" => SweepParam::Scale,
            "lambda" => SweepParam::Lambda,
            _ => return Err(Error::InvalidArgument(format!("unknown sweep parameter '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Rmse,
    Rcond,
    Time,
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rmse" => Ok(Metric::Rmse),
            "rcond" => Ok(Metric::Rcond),
            "time" => Ok(Metric::Time),
            _ => Err(Error::InvalidArgument(format!("unknown metric '{s}'"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Rmse => "rmse",
            Metric::Rcond => "rcond",
            Metric::Time => "time",
        })
    }
}

/// Returns `method` with one parameter replaced.
pub fn apply_param(method: &Method, param: SweepParam, v: f64) -> Result<Method> {
    let mut m = method.clone();
    let bad = || Error::InvalidArgument(format!("parameter {param} does not apply to this method"));
    match (&mut m, param) {
        (Method::Kernel { model, .. }, SweepParam::Eps) => match model {
            KernelModel::Gaussian { eps }
            | KernelModel::Wendland20 { eps }
            | KernelModel::InverseMultiquadric { eps, .. }
            | KernelModel::Multiquadric { eps, .. } => *eps = v,
        },
        (Method::Kernel { model: KernelModel::Multiquadric { rho, .. }, .. }, SweepParam::Rho) => *rho = v,
        (Method::Kernel { window, .. }, SweepParam::Nu) => match &mut window.family {
            WindowFamily::Gaussian { nu } | WindowFamily::Compact { nu } => *nu = v,
            _ => return Err(bad()),
        },
        (Method::Kernel { model: KernelModel::InverseMultiquadric { l1, .. }, .. }, SweepParam::L) => *l1 = v,
        (Method::Kernel { model: KernelModel::Gaussian { .. }, window, .. }, SweepParam::L) => match &mut window.family {
            WindowFamily::Truncation { l } => *l = v,
            _ => return Err(bad()),
        },
        (Method::Kernel { model: KernelModel::InverseMultiquadric { .. }, window, .. }, SweepParam::L2) => match &mut window.family {
            WindowFamily::Truncation { l } => *l = v,
            _ => return Err(bad()),
        },
        (Method::Kernel { scale, .. }, SweepParam::Scale) => *scale = v,
        (Method::Art { solver: ArtSolver::Kaczmarz(c) | ArtSolver::Auto(c) }, SweepParam::Lambda) => {
            *c = KaczmarzConfig { lambda: v, ..c.clone() }
        }
        _ => return Err(bad()),
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub metric: Metric,
    pub method: Method,
    pub size: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.start <= self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sweep range needs step > 0 and start <= stop, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // trim accumulated rounding so 0.1 steps print as 0.3, not 0.30000000000000004
        Ok((0..n).map(|i| round_sig(self.start + i as f64 * self.step)).collect())
    }
}

fn round_sig(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(12 - v.abs().log10().ceil() as i32);
    (v * scale).round() / scale
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub rmse: Option<f64>,
    pub rcond: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Rmse => self.rmse,
            Metric::Rcond => self.rcond,
            Metric::Time => self.error.is_none().then_some(self.seconds),
        }
    }
}

/// One reconstruction per grid point, in parallel; rows come back in
/// parameter order and a failing point is reported rather than fatal.
pub fn run_sweep(spec: &SweepSpec, sino: &Sinogram, phantom: &Phantom) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    apply_param(&spec.method, spec.param, points[0])?;
    let truth = rasterize(phantom, spec.size)?;
    let rows = crate::par::map_collect(points.len(), |i| {
        let value = points[i];
        let start = Instant::now();
        let out = apply_param(&spec.method, spec.param, value)
            .and_then(|m| reconstruct(&m, sino, spec.size, Some(phantom)))
            .and_then(|o| Ok((rmse(&o.image, &truth)?, o.rcond)));
        let seconds = start.elapsed().as_secs_f64();
        match out {
            Ok((e, rc)) => SweepRow { value, rmse: Some(e), rcond: rc, seconds, error: None },
            Err(e) => SweepRow { value, rmse: None, rcond: None, seconds, error: Some(e.to_string()) },
        }
    });
    Ok(rows)
}

/// Row optimizing the metric: smallest RMSE or time, largest rcond.
pub fn best_row(rows: &[SweepRow], metric: Metric) -> Option<&SweepRow> {
    let key = |r: &SweepRow| r.metric(metric).filter(|v| v.is_finite());
    let better = |a: f64, b: f64| if metric == Metric::Rcond { a > b } else { a < b };
    let mut best: Option<&SweepRow> = None;
    for r in rows {
        if let Some(v) = key(r) {
            if best.map_or(true, |b| better(v, key(b).unwrap())) {
                best = Some(r);
            }
        }
    }
    best
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    let mut out = format!("{param},rmse,rcond,seconds,status\n");
    for r in rows {
        let status = match &r.error {
            None => "ok".to_string(),
            Some(e) => format!("\"failed: {}\"", e.replace('"', "'")),
        };
        out.push_str(&format!("{},{},{},{:.6},{}\n", r.value, opt(r.rmse), opt(r.rcond), r.seconds, status));
    }
    out
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            r[p] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DimensionMismatch(format!("need two equal series of length >= 2, got {} and {}", x.len(), y.len())));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (vx * vy).sqrt())
}
