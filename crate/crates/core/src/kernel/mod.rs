//! Kernel-based reconstruction from line integrals.
//!
//! The basis function attached to sample j is the Radon transform of the
//! kernel in its second argument, b_j(x) = P(t_j - x·v_j). Matrix entries are
//! Radon transforms of b_j along the line of sample k, regularized by a
//! window on ‖x‖ where the plain integral diverges.

pub mod audit;
pub mod basis;
pub mod closed;
pub mod oracle;

use crate::error::{Error, Result};
use crate::geometry::{unit_vector, LineParam, SampleSet};
use crate::image::{pixel_center, ImageGrid};
use crate::numerics::{DenseMatrix, Lu};
use crate::phantom::{builtin, radon_analytic, Phantom};
use crate::sinogram::Sinogram;
use audit::{audit, Branch};
use basis::PreparedModel;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelModel {
    Gaussian { eps: f64 },
    /// Support truncated at |t| ≤ l1.
    InverseMultiquadric { eps: f64, l1: f64 },
    /// Gaussian-filtered: √(1 + ρ²r²)·exp(-ε²r²).
    Multiquadric { rho: f64, eps: f64 },
    Wendland20 { eps: f64 },
}

impl KernelModel {
    pub fn name(&self) -> &'static str {
        match self {
            KernelModel::Gaussian { .. } => "gaussian",
            KernelModel::InverseMultiquadric { .. } => "imq",
            KernelModel::Multiquadric { .. } => "mq",
            KernelModel::Wendland20 { .. } => "wendland20",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let good = match *self {
            KernelModel::Gaussian { eps } | KernelModel::Wendland20 { eps } => ok(eps),
            KernelModel::InverseMultiquadric { eps, l1 } => ok(eps) && ok(l1),
            KernelModel::Multiquadric { rho, eps } => ok(rho) && ok(eps),
        };
        if good {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("shape parameters must be positive: {self:?}")))
        }
    }

    pub fn default_gaussian() -> Self {
        KernelModel::Gaussian { eps: 30.0 }
    }

    pub fn default_wendland() -> Self {
        KernelModel::Wendland20 { eps: 1.1 }
    }

    pub fn default_multiquadric() -> Self {
        KernelModel::Multiquadric { rho: 1.0, eps: 30.0 }
    }

    /// L₁ = 20·max|t|.
    pub fn default_imq(samples: &SampleSet) -> Self {
        KernelModel::InverseMultiquadric { eps: 30.0, l1: 20.0 * samples.max_abs_t().max(0.05) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowFamily {
    /// No regularization; only entries with distinct angles are finite.
    None,
    /// χ(‖x‖ ≤ l).
    Truncation { l: f64 },
    /// exp(-ν²‖x‖²).
    Gaussian { nu: f64 },
    /// (1 - ν²‖x‖²)₊.
    Compact { nu: f64 },
}

impl WindowFamily {
    pub fn name(&self) -> &'static str {
        match self {
            WindowFamily::None => "none",
            WindowFamily::Truncation { .. } => "trunc",
            WindowFamily::Gaussian { .. } => "gauss",
            WindowFamily::Compact { .. } => "compact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// Window applied to every entry.
    AllEntries,
    /// Window applied only where θ_k = θ_j; other entries use the plain integral.
    DiagonalOnly,
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowMode::AllEntries => "all",
            WindowMode::DiagonalOnly => "diag",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub family: WindowFamily,
    pub mode: WindowMode,
}

impl WindowSpec {
    pub fn new(family: WindowFamily, mode: WindowMode) -> Result<Self> {
        let bad = match family {
            WindowFamily::None => false,
            WindowFamily::Truncation { l: v } | WindowFamily::Gaussian { nu: v } | WindowFamily::Compact { nu: v } => {
                !(v > 0.0 && v.is_finite())
            }
        };
        if bad {
            return Err(Error::InvalidArgument(format!("window parameter must be positive: {family:?}")));
        }
        Ok(Self { family, mode })
    }

    pub fn all(family: WindowFamily) -> Self {
        Self { family, mode: WindowMode::AllEntries }
    }

    /// w at the point of line (r, ·) with arc parameter s.
    #[inline]
    pub fn weight(&self, r: f64, s: f64) -> f64 {
        let n2 = r * r + s * s;
        match self.family {
            WindowFamily::None => 1.0,
            WindowFamily::Truncation { l } => {
                if n2 <= l * l {
                    1.0
                } else {
                    0.0
                }
            }
            WindowFamily::Gaussian { nu } => (-nu * nu * n2).exp(),
            WindowFamily::Compact { nu } => (1.0 - nu * nu * n2).max(0.0),
        }
    }
}

/// Line-to-line coordinates: along line k, t_j - x_s·v_j = a·s + b, r = t_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbPair {
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

/// Angle differences with |sin| below this are treated as parallel.
pub const PARALLEL_THRESHOLD: f64 = 1e-12;

pub fn ab_pair(k: LineParam, j: LineParam) -> AbPair {
    let r = k.t;
    if k.theta == j.theta {
        return AbPair { a: 0.0, b: j.t - k.t, r };
    }
    let d = k.theta - j.theta;
    let a = d.sin();
    let c = d.cos();
    if a.abs() < PARALLEL_THRESHOLD {
        AbPair { a: 0.0, b: j.t - k.t * c.signum(), r }
    } else {
        AbPair { a, b: j.t - k.t * c, r }
    }
}

/// b_j(x) = P(t_j - x·v_j).
pub fn basis_eval(model: &KernelModel, sample_j: LineParam, x: crate::geometry::Point) -> f64 {
    PreparedModel::new(*model).profile(basis_offset(sample_j, x))
}

#[inline]
fn basis_offset(j: LineParam, x: crate::geometry::Point) -> f64 {
    let (c, s) = unit_vector(j.theta);
    j.t - (x.x * c + x.y * s)
}

fn check_pair(model: &KernelModel, window: &WindowSpec) -> Result<()> {
    let ok = matches!(
        (model, window.family),
        (_, WindowFamily::None)
            | (KernelModel::Gaussian { .. }, WindowFamily::Truncation { .. } | WindowFamily::Gaussian { .. })
            | (KernelModel::InverseMultiquadric { .. }, WindowFamily::Truncation { .. })
            | (KernelModel::Multiquadric { .. }, WindowFamily::Gaussian { .. })
            | (KernelModel::Wendland20 { .. }, WindowFamily::Compact { .. })
    );
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleWindow { kernel: model.name(), window: window.family.name() })
    }
}

fn branch_for(model: &KernelModel, window: &WindowSpec, diagonal: bool) -> Option<Branch> {
    Some(match (model, window.family, diagonal) {
        (KernelModel::Gaussian { .. }, WindowFamily::Truncation { .. }, true) => Branch::GaussianTruncationDiagonal,
        (KernelModel::Gaussian { .. }, WindowFamily::Truncation { .. }, false) => Branch::GaussianTruncation,
        (KernelModel::Gaussian { .. }, WindowFamily::Gaussian { .. }, _) => Branch::GaussianWindow,
        (KernelModel::InverseMultiquadric { .. }, WindowFamily::Truncation { .. }, true) => Branch::ImqTruncationDiagonal,
        (KernelModel::InverseMultiquadric { .. }, WindowFamily::Truncation { .. }, false) => Branch::ImqTruncation,
        (KernelModel::Multiquadric { .. }, WindowFamily::Gaussian { .. }, _) => Branch::MqGaussianWindow,
        (KernelModel::Wendland20 { .. }, WindowFamily::Compact { .. }, true) => Branch::WendlandCompactDiagonal,
        (KernelModel::Wendland20 { .. }, WindowFamily::Compact { .. }, false) => Branch::WendlandCompact,
        _ => return None,
    })
}

const FALLBACK_TOL: f64 = 1e-11;

/// Quadrature used in place of a closed form that failed its audit.
pub fn fallback_entry(prep: &PreparedModel, window: &WindowSpec, ab: AbPair) -> Result<f64> {
    match (prep.model, window.family) {
        (KernelModel::InverseMultiquadric { eps, l1 }, WindowFamily::Truncation { l }) if ab.a != 0.0 => {
            closed::imq_truncation_quadrature(eps, l1, l, ab, FALLBACK_TOL)
        }
        _ => oracle::oracle_entry_ab(prep, window, ab, FALLBACK_TOL),
    }
}

fn entry_prepared(prep: &PreparedModel, window: &WindowSpec, ab: AbPair) -> Result<f64> {
    let diagonal = ab.a == 0.0;
    if !diagonal && (window.mode == WindowMode::DiagonalOnly || window.family == WindowFamily::None) {
        return Ok(prep.mass() / ab.a.abs());
    }
    if window.family == WindowFamily::None {
        return Err(Error::Domain("entry with equal angles diverges without a window".into()));
    }
    let branch = branch_for(&prep.model, window, diagonal).expect("pair checked");
    if audit(branch).fallback {
        fallback_entry(prep, window, ab)
    } else {
        Ok(audit::closed_form(branch, &prep.model, window, ab))
    }
}

/// a_kj: the Radon transform of b_j along line k under the window.
pub fn matrix_entry(model: &KernelModel, window: &WindowSpec, sample_k: LineParam, sample_j: LineParam) -> Result<f64> {
    model.validate()?;
    check_pair(model, window)?;
    entry_prepared(&PreparedModel::new(*model), window, ab_pair(sample_k, sample_j))
}

/// a_kj by adaptive quadrature of the defining line integral.
pub fn oracle_entry(model: &KernelModel, window: &WindowSpec, sample_k: LineParam, sample_j: LineParam, tol: f64) -> Result<f64> {
    model.validate()?;
    oracle::oracle_entry_ab(&PreparedModel::new(*model), window, ab_pair(sample_k, sample_j), tol)
}

/// The same integral by a different rule (tanh-sinh).
pub fn oracle_entry_alt(model: &KernelModel, window: &WindowSpec, sample_k: LineParam, sample_j: LineParam, tol: f64) -> Result<f64> {
    model.validate()?;
    oracle::oracle_entry_alt_ab(&PreparedModel::new(*model), window, ab_pair(sample_k, sample_j), tol)
}

/// Wendland φ₂,₀ entry under the compact window, from the printed formulas.
pub fn wendland_entry(eps: f64, nu: f64, sample_k: LineParam, sample_j: LineParam) -> f64 {
    closed::wendland_ab(eps, nu, ab_pair(sample_k, sample_j))
}

pub use closed::imq_antiderivative;

#[derive(Debug, Clone)]
pub struct KernelSystem {
    pub model: KernelModel,
    pub window: WindowSpec,
    /// Samples at their original offsets.
    pub samples: SampleSet,
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub scale: f64,
    /// Reciprocal 1-norm condition estimate.
    pub rcond: f64,
    lu: Lu,
}

fn scaled(s: LineParam, h: f64) -> LineParam {
    if h == 1.0 {
        s
    } else {
        LineParam::new(h * s.t, s.theta)
    }
}

/// Builds A c = f for the (optionally scaled) problem.
///
/// With h ≠ 1, entries are (1/h²)·a(h t_k, h t_j) and the right-hand side is
/// (1/h)·Rf(h t_k, θ_k), which needs the phantom: `reference`, or the builtin
/// named in the sinogram's provenance.
pub fn assemble_kernel_system(
    model: &KernelModel,
    window: &WindowSpec,
    sino: &Sinogram,
    h: f64,
    reference: Option<&Phantom>,
) -> Result<KernelSystem> {
    model.validate()?;
    check_pair(model, window)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {h}")));
    }
    let samples = &sino.samples;
    let n = samples.len();
    if sino.values.len() != n {
        return Err(Error::DimensionMismatch(format!("{} values for {} samples", sino.values.len(), n)));
    }
    if let KernelModel::InverseMultiquadric { l1, .. } = model {
        let reach = h * samples.max_abs_t();
        if *l1 <= 2.0 * reach {
            return Err(Error::InvalidArgument(format!("imq support {l1} must exceed twice max|t| = {}", 2.0 * reach)));
        }
    }
    let rhs = if h == 1.0 {
        sino.values.clone()
    } else {
        let owned;
        let ph = match reference {
            Some(p) => p,
            None => {
                let name = sino.provenance.phantom.as_deref().ok_or(Error::MissingPhantom)?;
                owned = builtin(name).map_err(|_| Error::MissingPhantom)?;
                &owned
            }
        };
        samples.samples.iter().map(|&s| radon_analytic(ph, scaled(s, h)) / h).collect()
    };
    let prep = PreparedModel::new(*model);
    if window.mode == WindowMode::DiagonalOnly {
        prep.mass();
    }
    let inv_h2 = 1.0 / (h * h);
    let scaled_samples: Vec<LineParam> = samples.samples.iter().map(|&s| scaled(s, h)).collect();
    let mut matrix = DenseMatrix::zeros(n, n);
    let mut failure: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
    crate::par::for_each_chunk(&mut matrix.data, n.max(1), |k, row| {
        for (j, slot) in row.iter_mut().enumerate() {
            match entry_prepared(&prep, window, ab_pair(scaled_samples[k], scaled_samples[j])) {
                Ok(v) => *slot = if h == 1.0 { v } else { inv_h2 * v },
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    return;
                }
            }
        }
    });
    if let Some(e) = failure.get_mut().unwrap().take() {
        return Err(e);
    }
    if !matrix.is_finite() {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let lu = Lu::factor(&matrix)?;
    let rcond = if lu.is_singular() { 0.0 } else { lu.rcond(matrix.norm_1()) };
    Ok(KernelSystem { model: *model, window: *window, samples: samples.clone(), matrix, rhs, scale: h, rcond, lu })
}

#[derive(Debug, Clone)]
pub struct KernelReconstruction {
    pub image: ImageGrid,
    pub coefficients: Vec<f64>,
    pub rcond: f64,
    /// ‖Ac - f‖∞.
    pub residual: f64,
}

/// Solves the system and evaluates s(x) = Σ c_j (1/h) b_j at the pixel centers.
pub fn solve_and_evaluate(sys: &KernelSystem, k: usize) -> Result<KernelReconstruction> {
    if sys.lu.is_singular() {
        return Err(Error::Singular { rcond: sys.rcond });
    }
    let c = crate::numerics::linalg::solve_refined(&sys.matrix, &sys.lu, &sys.rhs)?;
    let residual = sys
        .matrix
        .mul_vec(&c)
        .iter()
        .zip(&sys.rhs)
        .map(|(a, f)| (a - f).abs())
        .fold(0.0, f64::max);
    let image = evaluate(&sys.model, &sys.samples, sys.scale, &c, k)?;
    Ok(KernelReconstruction { image, coefficients: c, rcond: sys.rcond, residual })
}

/// Σ c_j (1/h) P(h t_j - x·v_j) on the K×K pixel centers.
pub fn evaluate(model: &KernelModel, samples: &SampleSet, h: f64, coeffs: &[f64], k: usize) -> Result<ImageGrid> {
    if coeffs.len() != samples.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} samples", coeffs.len(), samples.len())));
    }
    let prep = PreparedModel::new(*model);
    let lines: Vec<(f64, f64, f64, f64)> = samples
        .samples
        .iter()
        .zip(coeffs)
        .filter(|(_, &c)| c != 0.0)
        .map(|(s, &c)| {
            let (cs, sn) = unit_vector(s.theta);
            (scaled(*s, h).t, cs, sn, if h == 1.0 { c } else { c / h })
        })
        .collect();
    let values = crate::par::map_collect(k * k, |i| {
        let p = pixel_center(k, i);
        lines.iter().map(|&(t, cs, sn, c)| c * prep.profile(t - (p.x * cs + p.y * sn))).sum()
    });
    ImageGrid::from_values(k, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parallel_beam_samples, scattered_samples, Point};
    use crate::image::rmse;
    use crate::phantom::rasterize;
    use crate::sinogram::sample;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn basis_examples() {
        let j = LineParam::new(0.3, 0.4);
        let (c, s) = unit_vector(0.4);
        let on = Point::new(0.3 * c, 0.3 * s);
        assert!((basis_eval(&KernelModel::Gaussian { eps: 2.0 }, j, on) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((basis_eval(&KernelModel::Wendland20 { eps: 1.1 }, j, on) - 2.0 / 3.3).abs() < 1e-15);
        let imq = KernelModel::InverseMultiquadric { eps: 3.0, l1: 2.0 };
        assert!((basis_eval(&imq, j, on) - 2.0 / 3.0 * 6f64.asinh()).abs() < 1e-14);
    }

    #[test]
    fn ab_pairs() {
        let p = ab_pair(LineParam::new(0.2, 1.0), LineParam::new(-0.1, 1.0));
        assert_eq!(p, AbPair { a: 0.0, b: -0.30000000000000004, r: 0.2 });
        let q = ab_pair(LineParam::new(0.2, FRAC_PI_2), LineParam::new(0.5, 0.0));
        assert_eq!(q.a, 1.0);
        assert!((q.b - 0.5).abs() < 1e-16);
        // nearly antiparallel scattered lines map to the a = 0 branch
        let z = ab_pair(LineParam::new(0.2, 0.0), LineParam::new(0.1, PI - 1e-14));
        assert_eq!(z.a, 0.0);
        assert!((z.b - 0.3).abs() < 1e-15);
    }

    #[test]
    fn entry_examples() {
        let none = WindowSpec::all(WindowFamily::None);
        let g = KernelModel::Gaussian { eps: 1.0 };
        let v = matrix_entry(&g, &none, LineParam::new(0.1, FRAC_PI_2), LineParam::new(-0.4, 0.0)).unwrap();
        assert!((v - PI).abs() < 1e-14);
        assert!(matrix_entry(&g, &none, LineParam::new(0.1, 0.5), LineParam::new(0.2, 0.5)).is_err());

        let (eps, l) = (3.0, 1.5);
        let tr = WindowSpec::all(WindowFamily::Truncation { l });
        let v = matrix_entry(&KernelModel::Gaussian { eps }, &tr, LineParam::new(0.0, 0.7), LineParam::new(0.0, 0.7)).unwrap();
        assert!((v - 2.0 * PI.sqrt() * l / eps).abs() < 1e-13);

        let w = WindowSpec::all(WindowFamily::Compact { nu: 1e-8 });
        let (k, j) = (LineParam::new(0.1, 0.9), LineParam::new(0.2, 0.3));
        let a = (0.9f64 - 0.3).sin();
        let v = matrix_entry(&KernelModel::Wendland20 { eps: 1.1 }, &w, k, j).unwrap();
        assert!((v - PI / (6.0 * 1.21 * a)).abs() < 1e-6);
    }

    #[test]
    fn incompatible_pairs() {
        let w = WindowSpec::all(WindowFamily::Compact { nu: 0.5 });
        let e = matrix_entry(&KernelModel::Gaussian { eps: 1.0 }, &w, LineParam::new(0.0, 0.0), LineParam::new(0.0, 1.0));
        assert_eq!(e, Err(Error::IncompatibleWindow { kernel: "gaussian", window: "compact" }));
        assert!(WindowSpec::new(WindowFamily::Gaussian { nu: 0.0 }, WindowMode::AllEntries).is_err());
        assert!(KernelModel::Gaussian { eps: -1.0 }.validate().is_err());
    }

    #[test]
    fn diagonal_only_mode() {
        let w = WindowSpec { family: WindowFamily::Gaussian { nu: 0.5 }, mode: WindowMode::DiagonalOnly };
        let m = KernelModel::Gaussian { eps: 3.0 };
        let (k, j) = (LineParam::new(0.1, 0.9), LineParam::new(0.2, 0.3));
        let v = matrix_entry(&m, &w, k, j).unwrap();
        assert!((v - PI / (9.0 * (0.6f64).sin())).abs() < 1e-14);
        let d = matrix_entry(&m, &w, k, LineParam::new(0.2, 0.9)).unwrap();
        assert_eq!(d, closed::gaussian_gaussian(3.0, 0.5, AbPair { a: 0.0, b: 0.1, r: 0.1 }));
    }

    #[test]
    fn fallback_agrees_with_second_rule() {
        for b in Branch::ALL {
            let (model, window) = b.probe_setup();
            let prep = PreparedModel::new(model);
            for ab in b.probes().into_iter().take(6) {
                let f = fallback_entry(&prep, &window, ab).unwrap();
                let t = oracle::oracle_entry_alt_ab(&prep, &window, ab, 1e-10).unwrap_or_else(|e| panic!("{b} {ab:?}: {e:?}"));
                assert!((f - t).abs() < 1e-7, "{b}: {f} vs {t}");
            }
        }
    }

    #[test]
    fn gaussian_window_bound() {
        // |R_w - R| ≤ ‖w - 1‖∞ · ∫|P| along the line; ‖w - 1‖∞ = 1 - e^{-ν²R²} on |s| ≤ R
        let m = KernelModel::Gaussian { eps: 3.0 };
        let prep = PreparedModel::new(m);
        let nu = 0.05;
        let gw = WindowSpec::all(WindowFamily::Gaussian { nu });
        for (k, j) in [(LineParam::new(0.2, 1.1), LineParam::new(-0.3, 0.2)), (LineParam::new(0.5, 2.0), LineParam::new(0.1, 0.4))] {
            let ab = ab_pair(k, j);
            let windowed = oracle::oracle_entry_ab(&prep, &gw, ab, 1e-12).unwrap();
            let plain = prep.mass() / ab.a.abs();
            let reach = (prep.support() + ab.b.abs()) / ab.a.abs();
            let sup = 1.0 - (-nu * nu * (ab.r * ab.r + reach * reach)).exp();
            assert!((windowed - plain).abs() <= sup * plain + 1e-12);
            assert!(windowed < plain);
        }
    }

    fn crescent(n: usize, m: usize) -> Sinogram {
        sample(&builtin("crescent").unwrap(), &parallel_beam_samples(n, m, 1.0 / m as f64).unwrap())
    }

    #[test]
    fn scaled_pipeline() {
        let sino = crescent(6, 4);
        let m = KernelModel::Gaussian { eps: 5.0 };
        let w = WindowSpec::all(WindowFamily::Gaussian { nu: 0.5 });
        let s1 = assemble_kernel_system(&m, &w, &sino, 1.0, None).unwrap();
        for k in 0..sino.len() {
            for j in 0..sino.len() {
                let e = matrix_entry(&m, &w, sino.samples.samples[k], sino.samples.samples[j]).unwrap();
                assert_eq!(s1.matrix.get(k, j), e);
            }
        }
        assert_eq!(s1.rhs, sino.values);

        // unwindowed off-diagonal entries are offset-independent: doubling h quarters them
        let dw = WindowSpec { family: WindowFamily::Gaussian { nu: 0.5 }, mode: WindowMode::DiagonalOnly };
        let a1 = assemble_kernel_system(&m, &dw, &sino, 1.0, None).unwrap();
        let a2 = assemble_kernel_system(&m, &dw, &sino, 2.0, None).unwrap();
        let (k, j) = (0, sino.len() - 1);
        assert!((a2.matrix.get(k, j) - a1.matrix.get(k, j) / 4.0).abs() < 1e-14);
        let h = assemble_kernel_system(&m, &dw, &sino, 0.5, None).unwrap();
        let ph = builtin("crescent").unwrap();
        for (i, s) in sino.samples.samples.iter().enumerate() {
            assert!((h.rhs[i] - 2.0 * radon_analytic(&ph, LineParam::new(0.5 * s.t, s.theta))).abs() < 1e-15);
        }

        let mut bare = sino.clone();
        bare.provenance.phantom = None;
        assert_eq!(assemble_kernel_system(&m, &w, &bare, 2.0, None).unwrap_err(), Error::MissingPhantom);
    }

    #[test]
    fn zero_data_gives_zero_image() {
        let mut sino = crescent(5, 3);
        sino.values.iter_mut().for_each(|v| *v = 0.0);
        let sys = assemble_kernel_system(&KernelModel::Gaussian { eps: 5.0 }, &WindowSpec::all(WindowFamily::Gaussian { nu: 0.5 }), &sino, 1.0, None).unwrap();
        let r = solve_and_evaluate(&sys, 8).unwrap();
        assert!(r.coefficients.iter().all(|&c| c == 0.0));
        assert!(r.image.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn crescent_reconstruction() {
        let sino = crescent(30, 20);
        let sys = assemble_kernel_system(&KernelModel::Gaussian { eps: 30.0 }, &WindowSpec::all(WindowFamily::Gaussian { nu: 0.5 }), &sino, 1.0, None).unwrap();
        assert!(sys.rcond > 0.0 && sys.matrix.is_finite());
        let r = solve_and_evaluate(&sys, 64).unwrap();
        let e = rmse(&r.image, &rasterize(&builtin("crescent").unwrap(), 64).unwrap()).unwrap();
        assert!(e < 0.25, "rmse {e}");
        if sys.rcond > 1e-10 {
            let fmax = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(r.residual <= 1e-6 * fmax);
        }
    }

    #[test]
    fn scattered_system_is_finite() {
        let s = scattered_samples(60, 3).unwrap();
        let sino = sample(&builtin("bulls-eye").unwrap(), &s);
        for (m, w) in [
            (KernelModel::Gaussian { eps: 10.0 }, WindowFamily::Truncation { l: 1.5 }),
            (KernelModel::Wendland20 { eps: 1.1 }, WindowFamily::Compact { nu: 0.5 }),
        ] {
            let sys = assemble_kernel_system(&m, &WindowSpec::all(w), &sino, 1.0, None).unwrap();
            assert!(sys.matrix.is_finite());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn permutation_equivariance(seed in 0u64..1000) {
            let s = scattered_samples(7, seed).unwrap();
            let mut sino = sample(&builtin("crescent").unwrap(), &s);
            let m = KernelModel::Gaussian { eps: 4.0 };
            let w = WindowSpec::all(WindowFamily::Truncation { l: 1.5 });
            let a = assemble_kernel_system(&m, &w, &sino, 1.0, None).unwrap();
            let perm: Vec<usize> = (0..7).map(|i| (i * 3 + seed as usize) % 7).collect();
            sino.samples.samples = perm.iter().map(|&i| s.samples[i]).collect();
            sino.values = perm.iter().map(|&i| a.rhs[i]).collect();
            let b = assemble_kernel_system(&m, &w, &sino, 1.0, None).unwrap();
            for k in 0..7 {
                for j in 0..7 {
                    prop_assert_eq!(b.matrix.get(k, j), a.matrix.get(perm[k], perm[j]));
                }
            }
        }
    }
}
