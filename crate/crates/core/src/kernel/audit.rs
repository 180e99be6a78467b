//! Startup cross-check of every closed form against the quadrature oracle.
//!
//! Each branch is probed once per process at fixed parameters. A branch whose
//! closed form deviates by more than [`AUDIT_TOLERANCE`] is evaluated by
//! quadrature from then on.

use super::basis::{wendland_profile, PreparedModel};
use super::closed::{self, imq_antiderivative};
use super::oracle::oracle_entry_ab;
use super::{AbPair, KernelModel, WindowFamily, WindowMode, WindowSpec};
use crate::numerics::quadrature::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::OnceLock;

pub const AUDIT_TOLERANCE: f64 = 1e-5;
pub const PROBES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    GaussianTruncationDiagonal,
    GaussianTruncation,
    GaussianWindow,
    ImqTruncationDiagonal,
    ImqTruncation,
    MqGaussianWindow,
    WendlandCompactDiagonal,
    WendlandCompact,
}

impl Branch {
    pub const ALL: [Branch; 8] = [
        Branch::GaussianTruncationDiagonal,
        Branch::GaussianTruncation,
        Branch::GaussianWindow,
        Branch::ImqTruncationDiagonal,
        Branch::ImqTruncation,
        Branch::MqGaussianWindow,
        Branch::WendlandCompactDiagonal,
        Branch::WendlandCompact,
    ];

    fn index(self) -> usize {
        Self::ALL.iter().position(|&b| b == self).unwrap()
    }

    /// Whether the probes use equal angles (a = 0).
    fn diagonal(self) -> bool {
        matches!(
            self,
            Branch::GaussianTruncationDiagonal | Branch::ImqTruncationDiagonal | Branch::WendlandCompactDiagonal
        )
    }

    /// Probe model and window.
    pub fn probe_setup(self) -> (KernelModel, WindowSpec) {
        let all = |family| WindowSpec { family, mode: WindowMode::AllEntries };
        match self {
            Branch::GaussianTruncationDiagonal | Branch::GaussianTruncation => {
                (KernelModel::Gaussian { eps: 3.0 }, all(WindowFamily::Truncation { l: 1.5 }))
            }
            Branch::GaussianWindow => (KernelModel::Gaussian { eps: 3.0 }, all(WindowFamily::Gaussian { nu: 0.7 })),
            Branch::ImqTruncationDiagonal | Branch::ImqTruncation => {
                (KernelModel::InverseMultiquadric { eps: 3.0, l1: 2.5 }, all(WindowFamily::Truncation { l: 2.0 }))
            }
            Branch::MqGaussianWindow => {
                (KernelModel::Multiquadric { rho: 1.0, eps: 3.0 }, all(WindowFamily::Gaussian { nu: 0.8 }))
            }
            Branch::WendlandCompactDiagonal | Branch::WendlandCompact => {
                (KernelModel::Wendland20 { eps: 1.1 }, all(WindowFamily::Compact { nu: 0.5 }))
            }
        }
    }

    /// (a, b, r) probe triples; a = 0 for the diagonal branches.
    pub fn probes(self) -> Vec<AbPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + self.index() as u64);
        (0..PROBES)
            .map(|i| {
                let r = rng.gen_range(-0.9..0.9);
                let b = if i == 0 { 0.0 } else { rng.gen_range(-0.8..0.8) };
                let a = if self.diagonal() {
                    0.0
                } else {
                    let d = rng.gen_range(0.05f64..std::f64::consts::PI - 0.05);
                    d.sin() * if i % 2 == 0 { 1.0 } else { -1.0 }
                };
                AbPair { a, b, r }
            })
            .collect()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::GaussianTruncationDiagonal => "gaussian/truncation a=0",
            Branch::GaussianTruncation => "gaussian/truncation a!=0",
            Branch::GaussianWindow => "gaussian/gaussian",
            Branch::ImqTruncationDiagonal => "imq/truncation a=0",
            Branch::ImqTruncation => "imq/truncation a!=0 (antiderivative)",
            Branch::MqGaussianWindow => "mq/gaussian",
            Branch::WendlandCompactDiagonal => "wendland20/compact a=0",
            Branch::WendlandCompact => "wendland20/compact a!=0",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub branch: Branch,
    /// Largest |closed - oracle| / max(1, |oracle|) over the probes and any
    /// antiderivative checks.
    pub max_deviation: f64,
    pub fallback: bool,
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: max deviation {:.3e}, {}",
            self.branch,
            self.max_deviation,
            if self.fallback { "oracle fallback" } else { "closed form" }
        )
    }
}

/// The closed form for a branch, bypassing the audit.
pub fn closed_form(branch: Branch, model: &KernelModel, window: &WindowSpec, ab: AbPair) -> f64 {
    match (branch, *model, window.family) {
        (Branch::GaussianTruncationDiagonal | Branch::GaussianTruncation, KernelModel::Gaussian { eps }, WindowFamily::Truncation { l }) => {
            closed::gaussian_truncation(eps, l, ab)
        }
        (Branch::GaussianWindow, KernelModel::Gaussian { eps }, WindowFamily::Gaussian { nu }) => closed::gaussian_gaussian(eps, nu, ab),
        (Branch::ImqTruncationDiagonal, KernelModel::InverseMultiquadric { eps, l1 }, WindowFamily::Truncation { l }) => {
            closed::imq_truncation_zero(eps, l1, l, ab)
        }
        (Branch::ImqTruncation, KernelModel::InverseMultiquadric { eps, l1 }, WindowFamily::Truncation { l }) => {
            closed::imq_truncation_antiderivative(eps, l1, l, ab)
        }
        (Branch::MqGaussianWindow, KernelModel::Multiquadric { rho, eps }, WindowFamily::Gaussian { nu }) => {
            closed::mq_gaussian_printed(rho, eps, nu, ab)
        }
        (Branch::WendlandCompactDiagonal | Branch::WendlandCompact, KernelModel::Wendland20 { eps }, WindowFamily::Compact { nu }) => {
            closed::wendland_ab(eps, nu, ab)
        }
        _ => f64::NAN,
    }
}

fn relative(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(1.0)
}

/// Finite-difference and definite-integral checks of the printed IMQ
/// antiderivative at M = 2.
pub fn imq_antiderivative_checks() -> f64 {
    let m = 2.0;
    let f = |u: f64| (((m * m - u * u) / (1.0 + u * u)) as f64).sqrt().asinh();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for &u in &[0.0, 0.3, 1.0, 1.5] {
        let d = (imq_antiderivative(u + h, m).unwrap() - imq_antiderivative(u - h, m).unwrap()) / (2.0 * h);
        worst = worst.max(relative(d, f(u)));
    }
    let q = integrate(f, -0.5, 0.5, 1e-13).unwrap();
    let v = imq_antiderivative(0.5, m).unwrap() - imq_antiderivative(-0.5, m).unwrap();
    worst.max(relative(v, q))
}

/// Finite-difference and definite-integral checks of the printed Wendland
/// bracket, a != 0.
pub fn wendland_bracket_checks() -> f64 {
    let (eps, nu) = (1.1, 0.5);
    let ab = AbPair { a: 0.45, b: 0.15, r: 0.3 };
    // d/du of the bracket is 3ε g(u/ε)(1 - ν²r² - ν²s(u)²), s(u) = (u - εb)/(εa)
    let integrand = |u: f64| {
        let s = (u - eps * ab.b) / (eps * ab.a);
        3.0 * eps * wendland_profile(eps, u / eps) * (1.0 - nu * nu * (ab.r * ab.r + s * s))
    };
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for &u in &[-0.8, -0.3, 0.2, 0.6] {
        let d = (closed::wendland_bracket(u + h, eps, nu, ab) - closed::wendland_bracket(u - h, eps, nu, ab)) / (2.0 * h);
        worst = worst.max(relative(d, integrand(u)));
    }
    let (lo, hi) = (-0.7, 0.5);
    let q = integrate(integrand, lo, hi, 1e-13).unwrap_or(f64::NAN);
    let v = closed::wendland_bracket(hi, eps, nu, ab) - closed::wendland_bracket(lo, eps, nu, ab);
    let dev = relative(v, q);
    if dev.is_nan() {
        f64::INFINITY
    } else {
        worst.max(dev)
    }
}

fn run_audit(branch: Branch) -> AuditReport {
    let (model, window) = branch.probe_setup();
    let prep = PreparedModel::new(model);
    let mut worst: f64 = 0.0;
    for ab in branch.probes() {
        let c = closed_form(branch, &model, &window, ab);
        let o = oracle_entry_ab(&prep, &window, ab, 1e-11).unwrap_or(f64::NAN);
        let dev = relative(c, o);
        worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
    }
    if branch == Branch::ImqTruncation {
        worst = worst.max(imq_antiderivative_checks());
    }
    if branch == Branch::WendlandCompact {
        worst = worst.max(wendland_bracket_checks());
    }
    AuditReport { branch, max_deviation: worst, fallback: !(worst <= AUDIT_TOLERANCE) }
}

/// Audit result for one branch, computed on first use.
pub fn audit(branch: Branch) -> &'static AuditReport {
    static REPORTS: [OnceLock<AuditReport>; 8] = [const { OnceLock::new() }; 8];
    REPORTS[branch.index()].get_or_init(|| run_audit(branch))
}

pub fn audit_all() -> Vec<AuditReport> {
    Branch::ALL.iter().map(|&b| audit(b).clone()).collect()
}
