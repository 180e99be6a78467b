//! Radon profiles of the kernel bases: b_j(x) = P(t_j - x·v_j).

use super::KernelModel;
use crate::numerics::quadrature::{adaptive_quadrature, integrate};
use crate::numerics::special::{acosh, asinh};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gaussian profiles are treated as zero beyond this many multiples of 1/ε.
pub(crate) const GAUSS_REACH: f64 = 8.6;

/// Radon profile of the Gaussian-filtered multiquadric
/// √(1 + ρ²|y|²)·exp(-ε²|y|²), tabulated for cubic Hermite lookup.
#[derive(Debug)]
pub struct MqTable {
    rho: f64,
    eps: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

const MQ_NODES: usize = 4097;

impl MqTable {
    pub fn new(rho: f64, eps: f64) -> Self {
        let reach = GAUSS_REACH / eps;
        let step = reach / (MQ_NODES - 1) as f64;
        let cols: Vec<(f64, f64)> =
            crate::par::map_collect(MQ_NODES, |i| mq_direct(rho, eps, i as f64 * step));
        let (values, slopes) = cols.into_iter().unzip();
        Self { rho, eps, step, values, slopes }
    }

    pub fn reach(&self) -> f64 {
        self.step * (MQ_NODES - 1) as f64
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let x = tau.abs() / self.step;
        if x >= (MQ_NODES - 1) as f64 {
            return 0.0;
        }
        let i = x.floor() as usize;
        let u = x - i as f64;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * p1 + (u3 - u2) * m1
    }

    pub fn params(&self) -> (f64, f64) {
        (self.rho, self.eps)
    }
}

/// Profile value and derivative at τ ≥ 0 by direct quadrature along the line.
pub fn mq_direct(rho: f64, eps: f64, tau: f64) -> (f64, f64) {
    let c2 = 1.0 / (rho * rho) + tau * tau;
    let top = GAUSS_REACH / eps;
    let gauss = (-eps * eps * tau * tau).exp();
    let h = adaptive_quadrature(|s| (c2 + s * s).sqrt() * (-eps * eps * s * s).exp(), 0.0, top, 1e-15).value;
    let dh = adaptive_quadrature(|s| tau / (c2 + s * s).sqrt() * (-eps * eps * s * s).exp(), 0.0, top, 1e-15).value;
    let value = 2.0 * rho * gauss * h;
    let slope = 2.0 * rho * gauss * (dh - 2.0 * eps * eps * tau * h);
    (value, slope)
}

type MqKey = (u64, u64);

pub(crate) fn mq_table(rho: f64, eps: f64) -> Arc<MqTable> {
    static CACHE: OnceLock<Mutex<HashMap<MqKey, Arc<MqTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (rho.to_bits(), eps.to_bits());
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    // built outside the lock; a racing duplicate is harmless
    let table = Arc::new(MqTable::new(rho, eps));
    cache.lock().unwrap().entry(key).or_insert(table).clone()
}

/// Wendland φ₂,₀ profile g(t).
pub fn wendland_profile(eps: f64, tau: f64) -> f64 {
    let x = eps * tau.abs();
    if x > 1.0 {
        0.0
    } else if x == 0.0 {
        2.0 / (3.0 * eps)
    } else {
        let x2 = x * x;
        // x² acosh(1/x) ~ x² ln(2/x) is far below rounding here, and 1/x may overflow
        let ac = if x < 1e-100 { 0.0 } else { acosh(1.0 / x).unwrap_or(0.0) };
        2.0 / eps * ((1.0 - x2).sqrt() * (2.0 * x2 + 1.0) / 3.0 - x2 * ac)
    }
}

pub fn imq_profile(eps: f64, l1: f64, tau: f64) -> f64 {
    if tau.abs() > l1 {
        return 0.0;
    }
    let q = ((l1 * l1 - tau * tau) / (1.0 + eps * eps * tau * tau)).max(0.0);
    2.0 / eps * asinh(eps * q.sqrt())
}

pub fn gaussian_profile(eps: f64, tau: f64) -> f64 {
    PI.sqrt() / eps * (-eps * eps * tau * tau).exp()
}

/// A model with any lookup tables it needs already built.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub model: KernelModel,
    mq: Option<Arc<MqTable>>,
    mass: OnceLock<f64>,
}

impl PreparedModel {
    pub fn new(model: KernelModel) -> Self {
        let mq = match model {
            KernelModel::Multiquadric { rho, eps } => Some(mq_table(rho, eps)),
            _ => None,
        };
        Self { model, mq, mass: OnceLock::new() }
    }

    #[inline]
    pub fn profile(&self, tau: f64) -> f64 {
        match self.model {
            KernelModel::Gaussian { eps } => gaussian_profile(eps, tau),
            KernelModel::InverseMultiquadric { eps, l1 } => imq_profile(eps, l1, tau),
            KernelModel::Multiquadric { .. } => self.mq.as_ref().expect("table built in new").eval(tau),
            KernelModel::Wendland20 { eps } => wendland_profile(eps, tau),
        }
    }

    /// Radius outside which the profile is zero (or negligible).
    pub fn support(&self) -> f64 {
        match self.model {
            KernelModel::Gaussian { eps } => GAUSS_REACH / eps,
            KernelModel::InverseMultiquadric { l1, .. } => l1,
            KernelModel::Multiquadric { .. } => self.mq.as_ref().expect("table built in new").reach(),
            KernelModel::Wendland20 { eps } => 1.0 / eps,
        }
    }

    /// ∫ P(τ) dτ, the integral of the kernel over the plane.
    pub fn mass(&self) -> f64 {
        *self.mass.get_or_init(|| match self.model {
            KernelModel::Gaussian { eps } => PI / (eps * eps),
            KernelModel::Wendland20 { eps } => PI / (6.0 * eps * eps),
            _ => {
                let t = self.support();
                // peak at 0; the IMQ profile also has a log cusp there
                2.0 * integrate(|x| self.profile(x), 0.0, t, 1e-13).unwrap_or_else(|e| match e {
                    crate::Error::Quadrature { value, .. } => value,
                    _ => f64::NAN,
                })
            }
        })
    }
}
