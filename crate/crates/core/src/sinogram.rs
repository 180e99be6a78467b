//! Sampled Radon data: generation, noise models and CSV serialization.

use crate::error::{Error, Result};
use crate::geometry::{parallel_beam_samples, LineParam, SampleLayout, SampleSet};
use crate::phantom::{radon_analytic, Phantom};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use std::fmt;
use std::str::FromStr;

const MAGIC: &str = "# radon-kit sinogram v1";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub phantom: Option<String>,
    pub noise: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub samples: SampleSet,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

/// Radon values of `ph` on every sample line.
pub fn sample(ph: &Phantom, s: &SampleSet) -> Sinogram {
    let values = s.samples.iter().map(|&l| radon_analytic(ph, l)).collect();
    Sinogram {
        samples: s.clone(),
        values,
        provenance: Provenance { phantom: Some(ph.name.clone()), noise: None },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    Gaussian { mean: f64, variance: f64 },
    /// Counts are drawn from Poisson(v * scale) and divided by `scale`.
    Poisson { scale: f64 },
    /// Amplitude `None` means the sinogram's maximum value.
    SaltPepper { density: f64, amplitude: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match *self {
            NoiseKind::None => Ok(()),
            NoiseKind::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(variance >= 0.0 && variance.is_finite()) {
                    return bad(format!("gaussian noise needs finite mean and variance >= 0, got {mean}, {variance}"));
                }
                Ok(())
            }
            NoiseKind::Poisson { scale } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad(format!("poisson scale must be positive, got {scale}"));
                }
                Ok(())
            }
            NoiseKind::SaltPepper { density, amplitude } => {
                if !(0.0..=1.0).contains(&density) {
                    return bad(format!("salt-pepper density must lie in [0, 1], got {density}"));
                }
                if amplitude.is_some_and(|a| !a.is_finite()) {
                    return bad("salt-pepper amplitude must be finite".into());
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::None => write!(f, "none"),
            NoiseKind::Gaussian { mean, variance } => write!(f, "gaussian:{mean},{variance}"),
            NoiseKind::Poisson { scale } => write!(f, "poisson:{scale}"),
            NoiseKind::SaltPepper { density, amplitude: None } => write!(f, "saltpepper:{density}"),
            NoiseKind::SaltPepper { density, amplitude: Some(a) } => write!(f, "saltpepper:{density},{a}"),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("noise '{s}': {e}")))?
        };
        let kind = match (name.trim(), nums.as_slice()) {
            ("none", []) => NoiseKind::None,
            ("gaussian", [m, v]) => NoiseKind::Gaussian { mean: *m, variance: *v },
            ("poisson", []) => NoiseKind::Poisson { scale: 1000.0 },
            ("poisson", [k]) => NoiseKind::Poisson { scale: *k },
            ("saltpepper", [d]) => NoiseKind::SaltPepper { density: *d, amplitude: None },
            ("saltpepper", [d, a]) => NoiseKind::SaltPepper { density: *d, amplitude: Some(*a) },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "noise '{s}' not understood (gaussian:MEAN,VAR | poisson:SCALE | saltpepper:DENSITY[,AMP])"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Returns a noisy copy; the sample set is untouched.
pub fn add_noise(sino: &Sinogram, spec: &NoiseSpec) -> Result<Sinogram> {
    spec.kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = sino.values.clone();
    match spec.kind {
        NoiseKind::None => {}
        NoiseKind::Gaussian { mean, variance } => {
            let normal = Normal::new(mean, variance.sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for v in &mut values {
                *v += normal.sample(&mut rng);
            }
        }
        NoiseKind::Poisson { scale } => {
            for v in &mut values {
                let lambda = *v * scale;
                if lambda > 0.0 {
                    let p = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                    *v = p.sample(&mut rng) / scale;
                } else if *v >= 0.0 {
                    *v = 0.0;
                }
            }
        }
        NoiseKind::SaltPepper { density, amplitude } => {
            let amp = amplitude.unwrap_or_else(|| values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let n = values.len();
            let hits = ((density * n as f64).round() as usize).min(n);
            for i in index::sample(&mut rng, n, hits).into_vec() {
                values[i] = if rng.gen_bool(0.5) { 0.0 } else { amp };
            }
        }
    }
    let label = match spec.kind {
        NoiseKind::None => None,
        kind => Some(format!("{kind} seed={}", spec.seed)),
    };
    Ok(Sinogram {
        samples: sino.samples.clone(),
        values,
        provenance: Provenance { phantom: sino.provenance.phantom.clone(), noise: label.or(sino.provenance.noise.clone()) },
    })
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Sinogram {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn write_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.len() + 128);
        out.push_str(MAGIC);
        out.push('\n');
        match self.samples.layout {
            SampleLayout::Parallel { angles, half_offsets, spacing } => {
                out.push_str(&format!("layout,parallel,{angles},{half_offsets},{}\n", fmt17(spacing)));
            }
            SampleLayout::Scattered => out.push_str(&format!("layout,scattered,{}\n", self.len())),
        }
        if let Some(p) = &self.provenance.phantom {
            out.push_str(&format!("# phantom={p}\n"));
        }
        if let Some(n) = &self.provenance.noise {
            out.push_str(&format!("# noise={n}\n"));
        }
        for (l, v) in self.samples.samples.iter().zip(&self.values) {
            out.push_str(&format!("{},{},{}\n", fmt17(l.t), fmt17(l.theta), fmt17(*v)));
        }
        out
    }

    pub fn read_csv(text: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(perr(1, format!("expected header '{MAGIC}'"))),
        }
        let (ln, layout_line) = lines.next().ok_or_else(|| perr(2, "missing layout line".into()))?;
        let fields: Vec<&str> = layout_line.split(',').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(ln, format!("'{s}': {e}")));
        let count = |s: &str| s.parse::<usize>().map_err(|e| perr(ln, format!("'{s}': {e}")));
        let (layout, expected) = match fields.as_slice() {
            ["layout", "parallel", n, m, d] => {
                let (n, m, d) = (count(n)?, count(m)?, num(d)?);
                (SampleLayout::Parallel { angles: n, half_offsets: m, spacing: d }, n * (2 * m + 1))
            }
            ["layout", "scattered", n] => (SampleLayout::Scattered, count(n)?),
            _ => return Err(perr(ln, format!("bad layout line '{layout_line}'"))),
        };
        let mut provenance = Provenance::default();
        let mut samples = Vec::with_capacity(expected);
        let mut values = Vec::with_capacity(expected);
        let mut last = ln;
        for (ln, line) in lines {
            last = ln;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    match k.trim() {
                        "phantom" => provenance.phantom = Some(v.trim().to_string()),
                        "noise" => provenance.noise = Some(v.trim().to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(perr(ln, format!("expected t,theta,value but found {} fields", f.len())));
            }
            let p = |s: &str| s.parse::<f64>().map_err(|e| perr(ln, format!("'{s}': {e}")));
            let (t, theta, v) = (p(f[0])?, p(f[1])?, p(f[2])?);
            if !(t.is_finite() && v.is_finite() && (0.0..std::f64::consts::PI).contains(&theta)) {
                return Err(perr(ln, "non-finite value or angle outside [0, pi)".into()));
            }
            samples.push(LineParam::new(t, theta));
            values.push(v);
        }
        if samples.len() != expected {
            return Err(perr(last + 1, format!("expected {expected} rows, found {}", samples.len())));
        }
        if let SampleLayout::Parallel { angles, half_offsets, spacing } = layout {
            let grid = parallel_beam_samples(angles, half_offsets, spacing).map_err(|e| perr(ln, e.to_string()))?;
            for (i, (a, b)) in grid.samples.iter().zip(&samples).enumerate() {
                if (a.t - b.t).abs() > 1e-12 || (a.theta - b.theta).abs() > 1e-12 {
                    return Err(perr(ln + 1 + i, "row does not match the advertised parallel grid".into()));
                }
            }
            samples = grid.samples;
        }
        Ok(Sinogram { samples: SampleSet { samples, layout }, values, provenance })
    }
}
