//! Browser bindings: sample a phantom, then reconstruct it by filtered
//! back-projection or Gaussian-kernel interpolation.

use radon_kit::fbp::filter::FilterSpec;
use radon_kit::geometry::parallel_beam_samples;
use radon_kit::image::rmse;
use radon_kit::kernel::{KernelModel, WindowFamily, WindowMode, WindowSpec};
use radon_kit::phantom::{builtin, rasterize};
use radon_kit::sinogram::{add_noise, sample, NoiseKind, NoiseSpec};
use radon_kit::sweep::{reconstruct, Method};
use radon_kit::{Phantom, Sinogram};
use wasm_bindgen::prelude::*;

fn js_err(e: radon_kit::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Image values in row-major order, plus quality figures.
#[wasm_bindgen]
pub struct Frame {
    values: Vec<f64>,
    width: usize,
    height: usize,
    rmse: f64,
    rcond: f64,
}

#[wasm_bindgen]
impl Frame {
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// NaN when there is no reference.
    #[wasm_bindgen(getter)]
    pub fn rmse(&self) -> f64 {
        self.rmse
    }

    /// NaN unless a kernel system was solved.
    #[wasm_bindgen(getter)]
    pub fn rcond(&self) -> f64 {
        self.rcond
    }
}

struct Setup {
    phantom: Phantom,
    sino: Sinogram,
}

fn setup(name: &str, angles: usize, offsets: usize, spacing: f64, noise: &str, seed: u64) -> Result<Setup, radon_kit::Error> {
    let phantom = builtin(name)?;
    let mut sino = sample(&phantom, &parallel_beam_samples(angles, offsets, spacing)?);
    let kind: NoiseKind = if noise.trim().is_empty() { NoiseKind::None } else { noise.parse()? };
    if kind != NoiseKind::None {
        sino = add_noise(&sino, &NoiseSpec { kind, seed })?;
    }
    Ok(Setup { phantom, sino })
}

fn frame_from(s: &Setup, method: &Method, size: usize) -> Result<Frame, radon_kit::Error> {
    let out = reconstruct(method, &s.sino, size, Some(&s.phantom))?;
    let e = rmse(&out.image, &rasterize(&s.phantom, size)?)?;
    Ok(Frame { values: out.image.values.clone(), width: size, height: size, rmse: e, rcond: out.rcond.unwrap_or(f64::NAN) })
}

/// Rasterized phantom.
#[wasm_bindgen]
pub fn phantom_frame(name: &str, size: usize) -> Result<Frame, JsError> {
    let img = rasterize(&builtin(name).map_err(js_err)?, size).map_err(js_err)?;
    Ok(Frame { values: img.values, width: size, height: size, rmse: f64::NAN, rcond: f64::NAN })
}

/// Sinogram as an image: one row per angle, one column per offset.
#[wasm_bindgen]
pub fn sinogram_frame(name: &str, angles: usize, offsets: usize, spacing: f64, noise: &str, seed: u64) -> Result<Frame, JsError> {
    let s = setup(name, angles, offsets, spacing, noise, seed).map_err(js_err)?;
    Ok(Frame { values: s.sino.values, width: 2 * offsets + 1, height: angles, rmse: f64::NAN, rcond: f64::NAN })
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn fbp_frame(
    name: &str,
    angles: usize,
    offsets: usize,
    spacing: f64,
    noise: &str,
    seed: u64,
    size: usize,
    filter: &str,
    interp: &str,
) -> Result<Frame, JsError> {
    let s = setup(name, angles, offsets, spacing, noise, seed).map_err(js_err)?;
    let family = filter.parse().map_err(js_err)?;
    let method = Method::Fbp {
        filter: FilterSpec::for_spacing(family, spacing).map_err(js_err)?,
        interp: interp.parse().map_err(js_err)?,
        algorithm: radon_kit::fbp::FbpAlgorithm::I,
    };
    frame_from(&s, &method, size).map_err(js_err)
}

/// Gaussian kernel with a Gaussian window.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn kernel_frame(
    name: &str,
    angles: usize,
    offsets: usize,
    spacing: f64,
    noise: &str,
    seed: u64,
    size: usize,
    eps: f64,
    nu: f64,
) -> Result<Frame, JsError> {
    let s = setup(name, angles, offsets, spacing, noise, seed).map_err(js_err)?;
    let model = KernelModel::Gaussian { eps };
    model.validate().map_err(js_err)?;
    let window = WindowSpec::new(WindowFamily::Gaussian { nu }, WindowMode::AllEntries).map_err(js_err)?;
    frame_from(&s, &Method::Kernel { model, window, scale: 1.0 }, size).map_err(js_err)
}

#[cfg(test)]
mod tests {
    // JsError only exists on the wasm target, so exercise the shared helpers.
    use super::*;

    #[test]
    fn sinogram_shape_and_noise() {
        let a = setup("crescent", 6, 4, 0.2, "", 0).unwrap();
        assert_eq!(a.sino.values.len(), 6 * 9);
        let b = setup("crescent", 6, 4, 0.2, "gaussian:0,0.01", 1).unwrap();
        assert_ne!(a.sino.values, b.sino.values);
        assert!(setup("crescent", 6, 4, 0.2, "bogus", 1).is_err());
    }

    #[test]
    fn reconstructions_report_quality() {
        let s = setup("crescent", 18, 20, 0.05, "", 0).unwrap();
        let fbp = Method::Fbp {
            filter: FilterSpec::for_spacing(radon_kit::fbp::filter::FilterFamily::SheppLogan, 0.05).unwrap(),
            interp: radon_kit::fbp::signal::Interpolation::Linear,
            algorithm: radon_kit::fbp::FbpAlgorithm::I,
        };
        let f = frame_from(&s, &fbp, 32).unwrap();
        assert_eq!(f.values.len(), 32 * 32);
        assert!(f.rmse < 0.25 && f.rcond.is_nan());
        let s = setup("crescent", 10, 8, 0.12, "", 0).unwrap();
        let k = Method::Kernel {
            model: KernelModel::Gaussian { eps: 12.0 },
            window: WindowSpec::new(WindowFamily::Gaussian { nu: 0.5 }, WindowMode::AllEntries).unwrap(),
            scale: 1.0,
        };
        let f = frame_from(&s, &k, 24).unwrap();
        assert!(f.rcond > 0.0 && f.rmse.is_finite());
    }
}
