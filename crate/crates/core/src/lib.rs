//! Analytic phantoms, exact Radon transforms and three families of
//! tomographic reconstruction: filtered back-projection, algebraic
//! reconstruction (Kaczmarz) and kernel-based interpolation of line integrals.

pub mod art;
pub mod error;
pub mod fbp;
pub mod geometry;
pub mod image;
pub mod kernel;
pub mod numerics;
pub mod phantom;
pub mod sinogram;
pub mod sweep;

mod par;

pub use error::{Error, Result};
pub use geometry::{LineParam, Point, SampleLayout, SampleSet};
pub use image::ImageGrid;
pub use phantom::Phantom;
pub use sinogram::Sinogram;
