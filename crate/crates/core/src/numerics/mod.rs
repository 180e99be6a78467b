//! Special functions, adaptive quadrature, dense LU and condition estimation.

pub mod linalg;
pub mod quadrature;
pub mod special;

pub use linalg::{dense_solve, rcond_1norm, DenseMatrix, Lu};
pub use quadrature::{adaptive_quadrature, integrate, tanh_sinh, QuadratureResult};
pub use special::{acosh, asinh, erf, erfc};
