//! Numerical kernels: special functions, FFT, and small complex linear-algebra helpers.

pub mod bessel;
pub mod fft;
pub mod linalg;

pub use bessel::{bessel_j, j0, j1};
