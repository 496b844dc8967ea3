//! Numerical substrate: sample grids, adaptive quadrature, and the scaled
//! discrete Fourier transform used throughout the crate.

pub mod fft;
pub mod grid;
pub mod quadrature;

pub use fft::{dft_forward, dft_inverse};
pub use grid::Grid;
pub use quadrature::{integrate_nd, integrate_nd_real, Domain, QuadratureSpec};
