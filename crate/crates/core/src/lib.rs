//! Rational approximation in Hardy spaces on tubes over octants.
//!
//! The crate represents boundary data of holomorphic functions on tube
//! domains through spectral densities supported on a cone, splits arbitrary
//! square-integrable boundary samples into their octant components, and
//! approximates each component by a greedy expansion over shifted rational
//! kernels and their derivatives. The pieces:
//!
//! - [`numerics`]: sampling grids, the scaled transform pairing, adaptive
//!   quadrature for oracle integrals.
//! - [`kernels`]: the product kernel of the first octant, its derivative
//!   dictionary, closed-form norms and inner products.
//! - [`hardy`]: octant signatures, spectral components, split and
//!   reconstruction of boundary samples.
//! - [`afd`]: the adaptive greedy loop, fixed-node projection, a matching
//!   pursuit baseline, the convergence-rate harness, and the portable
//!   [`afd::Approximant`] model.
//! - [`cones`]: planar cones beyond the octant, their duals, kernels, and
//!   Poisson-type bounds.
//! - [`io`]: CSV, binary, and JSON interchange for samples, components, and
//!   models.
//! - [`validate`]: the self-check suites backing the CLI `validate` command.

pub mod afd;
pub mod cones;
pub mod error;
pub mod hardy;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod numerics;
pub mod validate;

pub use error::{AfdError, Result};
