//! Multi-shell q-space sampling and spherical polar Fourier (SPF) transforms.
//!
//! The crate is `no_std` and needs only `alloc`. It provides
//!
//! * [`specfun`]: generalized Laguerre polynomials and their roots, normalized
//!   associated Legendre functions and complex spherical harmonics;
//! * [`radial`]: Gauss-Laguerre shell placement, quadrature weights and the
//!   Gaussian-Laguerre radial basis;
//! * [`angular`]: an iso-latitude hemisphere scheme with `L(L+1)/2` samples and
//!   an order-recursive spherical harmonic transform;
//! * [`multishell`]: the composed grid and the forward/inverse SPF transform;
//! * [`signals`]: synthetic signals for validation.
//!
//! File formats and the command-line tool live in the `qspace` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod angular;
mod error;
mod linalg;
pub mod multishell;
pub mod radial;
pub mod signals;
pub mod specfun;
mod value;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use value::Value;

/// Condition number above which a linear solve is refused.
pub const MAX_CONDITION: f64 = 1e8;
