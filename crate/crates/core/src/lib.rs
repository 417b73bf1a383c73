//! Subwavelength resonances of coupled dispersive resonators.
//!
//! The library computes the resonant frequencies of systems of small
//! circular (or spherical) resonators whose permittivity follows a
//! Lorentz-type dispersive law, via asymptotic integral-operator
//! pairings, and solves the inverse problem of placing three identical
//! resonators so the coupled system resonates at three prescribed
//! frequencies.
//!
//! Modules:
//! - [`material`]: the dispersive permittivity model and contrast
//! - [`specfun`]: Bessel/Hankel evaluation and the Helmholtz kernels
//! - [`quad`]: Gauss-Legendre and double-exponential quadrature engines
//! - [`coupling`]: operator pairings, self eigenvalues, dilute constants
//! - [`spectrum`]: resonance matrices, Muller search, closed-form solvers
//! - [`inverse`]: the three-target design pipeline
//! - [`sweep`]: the size-sweep dataset generator
//! - [`config`], [`output`], [`cli`]: run configuration and I/O

pub mod cli;
pub mod config;
pub mod coupling;
pub mod error;
pub mod inverse;
pub mod material;
pub mod output;
pub mod quad;
pub mod specfun;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
