//! Numerical toolkit for Hardy spaces on the disk and the upper half-plane.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: sampled torus signals, the analytic (Riesz) projection,
//!   real-line quadrature, polynomial roots and the complex Gamma function.
//! * [`blaschke`]: exact finite Blaschke products, composition, iteration and
//!   zero ladders of iterates.
//! * [`mt`]: Malmquist-Takenaka bases and projections onto invariant subspaces.
//! * [`unwinding`]: FFT-based Blaschke factorization and the unwinding series.
//! * [`dynamics`]: fixed points of `((z+a)/(1+conj(a)z))^2`, zero-modulus
//!   bounds and divergence diagnostics for iterated products.
//! * [`wavelet`]: the dyadic holomorphic wavelet family on the upper half-plane.
//! * [`render`]: deterministic PPM renders of phase and modulus fields.

pub mod blaschke;
pub mod dynamics;
pub mod error;
pub mod mt;
pub mod numerics;
pub mod render;
pub mod unwinding;
pub mod wavelet;

pub use error::{HardyError, Result};
pub use num_complex::Complex64;
