//! Shared numerical kernels.

mod gamma;
mod quadrature;
mod roots;
mod signal;

pub use gamma::{complex_gamma, ln_gamma, ln_gamma_ratio};
pub use quadrature::{gauss_legendre, inner_product, InnerDomain, RealLineGrid};
pub use roots::{poly_eval, poly_roots, polynomial_from_roots};
pub use signal::{analytic_completion_real, analytic_projection, TorusSignal, DEFAULT_GRID_N};
