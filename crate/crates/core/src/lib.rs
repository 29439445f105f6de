//! Numerical laboratory for the Gauss hypergeometric equation, its confluence
//! to the Kummer equation, and the connection, Stokes and monodromy data of both.
//!
//! The crate is organised bottom-up:
//!
//! - [`scalar_special`]: complex log-gamma, reciprocal gamma, Pochhammer symbols.
//! - [`hyper_series`]: convergent ₂F₁ / ₁F₁ summation and optimally truncated ₂F₀.
//! - [`ode_systems`]: the 2×2 Fuchsian and irregular systems and their residue data.
//! - [`local_frames`]: local fundamental matrices with explicit branch bookkeeping.
//! - [`closed_form_monodromy`]: gamma-product connection, Stokes and monodromy matrices.
//! - [`continuation_oracle`]: adaptive Runge–Kutta transport along complex paths.
//! - [`mellin_barnes`]: contour quadrature of the Barnes-type integrals.
//! - [`confluence_lab`]: rescaled products and their limits as α → ∞.

pub mod batch;
pub mod closed_form_monodromy;
pub mod confluence_lab;
pub mod continuation_oracle;
mod dd;
mod error;
pub mod hyper_series;
pub mod local_frames;
pub mod mat2;
pub mod mellin_barnes;
pub mod ode_systems;
mod params;
pub mod sampling;
pub mod scalar_special;

pub use error::{Error, Result};
pub use mat2::Mat2;
pub use num_complex::Complex64 as C64;
pub use params::Params;

/// Default series tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default cap on the number of series terms.
pub const TERM_CAP: usize = 100_000;
/// Default distance-to-integer threshold for resonance checks.
pub const RESONANCE_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
