//! Numerical laboratory for boundary Cauchy data of Laplace eigenfunctions on
//! analytic plane domains.
//!
//! The crate evaluates holomorphic continuations of eigenfunction boundary
//! traces through complexified layer potentials, counts real and complex
//! boundary nodal points and critical points, and runs scaling experiments
//! against closed-form disc and ellipse modes.
//!
//! Module map:
//! - [`specfun`]: complex-argument Bessel and Hankel functions of orders 0
//!   and 1, and the split of the fundamental solution into Riemann function
//!   and entire part.
//! - [`geometry`]: closed analytic curves as truncated Fourier series, their
//!   holomorphic complexification and the complexified squared distance.
//! - [`quadrature`]: periodic trapezoid and graded Gauss-Legendre panels.
//! - [`modes`]: closed-form disc modes, shooting-method ellipse modes, and
//!   externally supplied boundary traces.
//! - [`continuation`]: interior-curve layer-potential continuation and
//!   boundary self-continuation (log-branch tracking plus Volterra inversion).
//! - [`counting`]: zero/critical-point counters, Schiffer and goodness
//!   ratios, scaling experiments and their CSV schema.
//! - [`experiments`]: batch drivers shared by the CLI and the test suites.

pub mod continuation;
pub mod counting;
pub mod experiments;
pub mod geometry;
pub mod modes;
pub mod quadrature;
pub mod specfun;

pub use num_complex::Complex64;

/// Crate-wide error type; each module contributes its own variant set.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Specfun(#[from] specfun::SpecfunError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Modes(#[from] modes::ModesError),
    #[error(transparent)]
    Continuation(#[from] continuation::ContinuationError),
    #[error(transparent)]
    Counting(#[from] counting::CountingError),
}

pub type Result<T> = std::result::Result<T, Error>;
