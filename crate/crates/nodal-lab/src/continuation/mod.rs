//! Holomorphic continuation of boundary Cauchy data.
//!
//! Two routes are implemented. For a curve strictly interior to the domain,
//! the layer-potential representation continues directly
//! ([`continue_interior`]). On the boundary itself the logarithm of the
//! fundamental solution makes the integrand multi-valued; the continuation
//! assembles the real-domain terms of the jump formula with a tracked branch
//! of log r^2 ([`millar_rhs`]) and inverts the resulting Volterra obstruction
//! along a vertical parameter segment ([`volterra_solve`]).

mod branch;
mod interior;
mod log_integral;
mod millar;

pub use branch::{log_branch, LogBranch};
pub use interior::continue_interior;
pub use log_integral::{log_integral, AnalyticFn, LogIntegralValue, TrigPolynomial};
pub use millar::{growth_profile, millar_rhs, volterra_solve, ContinuationEngine, GrowthProfile};

use crate::geometry::GeometryError;
use crate::specfun::{SeriesPolicy, SpecfunError};
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum ContinuationError {
    #[error("continuation point violates the branch precondition: {0}")]
    BranchUnsafe(String),
    #[error("quadrature failed to converge after {rounds} doublings (last change {last:.3e})")]
    QuadratureStalled { rounds: usize, last: f64 },
    #[error("phase tracking jumps by {jump:.3} rad over an interval of width {width:.3e} at s = {s}")]
    UnwrapAmbiguity { s: f64, width: f64, jump: f64 },
    #[error("the two continuation formulas disagree: {main} vs {alt} (|diff| = {diff:.3e})")]
    BranchMismatch {
        main: Complex64,
        alt: Complex64,
        diff: f64,
    },
    #[error("quadrature node within a tenth of the grid scale of the Cauchy pole at s = {s}")]
    NearPoleQuadrature { s: f64 },
    #[error("Volterra kernel magnitude {mag:.3e} exceeds its growth envelope {bound:.3e}; branch fault upstream")]
    KernelOverflow { mag: f64, bound: f64 },
    #[error("bad evaluation grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Resolution knobs for the continuation quadratures. The defaults deliver
/// the tolerances the acceptance experiments pin; batch drivers may relax
/// `volterra_target` when only integer counts are extracted.
#[derive(Debug, Clone)]
pub struct ContinuationParams {
    pub policy: SeriesPolicy,
    /// Gauss-Legendre order per panel on the real boundary.
    pub panel_order: usize,
    /// Smallest panel width at the near-singular parameter point.
    pub min_panel: f64,
    /// Oscillation budget: maximum panel width is osc_budget / lambda.
    pub osc_budget: f64,
    /// Relative change required of a Volterra node-doubling round.
    pub volterra_target: f64,
    /// Doubling rounds allowed before QuadratureStalled.
    pub volterra_rounds: usize,
    /// Re-run the boundary quadrature on a refined mesh and compare
    /// (single-point public entry points only; engines amortize).
    pub self_check: bool,
    /// Relative tolerance of the interior-curve continuation doubling.
    pub interior_target: f64,
}

impl Default for ContinuationParams {
    fn default() -> Self {
        ContinuationParams {
            policy: SeriesPolicy::default(),
            panel_order: 16,
            min_panel: 1e-4,
            osc_budget: 9.0,
            volterra_target: 1e-7,
            volterra_rounds: 6,
            self_check: false,
            interior_target: 1e-8,
        }
    }
}

/// Value of a continued trace with its self-consistency diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ContinuationResult {
    pub value: Complex64,
    /// Total quadrature nodes spent on the value.
    pub quadrature_points: usize,
    /// Relative change of the final refinement round.
    pub residual: f64,
    /// Number of adaptive phase-tracking insertions performed.
    pub branch_audit: usize,
    /// Set when the residual did not reach the configured target.
    pub flagged: bool,
}
