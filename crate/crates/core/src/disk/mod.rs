//! Numerical machinery on the unit disk: grids, global sups, boundary
//! tails and integral means.

mod grid;
mod quad;
mod sup;
mod tail;

use thiserror::Error;

use crate::symbol::EvalError;

pub use grid::{build_grid, build_grid_capped, DiskGrid, DEFAULT_ANGULAR_CAP};
pub use quad::{bergman_integral, circle_mean, circle_mean_adaptive, gauss_legendre, QuadConfig};
pub use sup::{
    grid_steps, point_steps, polish, polish_hit, sup_estimate, sup_estimate_with, sweep_max, sweep_max_with,
    GridHit, SupEstimate, Sweep, DEFAULT_POLISH_ITERS,
};
pub use tail::{band_index, default_cuts, tail_sup, validate_cuts, TailEstimate, Trend, TrendRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid has no evaluable points")]
    EmptyGrid,
    #[error("{skipped} of {total} grid points failed to evaluate{}", first.map(|e| format!(" (first: {e})")).unwrap_or_default())]
    TooManyFailures {
        skipped: usize,
        total: usize,
        first: Option<EvalError>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `1 - |z|^2`.
#[inline]
pub fn one_minus_abs2(z: num_complex::Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}
