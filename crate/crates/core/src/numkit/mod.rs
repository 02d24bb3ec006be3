//! Numeric substrate: small dense complex linear algebra, a pivoted band
//! solver, Simpson quadrature on uniform grids of [0, 1] and an adaptive
//! Dormand–Prince integrator for complex initial-value problems.

mod banded;
mod grid;
mod ivp;
mod matrix;

pub use banded::BandMatrix;
pub use grid::{differentiate, quad_inner, Grid, GridFunction};
pub use ivp::{integrate_ivp, IvpOptions, Trajectory};
pub use matrix::{det, solve_linear, CMatrix, Lu};

pub use num_complex::Complex64 as C64;

/// Default relative pivot threshold for elimination.
pub const PIVOT_EPS: f64 = 1e-13;
/// Default residual tolerance for dense solves.
pub const TOL_LINEAR: f64 = 1e-12;
/// Default per-step tolerance of the integrator.
pub const ODE_TOL: f64 = 1e-10;
/// Default grid size (odd, Simpson compatible).
pub const DEFAULT_GRID_N: usize = 4001;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
