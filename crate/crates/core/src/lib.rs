//! Numerical laboratory for boundary triplets: Dirichlet-to-Neumann
//! matrices, Weyl M-functions and Kreĭn resolvent formulas for boundary
//! realizations of a 2×2 ODE system on [0, 1], exact half-space symbols of
//! the biharmonic model problem, and the twin-operator construction showing
//! that the M-function does not see the essential spectrum.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod halfspace;
pub mod numkit;
pub mod odelab;
pub mod par;
pub mod triplet;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
