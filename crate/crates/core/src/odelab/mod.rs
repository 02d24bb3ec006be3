//! The 2×2 ODE system `A(u, v) = (−u″ + a v′, b u′ + c v)` on [0, 1]:
//! coefficient families, kernel shooting, boundary traces, the closed-form
//! M-function, a direct finite-difference resolvent, the essential-spectrum
//! curve and the twin construction.

pub mod backend;
pub mod coeffs;
pub mod essspec;
pub mod kernel;
pub mod mfn;
pub mod resolvent;
pub mod twin;

pub use backend::OdeBackend;
pub use coeffs::{CoeffSpec, Coefficients, Cplx, TrigKind, TrigTerm};
pub use essspec::{ess_spectrum_curve, hausdorff_distance, EssSpecCurve, ExclusionSet};
pub use kernel::{gamma_traces, kernel_pair, q_alpha_beta, KernelOptions, KernelPair};
pub use mfn::{compare_mfn, mfn_closed_form, MfnComparison};
pub use resolvent::{direct_resolvent, direct_resolvent_with_estimate};
pub use twin::twin_counterexample;
