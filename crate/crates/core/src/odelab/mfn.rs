//! Closed-form Neumann M-function entries in terms of the shooting data,
//! next to the boundary-matrix oracle `Γ₀ ∘ Γ₁⁻¹`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::coeffs::Coefficients;
use super::kernel::{kernel_ends, KernelOptions};
use crate::error::{Error, Result};
use crate::numkit::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfnOptions {
    pub kernel: KernelOptions,
    /// `|y1′(1)|` below this is reported as a Neumann eigenvalue.
    pub neumann_eps: f64,
}

impl Default for MfnOptions {
    fn default() -> Self {
        Self { kernel: KernelOptions::default(), neumann_eps: 1e-10 }
    }
}

/// The four entries
/// `m₁₁ = y1(1)/(κ₁ y1′(1))`, `m₁₂ = 1/(κ₀ y1′(1))`,
/// `m₂₁ = 1/(κ₁ y1′(1))`, `m₂₂ = y2′(1)/(κ₀ y1′(1))`
/// with `κ₁ = a(1)b(1)/(λ−c(1)) − 1` and `κ₀ = 1 − a(0)b(0)/(λ−c(0))`.
pub fn mfn_closed_form(coeffs: &Coefficients, lambda: C64, opts: &MfnOptions) -> Result<CMatrix> {
    let (e, _, _) = kernel_ends(coeffs, lambda, &opts.kernel)?;
    if e.dy1.norm() < opts.neumann_eps {
        return Err(Error::NeumannEigenvalue { lambda, y1_prime: e.dy1 });
    }
    let k1 = e.at1.kappa;
    let k0 = -e.at0.kappa;
    if k1.norm() < opts.kernel.den_eps || k0.norm() < opts.kernel.den_eps {
        return Err(Error::BracketSingular { lambda });
    }
    let one = C64::new(1.0, 0.0);
    Ok(CMatrix::from_rows(&[
        [e.y1 / (k1 * e.dy1), one / (k0 * e.dy1)],
        [one / (k1 * e.dy1), e.dy2 / (k0 * e.dy1)],
    ]))
}

/// Side-by-side report of the closed form against the oracle.
#[derive(Debug, Clone, Serialize)]
pub struct MfnComparison {
    pub lambda: [f64; 2],
    /// Row-major `[re, im]` entries.
    pub closed_form: [[f64; 2]; 4],
    pub oracle: [[f64; 2]; 4],
    pub abs_diff: [f64; 4],
    /// `|closed + oracle|` per entry: small where only the sign differs.
    pub abs_sum: [f64; 4],
    /// `y1 y2′ − y2 y1′` at `x = 1`.
    pub wronskian_at_1: [f64; 2],
}

impl MfnComparison {
    pub fn entries_agree(&self, idx: usize, tol: f64) -> bool {
        let scale = self.oracle[idx][0].hypot(self.oracle[idx][1]).max(1.0);
        self.abs_diff[idx] <= tol * scale
    }

    pub fn entries_opposite(&self, idx: usize, tol: f64) -> bool {
        let scale = self.oracle[idx][0].hypot(self.oracle[idx][1]).max(1.0);
        self.abs_sum[idx] <= tol * scale
    }
}

/// Compares [`mfn_closed_form`] with `oracle`, the Neumann M-matrix obtained
/// by inverting the trace matrices.
pub fn compare_mfn(coeffs: &Coefficients, lambda: C64, oracle: &CMatrix, opts: &MfnOptions) -> Result<MfnComparison> {
    let closed = mfn_closed_form(coeffs, lambda, opts)?;
    let (e, _, _) = kernel_ends(coeffs, lambda, &opts.kernel)?;
    let pair = |z: C64| [z.re, z.im];
    let idx = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let w = e.y1 * e.dy2 - e.y2 * e.dy1;
    Ok(MfnComparison {
        lambda: pair(lambda),
        closed_form: idx.map(|ij| pair(closed[ij])),
        oracle: idx.map(|ij| pair(oracle[ij])),
        abs_diff: idx.map(|ij| (closed[ij] - oracle[ij]).norm()),
        abs_sum: idx.map(|ij| (closed[ij] + oracle[ij]).norm()),
        wronskian_at_1: pair(w),
    })
}
