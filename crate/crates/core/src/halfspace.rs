//! Exact symbols of the biharmonic model problem on the half-space.
//!
//! At frequency `ξ'` with `ρ = |ξ'|` and spectral parameter `λ = -μ⁴`,
//! `μ` in the sector `|arg μ| < π/4`, the operator `(ρ² - ∂ₙ²)² + μ⁴`
//! factors through the roots `±σ₊, ±σ₋` with `σ± = (ρ² ± iμ²)^½`. The
//! decaying solutions `c₁e^{-σ₊xₙ} + c₂e^{-σ₋xₙ}` give the Poisson
//! symbol-kernel, the Dirichlet-to-Neumann symbol `p^λ` and, for a
//! first-order boundary operator with symbol `c(ξ')`, the scalar M-symbol
//! `m = -(c + (σ₊ + σ₋)/2)⁻¹`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkit::CMatrix;

/// Parameters closer than this to the sector edge `|arg μ| = π/4` are
/// rejected.
pub const SECTOR_MARGIN: f64 = 1e-12;
const ROOT_EPS: f64 = 1e-14;
const POLE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfspaceParams {
    rho: f64,
    mu: C64,
    symbol_c: C64,
}

impl HalfspaceParams {
    /// `symbol_c` is the boundary-operator symbol `c(ξ')`, e.g. `i b·ξ'`.
    pub fn new(rho: f64, mu: C64, symbol_c: C64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("rho = {rho} must be finite and >= 0")));
        }
        if !symbol_c.is_finite() {
            return Err(Error::NonFinite("boundary symbol"));
        }
        if !mu.is_finite() || mu.norm() == 0.0 || mu.arg().abs() >= FRAC_PI_4 - SECTOR_MARGIN {
            return Err(Error::SectorViolation { mu });
        }
        Ok(Self { rho, mu, symbol_c })
    }

    /// Builds `c(ξ') = i b·ξ'` with `ξ' = ρ e_direction`.
    pub fn from_bvec(rho: f64, mu: C64, bvec: &[f64], direction: usize) -> Result<Self> {
        if !bvec.is_empty() && direction >= bvec.len() {
            return Err(Error::InvalidArgument(format!(
                "direction {direction} outside a boundary vector of length {}",
                bvec.len()
            )));
        }
        let b = bvec.get(direction).copied().unwrap_or(0.0);
        Self::new(rho, mu, C64::new(0.0, b * rho))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn symbol_c(&self) -> C64 {
        self.symbol_c
    }

    pub fn lambda(&self) -> C64 {
        -self.mu.powi(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPair {
    pub sigma_plus: C64,
    pub sigma_minus: C64,
}

impl SigmaPair {
    pub fn sum(&self) -> C64 {
        self.sigma_plus + self.sigma_minus
    }

    pub fn product(&self) -> C64 {
        self.sigma_plus * self.sigma_minus
    }
}

/// Principal square roots `σ± = (ρ² ± iμ²)^½`; both have positive real part
/// inside the sector.
pub fn sigma_pm(params: &HalfspaceParams) -> SigmaPair {
    let rho2 = C64::new(params.rho * params.rho, 0.0);
    let imu2 = C64::new(0.0, 1.0) * params.mu * params.mu;
    SigmaPair { sigma_plus: (rho2 + imu2).sqrt(), sigma_minus: (rho2 - imu2).sqrt() }
}

/// Coefficients of the decaying solution `c₁e^{-σ₊xₙ} + c₂e^{-σ₋xₙ}` with
/// value `phi0` and normal derivative `phi1` at `xₙ = 0`.
pub fn poisson_symbol_coeffs(params: &HalfspaceParams, phi0: C64, phi1: C64) -> Result<(C64, C64)> {
    let s = sigma_pm(params);
    let gap = s.sigma_plus - s.sigma_minus;
    if gap.norm() < ROOT_EPS {
        return Err(Error::DegenerateRoots);
    }
    let c1 = (-s.sigma_minus * phi0 - phi1) / gap;
    let c2 = (s.sigma_plus * phi0 + phi1) / gap;
    Ok((c1, c2))
}

/// Dirichlet-to-Neumann symbol
/// `p^λ = ¼(σ₊+σ₋) [[2σ₊σ₋, σ₊+σ₋], [-(σ₊+σ₋), -2]]`.
///
/// Entry `(1, 1)` (zero based) is the one labelled `p₁₁` in the index set
/// {00, 01, 10, 11}; it is the entry that enters the M-symbol.
pub fn dtn_symbol(params: &HalfspaceParams) -> CMatrix {
    let s = sigma_pm(params);
    let sum = s.sum();
    let q = sum * 0.25;
    CMatrix::from_rows(&[[q * 2.0 * s.product(), q * sum], [-q * sum, q * -2.0]])
}

/// Dirichlet-to-Neumann symbol computed from first principles: the traces
/// `(ν(ρ² - ∂ₙ²)v, (∂ₙ² - ρ²)v)` at `xₙ = 0`, with `ν = -∂ₓₙ` the outward
/// normal derivative, of the decaying solution with Cauchy data `(1, 0)` and
/// `(0, 1)`.
///
/// This equals `2 * dtn_symbol(params)`: the closed form carries
/// `(σ₊ - σ₋)⁻¹ = (σ₊ + σ₋)/(4iμ²)` where `σ₊² - σ₋² = 2iμ²`.
pub fn traced_dtn_symbol(params: &HalfspaceParams) -> Result<CMatrix> {
    let s = sigma_pm(params);
    let rho2 = params.rho * params.rho;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut columns = Vec::with_capacity(2);
    for (phi0, phi1) in [(one, zero), (zero, one)] {
        let (c1, c2) = poisson_symbol_coeffs(params, phi0, phi1)?;
        let deriv = |k: i32| c1 * (-s.sigma_plus).powi(k) + c2 * (-s.sigma_minus).powi(k);
        let first = -(deriv(1) * rho2 - deriv(3));
        let second = deriv(2) - deriv(0) * rho2;
        columns.push(vec![first, second]);
    }
    CMatrix::from_columns(&columns)
}

/// Symbol `l^λ = c(ξ') - p^λ₁₁ = c(ξ') + (σ₊ + σ₋)/2`.
pub fn l_symbol(params: &HalfspaceParams) -> C64 {
    params.symbol_c + sigma_pm(params).sum() * 0.5
}

/// Scalar M-symbol `m(ξ', λ) = -(c(ξ') + (σ₊+σ₋)/2)⁻¹`.
pub fn m_symbol(params: &HalfspaceParams) -> Result<C64> {
    let l = l_symbol(params);
    if l.norm() < POLE_EPS {
        return Err(Error::SymbolPole { denominator: l });
    }
    Ok(-l.inv())
}
