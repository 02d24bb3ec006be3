//! [`ProblemBackend`] for the 2×2 system.

use num_complex::Complex64 as C64;

use super::coeffs::Coefficients;
use super::essspec::ExclusionSet;
use super::kernel::{adjoint_kernel, kernel_ends, kernel_grid_functions, KernelOptions};
use super::resolvent::direct_resolvent;
use crate::error::{Error, Result};
use crate::numkit::{differentiate, Grid, GridFunction};
use crate::triplet::{BoundaryData, BoundaryRealization, ProblemBackend};

pub const DEFAULT_TUBE_EPS: f64 = 0.05;
const EXCLUSION_SAMPLES: usize = 2049;
const B_EPS: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct OdeBackend {
    coeffs: Coefficients,
    grid: Grid,
    opts: KernelOptions,
    tube_eps: f64,
    exclusion: ExclusionSet,
}

impl OdeBackend {
    pub fn new(coeffs: Coefficients, grid_n: usize) -> Result<Self> {
        Self::with_options(coeffs, grid_n, KernelOptions::default(), DEFAULT_TUBE_EPS)
    }

    pub fn with_options(coeffs: Coefficients, grid_n: usize, opts: KernelOptions, tube_eps: f64) -> Result<Self> {
        coeffs.validate()?;
        if !(tube_eps >= 0.0 && tube_eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("tube_eps = {tube_eps}")));
        }
        let exclusion = ExclusionSet::new(&coeffs, EXCLUSION_SAMPLES, B_EPS);
        Ok(Self { coeffs, grid: Grid::new(grid_n)?, opts, tube_eps, exclusion })
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn options(&self) -> &KernelOptions {
        &self.opts
    }

    pub fn tube_eps(&self) -> f64 {
        self.tube_eps
    }

    /// Fails with `EssentialTube` when `λ` is within `tube_eps` of the
    /// points where the reduction is singular.
    pub fn check_tube(&self, lambda: C64) -> Result<()> {
        if self.exclusion.distance(lambda) < self.tube_eps {
            return Err(Error::EssentialTube { lambda, tube_eps: self.tube_eps });
        }
        Ok(())
    }

    /// Resolvent of `realization` by direct finite differences.
    pub fn direct_resolvent(&self, realization: &BoundaryRealization, lambda: C64, f: &GridFunction) -> Result<GridFunction> {
        direct_resolvent(&self.coeffs, realization, lambda, f, self.opts.den_eps)
    }
}

impl ProblemBackend for OdeBackend {
    fn defect_dim(&self) -> usize {
        2
    }

    fn grid(&self) -> Grid {
        self.grid
    }

    fn kernel_basis(&self, lambda: C64) -> Result<Vec<GridFunction>> {
        self.check_tube(lambda)?;
        kernel_grid_functions(&self.coeffs, lambda, self.grid, &self.opts)
    }

    fn gamma0(&self, u: &GridFunction) -> Vec<C64> {
        vec![u.last()[0], u.first()[0]]
    }

    /// Endpoint derivatives from one-sided fourth-order differences.
    fn gamma1(&self, u: &GridFunction) -> Vec<C64> {
        let u1 = u.component(0);
        let n = u1.len();
        let h = u.grid().spacing();
        let ends = [&u1[..5], &u1[n - 5..]];
        let d0 = differentiate(ends[0], h).map(|d| d[0]);
        let d1 = differentiate(ends[1], h).map(|d| d[4]);
        let (d0, d1) = match (d0, d1) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return vec![C64::new(f64::NAN, 0.0); 2],
        };
        let a0 = self.coeffs.at(0.0).a;
        let a1 = self.coeffs.at(1.0).a;
        vec![-d1 + a1 * u.last()[1], d0 - a0 * u.first()[1]]
    }

    fn reference_resolvent(&self, lambda: C64, f: &GridFunction) -> Result<GridFunction> {
        self.check_tube(lambda)?;
        self.direct_resolvent(&BoundaryRealization::dirichlet(2), lambda, f)
            .map_err(|e| match e {
                Error::SpectralPoint { lambda } => Error::DirichletSpectrum { lambda },
                other => other,
            })
    }

    fn adjoint_kernel_basis(&self, mu: C64) -> Result<Vec<GridFunction>> {
        self.check_tube(mu.conj())?;
        adjoint_kernel(&self.coeffs, mu, self.grid, &self.opts)
    }

    /// Exact endpoint traces from the shooting data, without interior
    /// sampling.
    fn boundary_data(&self, lambda: C64) -> Result<BoundaryData> {
        self.check_tube(lambda)?;
        let (_, gamma0, gamma1) = kernel_ends(&self.coeffs, lambda, &self.opts)?;
        Ok(BoundaryData { gamma0, gamma1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;

    #[test]
    fn tube_rejects_points_near_curve() {
        let b = OdeBackend::new(Coefficients::generic(), 101).unwrap();
        let v = Coefficients::generic().at(0.3);
        let on_curve = v.a * v.b + v.c;
        assert!(matches!(b.boundary_data(on_curve + c64(0.01, 0.0)), Err(Error::EssentialTube { .. })));
        assert!(b.boundary_data(c64(-1.0, 0.0)).is_ok());
    }

    #[test]
    fn grid_traces_match_exact_traces() {
        let b = OdeBackend::new(Coefficients::generic(), 2001).unwrap();
        let lambda = c64(-3.0, 1.0);
        let basis = b.kernel_basis(lambda).unwrap();
        let exact = b.boundary_data(lambda).unwrap();
        for (k, z) in basis.iter().enumerate() {
            let (g0, g1) = (b.gamma0(z), b.gamma1(z));
            for r in 0..2 {
                assert!((g0[r] - exact.gamma0[(r, k)]).norm() < 1e-12);
                assert!((g1[r] - exact.gamma1[(r, k)]).norm() < 1e-8, "{} {}", g1[r], exact.gamma1[(r, k)]);
            }
        }
    }
}
