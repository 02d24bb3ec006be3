use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Uniform grid `x_k = k / (n - 1)` on [0, 1] with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        if k == self.n - 1 {
            1.0
        } else {
            k as f64 / (self.n - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// The grid with every other point removed, when that is still odd.
    pub fn coarsened(&self) -> Option<Grid> {
        Grid::new(self.n.div_ceil(2)).ok()
    }
}

/// A C²-valued function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<[C64; 2]>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<[C64; 2]>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples on a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![[C64::new(0.0, 0.0); 2]; grid.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> [C64; 2]) -> Self {
        Self { grid, values: (0..grid.len()).map(|k| f(grid.point(k))).collect() }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[[C64; 2]] {
        &self.values
    }

    pub fn component(&self, c: usize) -> Vec<C64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    pub fn first(&self) -> [C64; 2] {
        self.values[0]
    }

    pub fn last(&self) -> [C64; 2] {
        self.values[self.values.len() - 1]
    }

    fn check_same(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch { left: self.grid.len(), right: other.grid.len() });
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &GridFunction) -> Result<GridFunction> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| [u[0] + s * v[0], u[1] + s * v[1]])
            .collect();
        Ok(GridFunction { grid: self.grid, values })
    }

    pub fn scaled(&self, s: C64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|v| [v[0] * s, v[1] * s]).collect() }
    }

    /// Linear combination `sum_k coeffs[k] * basis[k]`.
    pub fn combination(basis: &[GridFunction], coeffs: &[C64]) -> Result<GridFunction> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch(format!("{} basis functions, {} coefficients", basis.len(), coeffs.len())));
        }
        let mut out = GridFunction::zeros(first.grid);
        for (b, &c) in basis.iter().zip(coeffs) {
            out = out.axpy(c, b)?;
        }
        Ok(out)
    }

    pub fn l2_norm(&self) -> f64 {
        quad_inner(self, self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// Discrete L² distance to `other`.
    pub fn l2_distance(&self, other: &GridFunction) -> Result<f64> {
        Ok(self.axpy(C64::new(-1.0, 0.0), other)?.l2_norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Composite Simpson approximation of `∫₀¹ ⟨f(x), g(x)⟩ dx`, conjugate-linear
/// in `g`.
pub fn quad_inner(f: &GridFunction, g: &GridFunction) -> Result<C64> {
    f.check_same(g)?;
    let n = f.grid.len();
    let h = f.grid.spacing();
    let mut acc = C64::new(0.0, 0.0);
    for (k, (u, v)) in f.values.iter().zip(&g.values).enumerate() {
        let w = if k == 0 || k == n - 1 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += (u[0] * v[0].conj() + u[1] * v[1].conj()) * w;
    }
    Ok(acc * (h / 3.0))
}

/// Fourth-order finite-difference derivative of uniformly spaced samples
/// (central in the interior, one-sided at the two points nearest each end).
/// Needs at least five samples.
pub fn differentiate(values: &[C64], h: f64) -> Result<Vec<C64>> {
    let n = values.len();
    if n < 5 {
        return Err(Error::InvalidArgument(format!("differentiate needs 5 samples, got {n}")));
    }
    let f = values;
    let s = 1.0 / (12.0 * h);
    let mut d = vec![C64::new(0.0, 0.0); n];
    d[0] = (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * s;
    d[1] = (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) * s;
    for j in 2..n - 2 {
        d[j] = (f[j - 2] - f[j - 1] * 8.0 + f[j + 1] * 8.0 - f[j + 2]) * s;
    }
    d[n - 1] = (f[n - 1] * 25.0 - f[n - 2] * 48.0 + f[n - 3] * 36.0 - f[n - 4] * 16.0 + f[n - 5] * 3.0) * s;
    d[n - 2] = (f[n - 1] * 3.0 + f[n - 2] * 10.0 - f[n - 3] * 18.0 + f[n - 4] * 6.0 - f[n - 5]) * s;
    Ok(d)
}
