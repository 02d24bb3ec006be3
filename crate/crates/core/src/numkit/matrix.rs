use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use super::PIVOT_EPS;
use crate::error::{Error, Result};

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix from {} entries",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows<const C: usize>(rows: &[[C64; C]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: rows.len(), cols: C, data }
    }

    /// Builds a matrix whose k-th column is `columns[k]`.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self, PIVOT_EPS)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.lu()?.inverse()
    }

    pub fn det(&self) -> C64 {
        det(self)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product dimensions")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Factors `a`; fails when a pivot drops below `pivot_eps * |a|_inf`.
    pub fn factor(a: &CMatrix, pivot_eps: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let scale = a.norm_inf();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= pivot_eps * scale || pmax == 0.0 {
                return Err(Error::SingularMatrix { column: k, pivot: pmax });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= l * ukj;
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for {n}x{n} system", b.len())));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: C64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: C64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            cols.push(self.solve(&e)?);
        }
        CMatrix::from_columns(&cols)
    }

    pub fn det(&self) -> C64 {
        let n = self.n;
        let prod: C64 = (0..n).map(|i| self.lu[i * n + i]).product();
        if self.swaps % 2 == 1 {
            -prod
        } else {
            prod
        }
    }
}

/// Solves `a x = b` by pivoted elimination.
pub fn solve_linear(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    a.lu()?.solve(b)
}

/// Determinant by pivoted elimination; exactly zero when a column has no
/// nonzero pivot candidate.
pub fn det(a: &CMatrix) -> C64 {
    assert!(a.is_square(), "determinant of a non-square matrix");
    match Lu::factor(a, 0.0) {
        Ok(lu) => lu.det(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let data = (0..n * n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        CMatrix::new(n, n, data).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn inf_norm(v: &[C64]) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    // Laplace expansion along the first row.
    fn cofactor_det(a: &CMatrix) -> C64 {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut total = c64(0.0, 0.0);
        for j in 0..n {
            let minor: Vec<C64> = (1..n)
                .flat_map(|i| (0..n).filter(move |&k| k != j).map(move |k| (i, k)))
                .map(|ix| a[ix])
                .collect();
            let m = CMatrix::new(n - 1, n - 1, minor).unwrap();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += a[(0, j)] * cofactor_det(&m) * sign;
        }
        total
    }

    #[test]
    fn identity_solve() {
        let x = solve_linear(&CMatrix::identity(2), &[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        assert_eq!(x, vec![c64(1.0, 0.0), c64(0.0, 1.0)]);
    }

    #[test]
    fn permutation_solve() {
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        let a = CMatrix::from_rows(&[[zero, one], [one, zero]]);
        let x = solve_linear(&a, &[c64(1.0, 0.0), c64(2.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c64(2.0, 0.0), c64(1.0, 0.0)]);
    }

    #[test]
    fn random_4x4_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 4);
        let b = random_vec(&mut rng, 4);
        let x = solve_linear(&a, &b).unwrap();
        let r: Vec<C64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(inf_norm(&r) < 1e-12, "residual {}", inf_norm(&r));
    }

    #[test]
    fn residual_bound_on_many_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..10_000 {
            let n = 1 + trial % 8;
            // diagonal shift keeps these well conditioned
            let mut a = random_matrix(&mut rng, n);
            for i in 0..n {
                a[(i, i)] += c64(n as f64, 0.0);
            }
            let b = random_vec(&mut rng, n);
            let x = solve_linear(&a, &b).unwrap();
            let r: Vec<C64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            let bound = crate::numkit::TOL_LINEAR * (a.norm_inf() * inf_norm(&x) + inf_norm(&b));
            assert!(inf_norm(&r) <= bound, "trial {trial}: {} > {bound}", inf_norm(&r));
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let one = c64(1.0, 0.0);
        let a = CMatrix::from_rows(&[[one, one], [one, one]]);
        assert!(matches!(solve_linear(&a, &[one, one]), Err(Error::SingularMatrix { .. })));
        assert_eq!(det(&a), c64(0.0, 0.0));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&CMatrix::identity(3)), c64(1.0, 0.0));
        let d = det(&CMatrix::diag(&[c64(2.0, 0.0), c64(0.0, 3.0)]));
        assert!((d - c64(0.0, 6.0)).norm() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 3);
            let d = det(&a);
            let oracle = cofactor_det(&a);
            assert!((d - oracle).norm() < 1e-12 * (1.0 + oracle.norm()));
        }
    }

    #[test]
    fn det_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = random_matrix(&mut rng, 4);
            let b = random_matrix(&mut rng, 4);
            let lhs = det(&(&a * &b));
            let rhs = det(&a) * det(&b);
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-300), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 5);
        let inv = a.inverse().unwrap();
        let e = &(&a * &inv) - &CMatrix::identity(5);
        assert!(e.max_abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_entries() {
        let r = CMatrix::new(1, 1, vec![c64(f64::NAN, 0.0)]);
        assert_eq!(r.unwrap_err(), Error::NonFinite("matrix"));
    }
}
