use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored in
/// place by Gaussian elimination with partial pivoting.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns
/// absorb the fill produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![C64::new(0.0, 0.0); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl, "({i},{j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return C64::new(0.0, 0.0);
        }
        self.data[self.slot(i, j)]
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`, consuming the matrix. A pivot below
    /// `pivot_eps * max|a_ij|` is reported as `SingularMatrix`.
    pub fn solve(mut self, b: &[C64], pivot_eps: f64) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for band system of size {n}", b.len())));
        }
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let span = self.ku + self.kl;
        let mut x = b.to_vec();
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + span).min(n - 1);
            let (p, pmax) = (k..=last_row)
                .map(|i| (i, self.data[self.slot(i, k)].norm()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax <= pivot_eps * scale || pmax == 0.0 {
                return Err(Error::SingularMatrix { column: k, pivot: pmax });
            }
            if p != k {
                for j in k..=last_col {
                    let (a, c) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, c);
                }
                x.swap(k, p);
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last_row {
                let sik = self.slot(i, k);
                let l = self.data[sik] / pivot;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                self.data[sik] = C64::new(0.0, 0.0);
                for j in k + 1..=last_col {
                    let ukj = self.data[self.slot(k, j)];
                    let sij = self.slot(i, j);
                    self.data[sij] -= l * ukj;
                }
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            let last_col = (i + span).min(n - 1);
            let s: C64 = (i + 1..=last_col).map(|j| self.data[self.slot(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.data[self.slot(i, i)];
        }
        Ok(x)
    }
}
