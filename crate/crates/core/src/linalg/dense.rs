use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math::abs;
use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_cols,
                got: data.len(),
            });
        }
        Ok(DenseMatrix {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * N);
        for r in rows {
            data.extend_from_slice(r);
        }
        DenseMatrix {
            n_rows: rows.len(),
            n_cols: N,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        crate::math::norm(&self.data)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Fails with [`Error::Singular`] when a pivot falls below `rel_tol * max|A_ij|`.
    pub fn new(m: &DenseMatrix, rel_tol: f64) -> Result<Self> {
        if m.n_rows() != m.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: m.n_rows(),
                got: m.n_cols(),
            });
        }
        let n = m.n_rows();
        let threshold = rel_tol * m.max_abs();
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = abs(lu[k * n + k]);
            for i in k + 1..n {
                let v = abs(lu[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > threshold) || best == 0.0 {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(LuFactor { n, lu, perm })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y = [0.0; 64];
        let mut heap;
        let tmp: &mut [f64] = if n <= 64 {
            &mut y[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap
        };
        for i in 0..n {
            tmp[i] = b[self.perm[i]];
        }
        for i in 0..n {
            let mut s = tmp[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * tmp[j];
            }
            tmp[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = tmp[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * tmp[j];
            }
            tmp[i] = s / self.lu[i * n + i];
        }
        b[..n].copy_from_slice(tmp);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// A small square block together with its LU factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock {
    pub matrix: DenseMatrix,
    pub lu: LuFactor,
}

impl DenseBlock {
    pub fn new(matrix: DenseMatrix, rel_tol: f64) -> Result<Self> {
        let lu = LuFactor::new(&matrix, rel_tol)?;
        Ok(DenseBlock { matrix, lu })
    }
}

/// Dense LU solve of `A x = b`.
pub fn direct_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: a.n_rows(),
            got: b.len(),
        });
    }
    let lu = LuFactor::new(a, f64::EPSILON * 1e-4)?;
    Ok(lu.solve(b))
}
