//! Dense row-major matrices and the decompositions shared by the spectral
//! statistics and the Fréchet distance.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigen decomposition of a symmetric matrix: ascending eigenvalues and the
/// matching unit eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// `V f(Λ) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (self.vectors.row(i), self.vectors.row(j));
                let s: f64 = mapped.iter().zip(ri.iter().zip(rj)).map(|(m, (a, b))| a * m * b).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Symmetric eigendecomposition via faer, sorted ascending. Only the lower
/// triangle is read.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let m = Mat::from_fn(n, n, |i, j| a[(i, j)]);
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed on a {n}x{n} matrix: {e:?}")))?;
    let values: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    let u = eig.U();
    let vectors = Matrix {
        rows: n,
        cols: n,
        data: (0..n * n).map(|k| u[(k / n, k % n)]).collect(),
    };
    if !values.iter().all(|v| v.is_finite()) || !vectors.is_finite() {
        return Err(Error::Numerical(format!(
            "symmetric eigensolver produced non-finite output on a {n}x{n} matrix"
        )));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Singular values of a general matrix, largest first.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)]);
    m.singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed on a {}x{} matrix: {e:?}", a.rows(), a.cols())))
}

/// Eigenvalues only.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigen(a).map(|e| e.values)
}

/// Pairwise (cascade) summation; the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
