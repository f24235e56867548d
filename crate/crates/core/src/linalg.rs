//! Dense linear-algebra helpers over nalgebra.

use crate::error::{LcError, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

pub fn lambda_max(m: &DMatrix<f64>) -> f64 {
    *sym_eigen(m).0.last().unwrap()
}

pub fn lambda_min(m: &DMatrix<f64>) -> f64 {
    sym_eigen(m).0[0]
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    sym_eigen(m).0.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// f(M) = U f(Λ) Uᵀ for symmetric M.
pub fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&v| f(v))));
    &vecs * d * vecs.transpose()
}

pub fn sym_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, _) = sym_eigen(m);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    if vals[0] <= 1e-12 * scale {
        return Err(LcError::DegenerateSupport);
    }
    Ok(sym_apply(m, |v| 1.0 / v.sqrt()))
}

pub fn is_psd(m: &DMatrix<f64>, tol: f64) -> bool {
    lambda_min(m) >= -tol
}

pub fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Orthonormal basis of {x ∈ ℝ^{n+1} : Σ x = 0} as columns (Helmert).
pub fn helmert(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n + 1, n, |i, j| {
        let k = (j + 1) as f64;
        let s = 1.0 / (k * (k + 1.0)).sqrt();
        if i <= j {
            s
        } else if i == j + 1 {
            -k * s
        } else {
            0.0
        }
    })
}
