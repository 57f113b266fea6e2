//! Small helpers over faer's dense and sparse types.

use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{ColRef, Mat, MatRef};

pub type SparseMatrix = SparseColMat<usize, f64>;

/// Builds a CSC matrix from per-column `(row, value)` lists whose rows are
/// strictly increasing.
pub(crate) fn csc_from_columns(nrows: usize, columns: Vec<Vec<(usize, f64)>>) -> SparseMatrix {
    let ncols = columns.len();
    let nnz = columns.iter().map(Vec::len).sum();
    let mut col_ptr = Vec::with_capacity(ncols + 1);
    let mut row_idx = Vec::with_capacity(nnz);
    let mut val = Vec::with_capacity(nnz);
    col_ptr.push(0);
    for col in columns {
        for (r, v) in col {
            row_idx.push(r);
            val.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    let symbolic = SymbolicSparseColMat::new_checked(nrows, ncols, col_ptr, None, row_idx);
    SparseColMat::new(symbolic, val)
}

/// `y = K x` for a CSC matrix.
pub fn sparse_matvec(k: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(k.ncols(), x.len());
    let mut y = vec![0.0; k.nrows()];
    let k = k.as_ref();
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (&i, &v) in k.row_idx_of_col_raw(j).iter().zip(k.val_of_col(j)) {
            y[i] += v * xj;
        }
    }
    y
}

/// Dense copy of a sparse matrix, for small test problems.
pub fn sparse_to_dense(k: &SparseMatrix) -> Mat<f64> {
    let mut out = Mat::zeros(k.nrows(), k.ncols());
    let kr = k.as_ref();
    for j in 0..k.ncols() {
        for (&i, &v) in kr.row_idx_of_col_raw(j).iter().zip(kr.val_of_col(j)) {
            out[(i, j)] += v;
        }
    }
    out
}

pub fn matvec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    let y = a * ColRef::from_slice(x);
    y.iter().copied().collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}
