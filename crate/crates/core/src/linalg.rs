//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{OuError, Result};

pub type Mat = DMatrix<f64>;

/// Builds a matrix from row-major nested rows.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(OuError::DimensionMismatch("ragged rows".into()));
    }
    Ok(DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]))
}

/// Row-major nested rows, the exchange format of every file.
pub fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest singular value.
pub fn norm2(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Matrix exponential (Padé scaling and squaring from `nalgebra`).
pub fn expm(m: &Mat) -> Result<Mat> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(OuError::ExpmFailure);
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    let e = m.exp();
    if e.iter().all(|x| x.is_finite()) {
        Ok(e)
    } else {
        Err(OuError::ExpmFailure)
    }
}

/// Eigen-decomposition of the symmetric part of `m`, eigenvalues ascending.
pub fn sym_eig(m: &Mat) -> (DVector<f64>, Mat) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Mat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Numerical rank: singular values above `rank_tol * s_max`.
pub fn rank(m: &Mat, rank_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.singular_values();
    let smax = s.max();
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rank_tol * smax).count()
}

/// Symmetric PSD square root; negative rounding noise is clipped to zero.
pub fn psd_sqrt(m: &Mat) -> Mat {
    let (vals, vecs) = sym_eig(m);
    let root = DVector::from_iterator(vals.len(), vals.iter().map(|&v| v.max(0.0).sqrt()));
    &vecs * Mat::from_diagonal(&root) * vecs.transpose()
}

/// Orthonormal basis of the range of a symmetric PSD matrix together with the
/// retained eigenvalues (descending order).
pub fn psd_range(m: &Mat, rank_tol: f64) -> (DVector<f64>, Mat) {
    let (vals, vecs) = sym_eig(m);
    let n = vals.len();
    let vmax = vals.iter().fold(0.0_f64, |a, &v| a.max(v));
    let mut keep: Vec<usize> = (0..n).filter(|&i| vmax > 0.0 && vals[i] > rank_tol * vmax).collect();
    // descending eigenvalue, ties keep the eigensolver's order
    keep.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let values = DVector::from_iterator(keep.len(), keep.iter().map(|&i| vals[i]));
    let mut basis = Mat::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        basis.set_column(k, &vecs.column(i));
    }
    (values, basis)
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_sym_eig(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    sym_eig(m).0[0]
}
