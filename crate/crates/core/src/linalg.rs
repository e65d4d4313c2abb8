//! Dense linear-algebra helpers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance on `max|M_ij - M_ji|` used to accept a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest absolute deviation from symmetry, `max |M_ij - M_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Eigendecomposition of a symmetric matrix, `M = Q diag(values) Q^T`.
///
/// Eigenvalues are sorted in descending order. Each eigenvector (column of
/// `vectors`) is oriented so that its first component whose magnitude is not
/// negligible is positive, which makes the output deterministic.
#[derive(Debug, Clone)]
pub struct SymmetricEig {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eig(m: &DMatrix<f64>) -> Result<SymmetricEig> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * max_abs(m) {
        return Err(Error::AsymmetricMatrix { asymmetry: asym });
    }
    let n = m.nrows();
    // symmetrize exactly so the solver sees a symmetric input
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        }
        // rounding noise below this level is not a meaningful sign
        let threshold = 1e-12;
        if let Some(first) = v.iter().find(|c| c.abs() > threshold) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(col, &v);
    }
    Ok(SymmetricEig { values, vectors })
}
