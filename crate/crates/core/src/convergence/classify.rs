//! Matrix classes: sdd, Z-, M-, H₊- and P-matrices, H-splittings.

use serde::Serialize;

use crate::error::{IcpError, Result};
use crate::matrix::{determinant, DenseMatrix, SparseMatrix};

/// Entries of an inverse above `−M_INVERSE_TOL` count as nonnegative.
pub const M_INVERSE_TOL: f64 = 1e-12;
/// Principal minors must exceed this to count as positive.
pub const MINOR_TOL: f64 = 1e-12;
/// Largest dimension accepted by [`is_p_matrix`].
pub const P_MATRIX_MAX_N: usize = 12;

/// `|a_ii| > Σ_{j≠i} |a_ij|` for every row.
pub fn is_sdd(a: &SparseMatrix) -> bool {
    (0..a.n()).all(|i| {
        let (mut diag, mut off) = (0.0, 0.0);
        for (j, v) in a.row(i) {
            if i == j {
                diag = v.abs();
            } else {
                off += v.abs();
            }
        }
        diag > off
    })
}

/// All off-diagonal entries nonpositive.
pub fn is_z_matrix(a: &SparseMatrix) -> bool {
    a.triplets().all(|(i, j, v)| i == j || v <= 0.0)
}

/// Z-matrix with an entrywise nonnegative inverse. Singular input is not an
/// M-matrix. Cost is a dense inversion.
pub fn is_m_matrix(a: &SparseMatrix) -> bool {
    is_z_matrix(a) && dense_is_m_matrix(&a.to_dense())
}

pub(crate) fn dense_is_z_matrix(a: &DenseMatrix) -> bool {
    let n = a.n();
    (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)] <= 0.0))
}

pub(crate) fn dense_is_m_matrix(a: &DenseMatrix) -> bool {
    if !dense_is_z_matrix(a) {
        return false;
    }
    match a.inverse() {
        Ok(inv) => inv.data().iter().all(|&v| v >= -M_INVERSE_TOL),
        Err(_) => false,
    }
}

/// Comparison matrix of a dense matrix.
pub(crate) fn dense_comparison(a: &DenseMatrix) -> DenseMatrix {
    let n = a.n();
    let mut c = a.abs().scale(-1.0);
    for i in 0..n {
        c[(i, i)] = a[(i, i)].abs();
    }
    c
}

/// `⟨A⟩` is an M-matrix and every diagonal entry is positive.
pub fn is_h_plus_matrix(a: &SparseMatrix) -> bool {
    a.diagonal().iter().all(|&d| d > 0.0) && is_m_matrix(&a.comparison())
}

/// Every principal minor exceeds [`MINOR_TOL`]. Enumerates all `2ⁿ − 1`
/// minors, so `n` is capped at [`P_MATRIX_MAX_N`].
pub fn is_p_matrix(a: &SparseMatrix) -> Result<bool> {
    let n = a.n();
    if n > P_MATRIX_MAX_N {
        return Err(IcpError::TooLarge {
            n,
            limit: P_MATRIX_MAX_N,
            what: "principal minor enumeration",
        });
    }
    let dense = a.to_dense();
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1 << n) {
        idx.clear();
        idx.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        if determinant(&dense.principal_submatrix(&idx)) <= MINOR_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `⟨M⟩ − |N|` is an M-matrix.
pub fn is_h_splitting(m: &SparseMatrix, n: &SparseMatrix) -> bool {
    match m.comparison().sub(&n.abs()) {
        Ok(d) => is_m_matrix(&d),
        Err(_) => false,
    }
}

/// Classifier summary printed by the CLI after generating a problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixClasses {
    pub n: usize,
    pub nnz: usize,
    pub symmetric: bool,
    pub sdd: bool,
    pub z_matrix: bool,
    /// `None` when `n` exceeds the dense limit.
    pub m_matrix: Option<bool>,
    pub h_plus: Option<bool>,
    /// `None` when `n` exceeds [`P_MATRIX_MAX_N`].
    pub p_matrix: Option<bool>,
}

/// Runs every classifier that is affordable for `a`; dense checks are
/// skipped above `dense_max_n`.
pub fn classify(a: &SparseMatrix, dense_max_n: usize) -> MatrixClasses {
    let small = a.n() <= dense_max_n;
    MatrixClasses {
        n: a.n(),
        nnz: a.nnz(),
        symmetric: a.is_symmetric(0.0),
        sdd: is_sdd(a),
        z_matrix: is_z_matrix(a),
        m_matrix: small.then(|| is_m_matrix(a)),
        h_plus: small.then(|| is_h_plus_matrix(a)),
        p_matrix: is_p_matrix(a).ok(),
    }
}
