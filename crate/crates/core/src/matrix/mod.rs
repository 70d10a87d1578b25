//! Sparse and dense matrix primitives.

mod csr;
mod dense;
mod diag;
pub mod mtx;
pub mod spectral;

pub use csr::SparseMatrix;
pub(crate) use csr::check_len;
pub use dense::{determinant, DenseMatrix, LuFactor, PIVOT_TOL};
pub use diag::DiagonalMatrix;
pub use spectral::{norm2, spectral_radius_nonneg, MatVec, PowerOptions, SpectralEstimate};

use crate::error::{IcpError, Result};

/// Default bound on `n` for dense, certificate-scale computations.
pub const DEFAULT_SMALL_N: usize = 200;

/// Dense vectors are plain `Vec<f64>`.
pub type DenseVector = Vec<f64>;

/// Dense inverse of a sparse matrix, refused above `max_n`.
pub fn dense_inverse(a: &SparseMatrix, max_n: usize) -> Result<DenseMatrix> {
    if a.n() > max_n {
        return Err(IcpError::TooLarge {
            n: a.n(),
            limit: max_n,
            what: "dense inverse",
        });
    }
    a.to_dense().inverse()
}

pub(crate) fn norm2_vec(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf_vec(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
