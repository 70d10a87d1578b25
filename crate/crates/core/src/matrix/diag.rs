use std::ops::Index;

use crate::error::{IcpError, Result};
use crate::matrix::SparseMatrix;

/// Diagonal matrix stored as its diagonal entries.
///
/// Used for the positive parameter matrices `Ω₁`, `Ω₂` and for the relaxation
/// diagonal `φ`, whose sign is unrestricted.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMatrix(Vec<f64>);

impl DiagonalMatrix {
    pub fn new(values: Vec<f64>) -> Self {
        DiagonalMatrix(values)
    }

    pub fn identity(n: usize) -> Self {
        DiagonalMatrix(vec![1.0; n])
    }

    /// `s·I`.
    pub fn scalar(n: usize, s: f64) -> Self {
        DiagonalMatrix(vec![s; n])
    }

    /// Checked constructor for `Ω₁`/`Ω₂`: every entry finite and strictly positive.
    pub fn positive(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(IcpError::InvalidArgument(format!(
                "positive diagonal required, found entry {v}"
            )));
        }
        Ok(DiagonalMatrix(values))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }

    /// Entrywise product of two diagonals.
    pub fn mul(&self, other: &DiagonalMatrix) -> DiagonalMatrix {
        DiagonalMatrix(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_diagonal(&self.0)
    }
}

impl Index<usize> for DiagonalMatrix {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for DiagonalMatrix {
    fn from(v: Vec<f64>) -> Self {
        DiagonalMatrix(v)
    }
}
