use std::collections::BTreeMap;

use crate::error::{IcpError, Result};
use crate::matrix::{DenseMatrix, DiagonalMatrix};

/// Square real matrix in compressed sparse row form.
///
/// The representation is canonical: column indices are strictly increasing
/// within each row and no stored value is exactly zero. Every constructor
/// goes through [`SparseMatrix::from_triplets`] or preserves these rules, so
/// structural comparisons (`==`) are entrywise comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed and entries that sum to exactly zero are dropped.
    pub fn from_triplets<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (row, col, value) in entries {
            if row >= n || col >= n {
                return Err(IcpError::IndexOutOfRange { row, col, n });
            }
            if !value.is_finite() {
                return Err(IcpError::InvalidArgument(format!(
                    "non-finite value {value} at ({row}, {col})"
                )));
            }
            *rows[row].entry(col).or_insert(0.0) += value;
        }
        Ok(Self::from_rows(n, rows))
    }

    fn from_rows(n: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for row in rows {
            for (col, v) in row {
                if v != 0.0 {
                    col_indices.push(col);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        SparseMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Builds a matrix row by row from an already sorted entry generator.
    /// `f(i)` must yield strictly increasing columns; zeros are filtered.
    fn from_sorted_rows<F, It>(n: usize, mut f: F) -> Self
    where
        F: FnMut(usize) -> It,
        It: IntoIterator<Item = (usize, f64)>,
    {
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..n {
            for (j, v) in f(i) {
                if v != 0.0 {
                    debug_assert!(col_indices.len() == row_offsets[i] || *col_indices.last().unwrap() < j);
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        SparseMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_sorted_rows(d.len(), |i| std::iter::once((i, d[i])))
    }

    /// Converts a dense matrix, dropping exact zeros.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let n = a.n();
        Self::from_sorted_rows(n, |i| a.row(i).iter().copied().enumerate().collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without dimension checks beyond debug assertions.
    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                s += self.values[k] * x[self.col_indices[k]];
            }
            *yi = s;
        }
    }

    /// Applies `f` to every stored value; results equal to zero are dropped.
    pub fn map_values<F: Fn(usize, usize, f64) -> f64>(&self, f: F) -> Self {
        Self::from_sorted_rows(self.n, |i| self.row(i).map(|(j, v)| (j, f(i, j, v))).collect::<Vec<_>>())
    }

    /// Entrywise absolute value `|A|`.
    pub fn abs(&self) -> Self {
        self.map_values(|_, _, v| v.abs())
    }

    /// Comparison matrix `<A>`: `|a_ii|` on the diagonal, `-|a_ij|` elsewhere.
    pub fn comparison(&self) -> Self {
        self.map_values(|i, j, v| if i == j { v.abs() } else { -v.abs() })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_values(|_, _, v| s * v)
    }

    /// Right multiplication by a diagonal matrix: column `j` scaled by `d[j]`.
    pub fn mul_diag_right(&self, d: &DiagonalMatrix) -> Self {
        assert_eq!(d.n(), self.n, "diagonal dimension mismatch");
        self.map_values(|_, j, v| v * d[j])
    }

    /// Left multiplication by a diagonal matrix: row `i` scaled by `d[i]`.
    pub fn mul_diag_left(&self, d: &DiagonalMatrix) -> Self {
        assert_eq!(d.n(), self.n, "diagonal dimension mismatch");
        self.map_values(|i, _, v| d[i] * v)
    }

    /// `a·self + b·other`, merging sparsity patterns.
    pub fn linear_combination(&self, a: f64, other: &SparseMatrix, b: f64) -> Result<Self> {
        check_len(self.n, other.n)?;
        Ok(Self::from_sorted_rows(self.n, |i| {
            let mut out = Vec::new();
            let mut lhs = self.row(i).peekable();
            let mut rhs = other.row(i).peekable();
            loop {
                match (lhs.peek().copied(), rhs.peek().copied()) {
                    (Some((j1, v1)), Some((j2, v2))) => {
                        if j1 < j2 {
                            out.push((j1, a * v1));
                            lhs.next();
                        } else if j2 < j1 {
                            out.push((j2, b * v2));
                            rhs.next();
                        } else {
                            out.push((j1, a * v1 + b * v2));
                            lhs.next();
                            rhs.next();
                        }
                    }
                    (Some((j, v)), None) => {
                        out.push((j, a * v));
                        lhs.next();
                    }
                    (None, Some((j, v))) => {
                        out.push((j, b * v));
                        rhs.next();
                    }
                    (None, None) => break,
                }
            }
            out
        }))
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    /// `A + diag(d)`.
    pub fn add_diagonal(&self, d: &DiagonalMatrix) -> Result<Self> {
        self.add(&d.to_sparse())
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for (i, j, v) in self.triplets() {
            rows[j].push((i, v));
        }
        Self::from_sorted_rows(self.n, |i| std::mem::take(&mut rows[i]))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// True iff no entry lies strictly above the diagonal.
    pub fn is_lower_triangular(&self) -> bool {
        self.triplets().all(|(i, j, _)| j <= i)
    }

    /// Symmetry scan with relative tolerance `tol·‖A‖_∞`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let bound = tol * self.norm_inf();
        let t = self.transpose();
        if t.col_indices != self.col_indices || t.row_offsets != self.row_offsets {
            return false;
        }
        t.values
            .iter()
            .zip(&self.values)
            .all(|(a, b)| (a - b).abs() <= bound)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Splits `A = D - L - U`. `L` and `U` hold the *negated* strictly lower
    /// and strictly upper entries of `A`.
    pub fn extract_dlu(&self) -> (DiagonalMatrix, SparseMatrix, SparseMatrix) {
        let d = DiagonalMatrix::new(self.diagonal());
        let l = Self::from_sorted_rows(self.n, |i| {
            self.row(i).filter(|&(j, _)| j < i).map(|(j, v)| (j, -v)).collect::<Vec<_>>()
        });
        let u = Self::from_sorted_rows(self.n, |i| {
            self.row(i).filter(|&(j, _)| j > i).map(|(j, v)| (j, -v)).collect::<Vec<_>>()
        });
        (d, l, u)
    }

    /// Forward substitution for a lower-triangular matrix.
    pub fn lower_triangular_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        if !self.is_lower_triangular() {
            return Err(IcpError::Contract("matrix is not lower triangular".into()));
        }
        let mut x = vec![0.0; self.n];
        self.forward_substitute(b, &mut x)?;
        Ok(x)
    }

    pub(crate) fn forward_substitute(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        for i in 0..self.n {
            let mut s = b[i];
            let mut diag = 0.0;
            for (j, v) in self.row(i) {
                if j < i {
                    s -= v * x[j];
                } else if j == i {
                    diag = v;
                }
            }
            if diag == 0.0 {
                return Err(IcpError::Singular(format!("zero diagonal entry in row {i}")));
            }
            x[i] = s / diag;
        }
        Ok(())
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(IcpError::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> SparseMatrix {
        SparseMatrix::from_triplets(2, [(0, 0, 4.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 4.0)]).unwrap()
    }

    fn dense(n: usize, rows: &[&[f64]]) -> SparseMatrix {
        SparseMatrix::from_triplets(
            n,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
        .unwrap()
    }

    #[test]
    fn triplets_single_entry() {
        let m = SparseMatrix::from_triplets(1, [(0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.row_offsets(), &[0, 1]);
    }

    #[test]
    fn triplets_cancellation_drops_entry() {
        let m = SparseMatrix::from_triplets(2, [(0, 0, 1.0), (0, 0, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m, SparseMatrix::zeros(2));
    }

    #[test]
    fn triplets_out_of_range() {
        let err = SparseMatrix::from_triplets(2, [(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, IcpError::IndexOutOfRange { .. }));
    }

    #[test]
    fn triplets_sorted_and_summed() {
        let m = SparseMatrix::from_triplets(2, [(1, 1, 1.0), (0, 1, 2.0), (0, 0, 3.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(m.col_indices(), &[0, 1, 1]);
        assert_eq!(m.values(), &[3.0, 3.0, 1.0]);
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(a2().matvec(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        assert_eq!(SparseMatrix::identity(3).matvec(&[1.0, -2.0, 5.0]).unwrap(), vec![1.0, -2.0, 5.0]);
        assert_eq!(a2().matvec(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(a2().matvec(&[1.0]), Err(IcpError::DimensionMismatch { .. })));
    }

    #[test]
    fn dlu_sign_convention() {
        let (d, l, u) = a2().extract_dlu();
        assert_eq!(d.values(), &[4.0, 4.0]);
        assert_eq!(l, dense(2, &[&[0.0, 0.0], &[1.0, 0.0]]));
        assert_eq!(u, dense(2, &[&[0.0, 1.0], &[0.0, 0.0]]));

        let (d, l, u) = SparseMatrix::identity(2).extract_dlu();
        assert_eq!(d.values(), &[1.0, 1.0]);
        assert_eq!(l.nnz() + u.nnz(), 0);

        let (d, l, u) = dense(2, &[&[2.0, 3.0], &[0.0, 2.0]]).extract_dlu();
        assert_eq!(d.values(), &[2.0, 2.0]);
        assert_eq!(l.nnz(), 0);
        assert_eq!(u, dense(2, &[&[0.0, -3.0], &[0.0, 0.0]]));
    }

    #[test]
    fn comparison_and_abs() {
        assert_eq!(a2().comparison(), a2());
        assert_eq!(
            dense(2, &[&[2.0, 1.0], &[-3.0, 5.0]]).comparison(),
            dense(2, &[&[2.0, -1.0], &[-3.0, 5.0]])
        );
        assert_eq!(SparseMatrix::identity(3).comparison(), SparseMatrix::identity(3));
        assert_eq!(
            dense(2, &[&[0.0, -1.0], &[2.0, 0.0]]).abs(),
            dense(2, &[&[0.0, 1.0], &[2.0, 0.0]])
        );
        assert_eq!(a2().abs(), dense(2, &[&[4.0, 1.0], &[1.0, 4.0]]));
        assert_eq!(SparseMatrix::zeros(3).abs(), SparseMatrix::zeros(3));
    }

    #[test]
    fn lower_solve_examples() {
        let t = dense(2, &[&[2.0, 0.0], &[-1.0, 3.0]]);
        assert_eq!(t.lower_triangular_solve(&[2.0, 2.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(SparseMatrix::identity(2).lower_triangular_solve(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        let d = SparseMatrix::from_diagonal(&[4.0, 4.0]);
        assert_eq!(d.lower_triangular_solve(&[8.0, 4.0]).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn lower_solve_zero_diagonal() {
        let t = dense(2, &[&[1.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(t.lower_triangular_solve(&[1.0, 1.0]), Err(IcpError::Singular(_))));
        assert!(matches!(a2().lower_triangular_solve(&[1.0, 1.0]), Err(IcpError::Contract(_))));
    }

    #[test]
    fn right_diag_scales_columns() {
        let d = DiagonalMatrix::new(vec![2.0, 3.0]);
        let m = a2().mul_diag_right(&d);
        assert_eq!(m, dense(2, &[&[8.0, -3.0], &[-2.0, 12.0]]));
    }

    #[test]
    fn symmetry_and_triangularity() {
        assert!(a2().is_symmetric(1e-14));
        assert!(!dense(2, &[&[2.0, 3.0], &[0.0, 2.0]]).is_symmetric(1e-14));
        assert!(dense(2, &[&[4.0, 0.0], &[-1.0, 4.0]]).is_lower_triangular());
        assert!(!a2().is_lower_triangular());
        assert!(SparseMatrix::identity(2).is_lower_triangular());
    }
}
