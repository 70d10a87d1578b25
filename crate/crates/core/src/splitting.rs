//! Matrix splittings `A = M − N` and the relaxed system matrix
//! `Ω₂ + MΩ₁ + φΩ₁` of the modulus fixed-point equation.

use std::fmt;
use std::str::FromStr;

use crate::error::{IcpError, Result};
use crate::matrix::{DiagonalMatrix, SparseMatrix};

/// Which splitting drives the x-update.
///
/// All of `Sor`, `GaussSeidel` and `Jacobi` are evaluated through the AOR
/// formula with `(α, α)`, `(1, 1)` and `(1, 0)` respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplittingScheme {
    Aor { alpha: f64, beta: f64 },
    Sor { alpha: f64 },
    GaussSeidel,
    Jacobi,
    /// `M = A`, `N = 0`.
    FullM,
}

impl SplittingScheme {
    /// `(α, β)` for members of the AOR family, `None` for `FullM`.
    pub fn aor_parameters(&self) -> Option<(f64, f64)> {
        match *self {
            SplittingScheme::Aor { alpha, beta } => Some((alpha, beta)),
            SplittingScheme::Sor { alpha } => Some((alpha, alpha)),
            SplittingScheme::GaussSeidel => Some((1.0, 1.0)),
            SplittingScheme::Jacobi => Some((1.0, 0.0)),
            SplittingScheme::FullM => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((alpha, beta)) = self.aor_parameters() {
            if !(alpha > 0.0 && alpha.is_finite()) || !beta.is_finite() {
                return Err(IcpError::InvalidArgument(format!(
                    "AOR parameters must satisfy alpha > 0, got ({alpha}, {beta})"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SplittingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplittingScheme::Aor { alpha, beta } => write!(f, "aor:{alpha},{beta}"),
            SplittingScheme::Sor { alpha } => write!(f, "sor:{alpha}"),
            SplittingScheme::GaussSeidel => f.write_str("gs"),
            SplittingScheme::Jacobi => f.write_str("jacobi"),
            SplittingScheme::FullM => f.write_str("fullm"),
        }
    }
}

impl FromStr for SplittingScheme {
    type Err = IcpError;

    /// Grammar: `fullm | jacobi | gs | sor:<alpha> | aor:<alpha>,<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || IcpError::Parse(format!("unknown scheme {s:?}; expected fullm | jacobi | gs | sor:<alpha> | aor:<alpha>,<beta>"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let scheme = match s {
            "fullm" => SplittingScheme::FullM,
            "jacobi" => SplittingScheme::Jacobi,
            "gs" => SplittingScheme::GaussSeidel,
            _ => {
                if let Some(rest) = s.strip_prefix("sor:") {
                    SplittingScheme::Sor { alpha: num(rest)? }
                } else if let Some(rest) = s.strip_prefix("aor:") {
                    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                    SplittingScheme::Aor {
                        alpha: num(a)?,
                        beta: num(b)?,
                    }
                } else {
                    return Err(bad());
                }
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// `A = M − N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub m: SparseMatrix,
    pub n: SparseMatrix,
}

/// Builds `M` and `N` for the scheme. For the AOR family, with
/// `A = D − L − U` (`L`, `U` holding negated off-diagonal entries):
/// `M = (D − βL)/α`, `N = ((1 − α)D + (α − β)L + αU)/α`.
pub fn build_splitting(a: &SparseMatrix, scheme: SplittingScheme) -> Result<SplitPair> {
    scheme.validate()?;
    let Some((alpha, beta)) = scheme.aor_parameters() else {
        return Ok(SplitPair {
            m: a.clone(),
            n: SparseMatrix::zeros(a.n()),
        });
    };
    let (d, l, u) = a.extract_dlu();
    if let Some(i) = d.values().iter().position(|&v| v == 0.0) {
        return Err(IcpError::Splitting(format!(
            "AOR-family splitting needs a nonzero diagonal; a[{i},{i}] = 0"
        )));
    }
    let inv = 1.0 / alpha;
    let d_sp = d.to_sparse();
    let m = d_sp.linear_combination(inv, &l, -beta * inv)?;
    let n = d_sp
        .linear_combination((1.0 - alpha) * inv, &l, (alpha - beta) * inv)?
        .linear_combination(1.0, &u, alpha * inv)?;
    Ok(SplitPair { m, n })
}

/// `Ω₂ + MΩ₁ + φΩ₁` (right multiplication by `Ω₁`).
pub fn system_matrix(
    m: &SparseMatrix,
    omega1: &DiagonalMatrix,
    omega2: &DiagonalMatrix,
    phi: &DiagonalMatrix,
) -> Result<SparseMatrix> {
    let n = m.n();
    for d in [omega1, omega2, phi] {
        crate::matrix::check_len(n, d.n())?;
    }
    let diag: Vec<f64> = (0..n).map(|i| omega2[i] + phi[i] * omega1[i]).collect();
    m.mul_diag_right(omega1).add_diagonal(&DiagonalMatrix::new(diag))
}

pub fn is_lower_triangular(m: &SparseMatrix) -> bool {
    m.is_lower_triangular()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> SparseMatrix {
        SparseMatrix::from_triplets(2, [(0, 0, 4.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 4.0)]).unwrap()
    }

    fn dense(rows: &[&[f64]]) -> SparseMatrix {
        SparseMatrix::from_triplets(
            rows.len(),
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
        .unwrap()
    }

    #[test]
    fn gauss_seidel_split() {
        let sp = build_splitting(&a2(), SplittingScheme::GaussSeidel).unwrap();
        assert_eq!(sp.m, dense(&[&[4.0, 0.0], &[-1.0, 4.0]]));
        assert_eq!(sp.n, dense(&[&[0.0, 1.0], &[0.0, 0.0]]));
    }

    #[test]
    fn aor_half_split() {
        let sp = build_splitting(&a2(), SplittingScheme::Aor { alpha: 0.5, beta: 0.5 }).unwrap();
        assert_eq!(sp.m, dense(&[&[8.0, 0.0], &[-1.0, 8.0]]));
        assert_eq!(sp.n, dense(&[&[4.0, 1.0], &[0.0, 4.0]]));
    }

    #[test]
    fn jacobi_split() {
        let sp = build_splitting(&a2(), SplittingScheme::Jacobi).unwrap();
        assert_eq!(sp.m, dense(&[&[4.0, 0.0], &[0.0, 4.0]]));
        assert_eq!(sp.n, dense(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn fullm_split() {
        let sp = build_splitting(&a2(), SplittingScheme::FullM).unwrap();
        assert_eq!(sp.m, a2());
        assert_eq!(sp.n.nnz(), 0);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let a = dense(&[&[0.0, 1.0], &[1.0, 2.0]]);
        assert!(matches!(build_splitting(&a, SplittingScheme::GaussSeidel), Err(IcpError::Splitting(_))));
        assert!(build_splitting(&a, SplittingScheme::FullM).is_ok());
        assert!(build_splitting(&a2(), SplittingScheme::Sor { alpha: 0.0 }).is_err());
    }

    #[test]
    fn system_matrix_examples() {
        let m = dense(&[&[4.0, 0.0], &[-1.0, 4.0]]);
        let id = DiagonalMatrix::identity(2);
        let s = system_matrix(&m, &id, &id, &DiagonalMatrix::scalar(2, 0.1)).unwrap();
        assert_eq!(s.nnz(), 3);
        assert!((s.get(0, 0) - 5.1).abs() < 1e-15);
        assert!((s.get(1, 1) - 5.1).abs() < 1e-15);
        assert_eq!(s.get(1, 0), -1.0);

        let one = DiagonalMatrix::identity(1);
        let s1 = system_matrix(&SparseMatrix::from_diagonal(&[2.0]), &one, &one, &DiagonalMatrix::scalar(1, 0.1)).unwrap();
        assert!((s1.get(0, 0) - 3.1).abs() < 1e-15);

        let s2 = system_matrix(
            &SparseMatrix::identity(2),
            &DiagonalMatrix::new(vec![2.0, 3.0]),
            &id,
            &DiagonalMatrix::scalar(2, 0.0),
        )
        .unwrap();
        assert_eq!(s2, SparseMatrix::from_diagonal(&[3.0, 4.0]));
    }

    #[test]
    fn lower_triangular_detection() {
        assert!(is_lower_triangular(&dense(&[&[4.0, 0.0], &[-1.0, 4.0]])));
        assert!(!is_lower_triangular(&a2()));
        assert!(is_lower_triangular(&SparseMatrix::identity(2)));
    }

    #[test]
    fn scheme_grammar() {
        assert_eq!("gs".parse::<SplittingScheme>().unwrap(), SplittingScheme::GaussSeidel);
        assert_eq!("jacobi".parse::<SplittingScheme>().unwrap(), SplittingScheme::Jacobi);
        assert_eq!("fullm".parse::<SplittingScheme>().unwrap(), SplittingScheme::FullM);
        assert_eq!("sor:1.2".parse::<SplittingScheme>().unwrap(), SplittingScheme::Sor { alpha: 1.2 });
        assert_eq!(
            "aor:0.9,0.5".parse::<SplittingScheme>().unwrap(),
            SplittingScheme::Aor { alpha: 0.9, beta: 0.5 }
        );
        for bad in ["", "sor", "sor:x", "aor:1", "aor:-1,1", "newton"] {
            assert!(bad.parse::<SplittingScheme>().is_err(), "{bad}");
        }
        for s in ["gs", "jacobi", "fullm", "sor:1.2", "aor:0.9,0.5"] {
            assert_eq!(s.parse::<SplittingScheme>().unwrap().to_string(), s);
        }
    }
}
