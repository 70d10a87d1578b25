//! Relaxation modulus-based matrix splitting iterations for implicit
//! complementarity problems
//!
//! ```text
//! find z:  Az + q ≥ 0,  z − ζ(z) ≥ 0,  (z − ζ(z))ᵀ(Az + q) = 0
//! ```
//!
//! with a sparse `A` and an affine map `ζ(z) = Cz + d`.
//!
//! ```
//! use icp_core::{solve_icp, IcpProblem, SolveStatus, SolverConfig, SparseMatrix};
//!
//! let a = SparseMatrix::from_triplets(2, [(0, 0, 4.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 4.0)])?;
//! let p = IcpProblem::lcp(a, vec![-3.0, -3.0])?;
//! let report = solve_icp(&p, &SolverConfig::new(2), None)?;
//! assert_eq!(report.status, SolveStatus::Converged);
//! assert!((report.z[0] - 1.0).abs() < 1e-8);
//! # Ok::<(), icp_core::IcpError>(())
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod convergence;
mod error;
pub mod generators;
pub mod matrix;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod splitting;

pub use bundle::ProblemBundle;
pub use convergence::Certificate;
pub use error::{IcpError, Result};
pub use matrix::{DenseMatrix, DenseVector, DiagonalMatrix, SparseMatrix};
pub use problem::{IcpProblem, ImplicitMap, Residual};
pub use solver::{solve_icp, InnerFailure, SolveReport, SolveStatus, SolverConfig};
pub use splitting::{build_splitting, system_matrix, SplitPair, SplittingScheme};
