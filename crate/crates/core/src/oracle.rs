//! Brute-force solver for small affine problems by active-set enumeration.
//!
//! For every subset `S` of indices the linear system
//! `(Az + q)_i = 0` for `i ∈ S`, `((I − C)z − d)_i = 0` for `i ∉ S`
//! is solved densely and the candidate kept when both inequality systems
//! hold. Subsets are visited in increasing bitmask order (bit `i` set means
//! `i ∈ S`), which fixes the output order.

use crate::error::{IcpError, Result};
use crate::matrix::{norm_inf_vec, DenseMatrix, LuFactor};
use crate::problem::IcpProblem;

/// Largest dimension the enumeration accepts.
pub const ORACLE_MAX_N: usize = 12;
/// Candidates closer than this in the ∞-norm are merged.
pub const DEDUP_TOL: f64 = 1e-8;
/// Feasibility tolerance used by [`oracle_unique_solution`].
pub const ORACLE_TOL: f64 = 1e-9;

/// Solutions together with the subsets whose systems were singular.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub solutions: Vec<Vec<f64>>,
    /// Bitmasks of skipped subsets.
    pub singular_subsets: Vec<u32>,
}

/// All distinct solutions, with feasibility checked to `−tol`.
pub fn enumerate_icp(p: &IcpProblem, tol: f64) -> Result<Vec<Vec<f64>>> {
    Ok(enumerate_icp_detailed(p, tol)?.solutions)
}

pub fn enumerate_icp_detailed(p: &IcpProblem, tol: f64) -> Result<Enumeration> {
    let n = p.n();
    if n > ORACLE_MAX_N {
        return Err(IcpError::TooLarge {
            n,
            limit: ORACLE_MAX_N,
            what: "active-set enumeration",
        });
    }
    let a = p.a().to_dense();
    let c = p.zeta().c().to_dense();
    let d = p.zeta().d();
    let q = p.q();

    let mut out = Enumeration {
        solutions: Vec::new(),
        singular_subsets: Vec::new(),
    };
    let mut sys = DenseMatrix::zeros(n);
    let mut rhs = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for i in 0..n {
            if mask & (1 << i) != 0 {
                for j in 0..n {
                    sys[(i, j)] = a[(i, j)];
                }
                rhs[i] = -q[i];
            } else {
                for j in 0..n {
                    sys[(i, j)] = if i == j { 1.0 } else { 0.0 } - c[(i, j)];
                }
                rhs[i] = d[i];
            }
        }
        let Ok(lu) = LuFactor::new(&sys) else {
            out.singular_subsets.push(mask);
            continue;
        };
        let z = lu.solve(&rhs);
        if z.iter().any(|v| !v.is_finite()) {
            out.singular_subsets.push(mask);
            continue;
        }
        let (w, s) = p.complementarity_pair(&z)?;
        if w.iter().chain(&s).all(|&v| v >= -tol) && !out.solutions.iter().any(|x| distance(x, &z) < DEDUP_TOL) {
            out.solutions.push(z);
        }
    }
    Ok(out)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm_inf_vec(&diff)
}

/// The unique solution.
///
/// Uniqueness is only accepted when exactly one solution is found and every
/// active-set system was nonsingular; a singular system may hide a whole
/// affine family of solutions (as for `A = [[0,1],[1,0]]`, `q = 0`).
pub fn oracle_unique_solution(p: &IcpProblem) -> Result<Vec<f64>> {
    let mut e = enumerate_icp_detailed(p, ORACLE_TOL)?;
    if e.solutions.len() != 1 || !e.singular_subsets.is_empty() {
        return Err(IcpError::NotUnique {
            found: e.solutions.len(),
            singular: e.singular_subsets.len(),
        });
    }
    Ok(e.solutions.pop().expect("one solution"))
}
