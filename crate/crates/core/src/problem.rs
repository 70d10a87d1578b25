//! Implicit complementarity problems `ICP(q, A, ζ)`:
//! find `z` with `Az + q ≥ 0`, `z − ζ(z) ≥ 0` and `(z − ζ(z))ᵀ(Az + q) = 0`.

use crate::error::{IcpError, Result};
use crate::matrix::{check_len, norm2_vec, SparseMatrix};

/// Affine implicit map `ζ(z) = Cz + d` with Lipschitz matrix `Ψ ≥ |C|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitMap {
    c: SparseMatrix,
    d: Vec<f64>,
    psi: SparseMatrix,
}

impl ImplicitMap {
    /// `ζ = 0`, which turns the problem into an LCP.
    pub fn zero(n: usize) -> Self {
        ImplicitMap {
            c: SparseMatrix::zeros(n),
            d: vec![0.0; n],
            psi: SparseMatrix::zeros(n),
        }
    }

    /// `ζ(z) = Cz + d` with `Ψ = |C|`.
    pub fn affine(c: SparseMatrix, d: Vec<f64>) -> Result<Self> {
        let psi = c.abs();
        Self::with_lipschitz(c, d, psi)
    }

    /// `ζ(z) = Cz + d` with an explicit Lipschitz matrix; `Ψ ≥ |C|` is enforced.
    pub fn with_lipschitz(c: SparseMatrix, d: Vec<f64>, psi: SparseMatrix) -> Result<Self> {
        let n = c.n();
        check_len(n, d.len())?;
        check_len(n, psi.n())?;
        if !psi.is_nonnegative() {
            return Err(IcpError::InvalidArgument("Lipschitz matrix must be nonnegative".into()));
        }
        if let Some((i, j, v)) = c.abs().triplets().find(|&(i, j, v)| psi.get(i, j) < v) {
            return Err(IcpError::InvalidArgument(format!(
                "Lipschitz matrix entry ({i}, {j}) = {} is below |C| = {v}",
                psi.get(i, j)
            )));
        }
        Ok(ImplicitMap { c, d, psi })
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    pub fn c(&self) -> &SparseMatrix {
        &self.c
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn psi(&self) -> &SparseMatrix {
        &self.psi
    }

    pub fn is_zero(&self) -> bool {
        self.c.nnz() == 0 && self.d.iter().all(|&v| v == 0.0)
    }

    /// `ζ(z) = Cz + d`.
    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.c.matvec(z)?;
        for (o, d) in out.iter_mut().zip(&self.d) {
            *o += d;
        }
        Ok(out)
    }
}

/// An `ICP(q, A, ζ)` instance.
#[derive(Debug, Clone, PartialEq)]
pub struct IcpProblem {
    a: SparseMatrix,
    q: Vec<f64>,
    zeta: ImplicitMap,
}

impl IcpProblem {
    pub fn new(a: SparseMatrix, q: Vec<f64>, zeta: ImplicitMap) -> Result<Self> {
        check_len(a.n(), q.len())?;
        check_len(a.n(), zeta.n())?;
        if let Some(v) = q.iter().find(|v| !v.is_finite()) {
            return Err(IcpError::InvalidArgument(format!("q has non-finite entry {v}")));
        }
        Ok(IcpProblem { a, q, zeta })
    }

    /// Linear complementarity problem: `ζ = 0`.
    pub fn lcp(a: SparseMatrix, q: Vec<f64>) -> Result<Self> {
        let n = a.n();
        Self::new(a, q, ImplicitMap::zero(n))
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn zeta(&self) -> &ImplicitMap {
        &self.zeta
    }

    /// `(w, s) = (Az + q, z − ζ(z))`.
    pub fn complementarity_pair(&self, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut w = self.a.matvec(z)?;
        for (wi, qi) in w.iter_mut().zip(&self.q) {
            *wi += qi;
        }
        let zeta = self.zeta.apply(z)?;
        let s = z.iter().zip(&zeta).map(|(a, b)| a - b).collect();
        Ok((w, s))
    }

    /// `‖min(Az + q, z − ζ(z))‖₂`.
    pub fn residual(&self, z: &[f64]) -> Result<Residual> {
        let (w, s) = self.complementarity_pair(z)?;
        let m: Vec<f64> = w.iter().zip(&s).map(|(a, b)| a.min(*b)).collect();
        Ok(Residual(norm2_vec(&m)))
    }

    /// All three complementarity conditions within `tol`; the product
    /// condition is scaled by `1 + ‖q‖₂`.
    pub fn is_solution(&self, z: &[f64], tol: f64) -> bool {
        let Ok((w, s)) = self.complementarity_pair(z) else {
            return false;
        };
        let feasible = w.iter().all(|&v| v >= -tol) && s.iter().all(|&v| v >= -tol);
        let product: f64 = w.iter().zip(&s).map(|(a, b)| a * b).sum();
        feasible && product.abs() <= tol * (1.0 + norm2_vec(&self.q))
    }
}

/// Nonnegative Euclidean residual value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Residual(f64);

impl Residual {
    pub fn value(self) -> f64 {
        self.0
    }
}
