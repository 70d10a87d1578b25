//! Relaxation modulus-based matrix splitting iteration.
//!
//! With the modulus substitution `z − ζ(z) = Ω₁(|x| + x)/γ` and
//! `Az + q = Ω₂(|x| − x)/γ`, the complementarity problem becomes the
//! fixed-point equation
//!
//! ```text
//! (Ω₂ + MΩ₁ + φΩ₁) x = (NΩ₁ + φΩ₁) x + (Ω₂ − AΩ₁)|x| − γAζ(z) − γq
//! ```
//!
//! for any splitting `A = (M + φ) − (N + φ)`. Each outer step recovers `z`
//! from `x` by a linear solve with `A`, checks the natural residual and then
//! applies one sweep of the fixed-point map above.

mod krylov;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{IcpError, Result};
use crate::matrix::{check_len, norm2_vec, DiagonalMatrix, LuFactor, SparseMatrix, DEFAULT_SMALL_N};
use crate::problem::IcpProblem;
use crate::splitting::{build_splitting, system_matrix, SplitPair, SplittingScheme};

/// Parameters of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub gamma: f64,
    pub omega1: DiagonalMatrix,
    pub omega2: DiagonalMatrix,
    pub phi: DiagonalMatrix,
    pub scheme: SplittingScheme,
    /// Outer tolerance on `‖min(Az + q, z − ζ(z))‖₂`.
    pub eps: f64,
    pub max_outer: usize,
    /// Inner solves reach `‖Az − b‖₂ ≤ inner_tol·(1 + ‖b‖₂)`.
    pub inner_tol: f64,
    pub inner_max: usize,
    /// Dense LU is used for inner solves up to this dimension.
    pub dense_max_n: usize,
    /// Keep every outer iterate `x⁽ᵏ⁾` in the report.
    pub record_history: bool,
}

impl SolverConfig {
    /// `γ = 1`, `Ω₁ = Ω₂ = I`, `φ = 0.1·I`, Gauss–Seidel, `ε = 1e-8`.
    pub fn new(n: usize) -> Self {
        let eps = 1e-8;
        SolverConfig {
            gamma: 1.0,
            omega1: DiagonalMatrix::identity(n),
            omega2: DiagonalMatrix::identity(n),
            phi: DiagonalMatrix::scalar(n, 0.1),
            scheme: SplittingScheme::GaussSeidel,
            eps,
            max_outer: 10_000,
            inner_tol: eps / 100.0,
            inner_max: (10 * n).max(1000),
            dense_max_n: DEFAULT_SMALL_N,
            record_history: false,
        }
    }

    pub fn with_scheme(mut self, scheme: SplittingScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Sets `ε` and keeps the inner tolerance two orders tighter.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self.inner_tol = eps / 100.0;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for d in [&self.omega1, &self.omega2, &self.phi] {
            check_len(n, d.n())?;
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(IcpError::InvalidArgument(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.eps > 0.0) || !(self.inner_tol > 0.0) {
            return Err(IcpError::InvalidArgument("tolerances must be positive".into()));
        }
        if !self.omega1.is_positive() || !self.omega2.is_positive() {
            return Err(IcpError::InvalidArgument("omega1 and omega2 must be positive diagonals".into()));
        }
        if self.phi.values().iter().any(|v| !v.is_finite()) {
            return Err(IcpError::InvalidArgument("phi must be finite".into()));
        }
        self.scheme.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    InnerFailure,
}

/// Outcome of [`solve_icp`]. Serializes with the field order
/// `status, iterations, residuals, elapsed_seconds, z, x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Number of x-updates performed.
    pub iterations: usize,
    /// One residual per outer step, starting with `Res(z⁽⁰⁾)`.
    pub residuals: Vec<f64>,
    pub elapsed_seconds: f64,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(skip)]
    pub history: Option<Vec<Vec<f64>>>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| IcpError::Parse(e.to_string()))
    }
}

/// An inner linear solve that missed its tolerance.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("inner solve failed ({reason}); residual {residual:e}")]
pub struct InnerFailure {
    pub best: Vec<f64>,
    pub residual: f64,
    pub reason: String,
}

/// A linear solver prepared once for a fixed matrix.
#[derive(Debug, Clone)]
pub enum LinearSolver {
    Triangular(SparseMatrix),
    Dense { a: SparseMatrix, lu: LuFactor },
    /// Singular at factorization time; every solve fails.
    Singular { n: usize, reason: String },
    ConjugateGradient(SparseMatrix),
    BiCgStab(SparseMatrix),
}

impl LinearSolver {
    /// Lower-triangular → forward substitution; `n ≤ dense_max_n` → dense
    /// LU; otherwise CG when `A` is symmetric with positive diagonal, else
    /// BiCGSTAB.
    pub fn new(a: &SparseMatrix, dense_max_n: usize) -> Self {
        let n = a.n();
        if a.is_lower_triangular() {
            return LinearSolver::Triangular(a.clone());
        }
        if n <= dense_max_n {
            return match a.to_dense().lu() {
                Ok(lu) => LinearSolver::Dense { a: a.clone(), lu },
                Err(e) => LinearSolver::Singular { n, reason: e.to_string() },
            };
        }
        if a.is_symmetric(1e-14) && a.diagonal().iter().all(|&d| d > 0.0) {
            LinearSolver::ConjugateGradient(a.clone())
        } else {
            LinearSolver::BiCgStab(a.clone())
        }
    }

    fn matrix(&self) -> Option<&SparseMatrix> {
        match self {
            LinearSolver::Triangular(a)
            | LinearSolver::Dense { a, .. }
            | LinearSolver::ConjugateGradient(a)
            | LinearSolver::BiCgStab(a) => Some(a),
            LinearSolver::Singular { .. } => None,
        }
    }

    /// Solves `Ax = b` to `‖Ax − b‖₂ ≤ tol·(1 + ‖b‖₂)`; `x0` seeds the
    /// Krylov methods.
    pub fn solve(&self, b: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<Vec<f64>, InnerFailure> {
        let target = tol * (1.0 + norm2_vec(b));
        let n = b.len();
        let zeros = vec![0.0; n];
        let start = x0.unwrap_or(&zeros);
        let residual_of = |a: &SparseMatrix, x: &[f64]| {
            let ax = a.matvec(x).expect("dimensions checked");
            ax.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
        };
        let (x, residual, reason) = match self {
            LinearSolver::Singular { reason, .. } => {
                return Err(InnerFailure {
                    best: zeros.clone(),
                    residual: norm2_vec(b),
                    reason: reason.clone(),
                })
            }
            LinearSolver::Triangular(a) => {
                let mut x = vec![0.0; n];
                if let Err(e) = a.forward_substitute(b, &mut x) {
                    return Err(InnerFailure {
                        best: zeros.clone(),
                        residual: norm2_vec(b),
                        reason: e.to_string(),
                    });
                }
                let r = residual_of(a, &x);
                (x, r, "forward substitution inaccurate")
            }
            LinearSolver::Dense { a, lu } => {
                let mut x = lu.solve(b);
                let mut r = residual_of(a, &x);
                if r > target && r.is_finite() {
                    // one step of iterative refinement
                    let ax = a.matvec(&x).expect("dimensions checked");
                    let res: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
                    let dx = lu.solve(&res);
                    let refined: Vec<f64> = x.iter().zip(&dx).map(|(u, v)| u + v).collect();
                    let r2 = residual_of(a, &refined);
                    if r2 < r {
                        x = refined;
                        r = r2;
                    }
                }
                (x, r, "dense solve inaccurate")
            }
            LinearSolver::ConjugateGradient(a) => {
                let out = krylov::conjugate_gradient(a, b, start, target, max_iter);
                if out.converged {
                    return Ok(out.x);
                }
                // CG can break down on symmetric indefinite input.
                let retry = krylov::bicgstab(a, b, &out.x, target, max_iter);
                let reason = if out.breakdown { "CG breakdown; BiCGSTAB did not converge" } else { "CG did not converge" };
                (retry.x, retry.residual, reason)
            }
            LinearSolver::BiCgStab(a) => {
                let out = krylov::bicgstab(a, b, start, target, max_iter);
                let reason = if out.breakdown { "BiCGSTAB breakdown" } else { "BiCGSTAB did not converge" };
                (out.x, out.residual, reason)
            }
        };
        if residual <= target && x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(InnerFailure {
                best: x,
                residual,
                reason: reason.to_string(),
            })
        }
    }

    pub fn n(&self) -> usize {
        match self {
            LinearSolver::Singular { n, .. } => *n,
            other => other.matrix().map(|a| a.n()).unwrap_or(0),
        }
    }
}

/// Stand-alone inner solve with `A` (dense up to [`DEFAULT_SMALL_N`]).
pub fn inner_solve(a: &SparseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, InnerFailure> {
    LinearSolver::new(a, DEFAULT_SMALL_N).solve(b, None, tol, max_iter)
}

/// Right-hand side of the z-step: `Ω₂(|x| − x)/γ − q`.
pub fn modulus_rhs_z(p: &IcpProblem, cfg: &SolverConfig, x: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(p.q())
        .enumerate()
        .map(|(i, (xi, qi))| cfg.omega2[i] * (xi.abs() - xi) / cfg.gamma - qi)
        .collect()
}

/// Modulus variable of `z`: `x = (γ/2)(Ω₁⁻¹(z − ζ(z)) − Ω₂⁻¹(Az + q))`.
///
/// When `z` solves the problem this is the unique `x` with
/// `z − ζ(z) = Ω₁(|x| + x)/γ` and `Az + q = Ω₂(|x| − x)/γ`, hence a fixed
/// point of the x-update.
pub fn modulus_variable(p: &IcpProblem, cfg: &SolverConfig, z: &[f64]) -> Result<Vec<f64>> {
    let (w, s) = p.complementarity_pair(z)?;
    Ok((0..p.n())
        .map(|i| 0.5 * cfg.gamma * (s[i] / cfg.omega1[i] - w[i] / cfg.omega2[i]))
        .collect())
}

/// `(NΩ₁ + φΩ₁)x + (Ω₂ − AΩ₁)|x| − γAζ(z) − γq`.
pub fn x_update_rhs(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair, x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let n = p.n();
    check_len(n, x.len())?;
    check_len(n, z.len())?;
    let w1: Vec<f64> = x.iter().enumerate().map(|(i, v)| cfg.omega1[i] * v).collect();
    let mut out = sp.n.matvec(&w1)?;
    let zeta = p.zeta().apply(z)?;
    // A(Ω₁|x| + γζ(z)) in one product
    let inner: Vec<f64> = (0..n).map(|i| cfg.omega1[i] * x[i].abs() + cfg.gamma * zeta[i]).collect();
    let a_part = p.a().matvec(&inner)?;
    for i in 0..n {
        out[i] += cfg.phi[i] * w1[i] + cfg.omega2[i] * x[i].abs() - a_part[i] - cfg.gamma * p.q()[i];
    }
    Ok(out)
}

/// Solves `(Ω₂ + MΩ₁ + φΩ₁) x = rhs`: forward substitution when the system
/// matrix is lower triangular, otherwise the inner solver.
pub fn x_update_solve(sysmat: &SparseMatrix, rhs: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    check_len(sysmat.n(), rhs.len())?;
    if sysmat.is_lower_triangular() {
        return sysmat.lower_triangular_solve(rhs);
    }
    LinearSolver::new(sysmat, cfg.dense_max_n)
        .solve(rhs, None, cfg.inner_tol, cfg.inner_max)
        .map_err(|f| IcpError::Singular(f.to_string()))
}

/// `‖(Ω₂ + MΩ₁ + φΩ₁)x − [(NΩ₁ + φΩ₁)x + (Ω₂ − AΩ₁)|x| − γAζ(z) − γq]‖₂`.
pub fn fixed_point_residual(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair, x: &[f64], z: &[f64]) -> Result<f64> {
    let sys = system_matrix(&sp.m, &cfg.omega1, &cfg.omega2, &cfg.phi)?;
    let lhs = sys.matvec(x)?;
    let rhs = x_update_rhs(p, cfg, sp, x, z)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Runs the outer iteration from `x0` (the zero vector when `None`).
///
/// Step 1 solves `Az⁽ᵏ⁾ = Ω₂(|x⁽ᵏ⁾| − x⁽ᵏ⁾)/γ − q`; step 2 stops once
/// `Res(z⁽ᵏ⁾) < ε`; step 3 forms `x⁽ᵏ⁺¹⁾` from the splitting. At most
/// `max_outer` x-updates are performed. On `MaxIters` the report carries the
/// iterate with the smallest residual seen.
///
/// The reported `x` is [`modulus_variable`] of the reported `z`. The raw
/// iterate `x⁽ᵏ⁾` can lag behind: Step 2 only looks at `z⁽ᵏ⁾`, and e.g.
/// `x⁽⁰⁾ = 0` already yields the exact `z` for an interior solution. Raw
/// iterates are kept in `history` when requested.
pub fn solve_icp(p: &IcpProblem, cfg: &SolverConfig, x0: Option<&[f64]>) -> Result<SolveReport> {
    let start = Instant::now();
    let n = p.n();
    cfg.validate(n)?;
    let mut x = match x0 {
        Some(v) => {
            check_len(n, v.len())?;
            v.to_vec()
        }
        None => vec![0.0; n],
    };

    let sp = build_splitting(p.a(), cfg.scheme)?;
    let sys = system_matrix(&sp.m, &cfg.omega1, &cfg.omega2, &cfg.phi)?;
    let a_solver = LinearSolver::new(p.a(), cfg.dense_max_n);
    let sys_solver = LinearSolver::new(&sys, cfg.dense_max_n);

    let mut residuals = Vec::new();
    let mut history = cfg.record_history.then(Vec::new);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut z_prev: Option<Vec<f64>> = None;
    let mut iterations = 0;

    let status = loop {
        if let Some(h) = history.as_mut() {
            h.push(x.clone());
        }
        let rhs_z = modulus_rhs_z(p, cfg, &x);
        let z = match a_solver.solve(&rhs_z, z_prev.as_deref(), cfg.inner_tol, cfg.inner_max) {
            Ok(z) => z,
            Err(fail) => {
                let r = p.residual(&fail.best)?.value();
                residuals.push(r);
                if best.as_ref().is_none_or(|(rb, _)| r < *rb) {
                    best = Some((r, fail.best));
                }
                break SolveStatus::InnerFailure;
            }
        };
        let r = p.residual(&z)?.value();
        residuals.push(r);
        if best.as_ref().is_none_or(|(rb, _)| r < *rb || rb.is_nan()) {
            best = Some((r, z.clone()));
        }
        if r < cfg.eps {
            break SolveStatus::Converged;
        }
        if iterations >= cfg.max_outer || !r.is_finite() {
            break SolveStatus::MaxIters;
        }

        let rhs = x_update_rhs(p, cfg, &sp, &x, &z)?;
        match sys_solver.solve(&rhs, Some(&x), cfg.inner_tol, cfg.inner_max) {
            Ok(next) => x = next,
            Err(_) => break SolveStatus::InnerFailure,
        }
        iterations += 1;
        z_prev = Some(z);
    };

    let (_, z) = best.expect("at least one outer step");
    let x = modulus_variable(p, cfg, &z)?;
    Ok(SolveReport {
        status,
        iterations,
        residuals,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        z,
        x,
        history,
    })
}
