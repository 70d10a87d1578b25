//! Sufficient convergence conditions for the modulus iteration, evaluated
//! densely on small instances.
//!
//! Throughout, `G = |A|Ψ|A⁻¹|Ω₂` and `X_{Ω₁}` denotes `X·Ω₁`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::classify::{dense_comparison, dense_is_m_matrix, is_h_plus_matrix};
use crate::error::{IcpError, Result};
use crate::matrix::{norm2, spectral_radius_nonneg, DenseMatrix, DiagonalMatrix, PowerOptions, SparseMatrix};
use crate::problem::IcpProblem;
use crate::solver::SolverConfig;
use crate::splitting::{system_matrix, SplitPair};

/// Margin for strict inequalities.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Power-iteration settings used by every certificate.
pub const CERT_POWER: PowerOptions = PowerOptions {
    tol: 1e-13,
    max_iter: 200_000,
};

/// Outcome of one condition check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    /// `NaN` (serialized as `null`) when the quantity could not be computed.
    #[serde(deserialize_with = "nan_if_null")]
    pub quantity: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

fn nan_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Certificate {
    fn new(name: &str, quantity: f64, threshold: f64) -> Self {
        let mut c = Certificate {
            name: name.to_string(),
            quantity,
            threshold,
            satisfied: quantity.is_finite() && quantity < threshold - STRICT_MARGIN,
            notes: Vec::new(),
        };
        if quantity.is_finite() && !c.satisfied && quantity < threshold + STRICT_MARGIN {
            c.note("boundary: quantity equals threshold within 1e-12");
        }
        c
    }

    /// A structural check: quantity is 1 when it holds, 0 otherwise.
    fn structural(name: &str, holds: bool) -> Self {
        Certificate {
            name: name.to_string(),
            quantity: if holds { 1.0 } else { 0.0 },
            threshold: 1.0,
            satisfied: holds,
            notes: Vec::new(),
        }
    }

    fn failed(name: &str, reason: impl Into<String>) -> Self {
        Certificate {
            name: name.to_string(),
            quantity: f64::NAN,
            threshold: 1.0,
            satisfied: false,
            notes: vec![reason.into()],
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn reject(&mut self, s: impl Into<String>) {
        self.satisfied = false;
        self.note(s);
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} quantity={:<24.16e} threshold={:<8} satisfied={}",
            self.name, self.quantity, self.threshold, self.satisfied
        )?;
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(IcpError::TooLarge {
            n,
            limit,
            what: "convergence certificate",
        });
    }
    Ok(())
}

fn rho(m: &DenseMatrix, cert_notes: &mut Vec<String>) -> f64 {
    let est = spectral_radius_nonneg(m, CERT_POWER).expect("argument is nonnegative by construction");
    if !est.converged {
        cert_notes.push(format!("power iteration did not converge in {} steps", est.iterations));
    }
    est.value
}

fn diag_dense(d: &DiagonalMatrix) -> DenseMatrix {
    DenseMatrix::from_diagonal(d)
}

/// `G = |A|Ψ|A⁻¹|Ω₂`; zero without inverting `A` when `Ψ = 0`.
pub fn coupling_matrix(a: &SparseMatrix, psi: &SparseMatrix, omega2: &DiagonalMatrix) -> Result<DenseMatrix> {
    let n = a.n();
    if psi.nnz() == 0 {
        return Ok(DenseMatrix::zeros(n));
    }
    let inv = a.to_dense().inverse()?;
    Ok(a
        .abs()
        .to_dense()
        .matmul(&psi.to_dense())
        .matmul(&inv.abs())
        .mul_diag_right(omega2))
}

/// Dense pieces shared by the `T`, `L̄`, `S` and `S̄` bounds.
struct Pieces {
    sys_inv_abs: DenseMatrix,
    sys_inv: DenseMatrix,
    /// `(N + φ)Ω₁`
    n_phi: DenseMatrix,
    /// `(M + φ)Ω₁ − Ω₂`
    m_phi_minus_o2: DenseMatrix,
    /// `Ω₂ − AΩ₁`
    o2_minus_a: DenseMatrix,
    g: DenseMatrix,
}

fn pieces(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> std::result::Result<Pieces, String> {
    let sys = system_matrix(&sp.m, &cfg.omega1, &cfg.omega2, &cfg.phi).map_err(|e| e.to_string())?;
    let sys_inv = sys
        .to_dense()
        .inverse()
        .map_err(|_| "system matrix Ω₂ + MΩ₁ + φΩ₁ is singular".to_string())?;
    let g = coupling_matrix(p.a(), p.zeta().psi(), &cfg.omega2).map_err(|_| "A is singular".to_string())?;
    let phi_o1 = diag_dense(&cfg.phi.mul(&cfg.omega1));
    let o2 = diag_dense(&cfg.omega2);
    let n_phi = sp.n.to_dense().mul_diag_right(&cfg.omega1).add(&phi_o1);
    let m_phi_minus_o2 = sp.m.to_dense().mul_diag_right(&cfg.omega1).add(&phi_o1).sub(&o2);
    let o2_minus_a = o2.sub(&p.a().to_dense().mul_diag_right(&cfg.omega1));
    Ok(Pieces {
        sys_inv_abs: sys_inv.abs(),
        sys_inv,
        n_phi,
        m_phi_minus_o2,
        o2_minus_a,
        g,
    })
}

/// `T = |(Ω₂ + MΩ₁ + φΩ₁)⁻¹|(|(N + φ)Ω₁| + |Ω₂ − AΩ₁| + 2G)`.
pub fn t_matrix(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<DenseMatrix> {
    let pc = pieces(p, cfg, sp).map_err(IcpError::Singular)?;
    Ok(t_from(&pc))
}

fn t_from(pc: &Pieces) -> DenseMatrix {
    pc.sys_inv_abs
        .matmul(&pc.n_phi.abs().add(&pc.o2_minus_a.abs()).add(&pc.g.scale(2.0)))
}

/// `L̄ = |(Ω₂ + MΩ₁ + φΩ₁)⁻¹|(2|(N + φ)Ω₁| + |(M + φ)Ω₁ − Ω₂| + 2G)`.
pub fn lbar_matrix(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<DenseMatrix> {
    let pc = pieces(p, cfg, sp).map_err(IcpError::Singular)?;
    Ok(lbar_from(&pc))
}

fn lbar_from(pc: &Pieces) -> DenseMatrix {
    pc.sys_inv_abs
        .matmul(&pc.n_phi.abs().scale(2.0).add(&pc.m_phi_minus_o2.abs()).add(&pc.g.scale(2.0)))
}

/// `ρ(T) < 1`.
pub fn theorem41_rho_t(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<Certificate> {
    const NAME: &str = "theorem41_rho_T";
    check_size(p.n(), cfg.dense_max_n)?;
    let pc = match pieces(p, cfg, sp) {
        Ok(pc) => pc,
        Err(reason) => return Ok(Certificate::failed(NAME, reason)),
    };
    let mut notes = Vec::new();
    let value = rho(&t_from(&pc), &mut notes);
    let mut c = Certificate::new(NAME, value, 1.0);
    c.notes.extend(notes);
    Ok(c)
}

/// `ρ(L̄) < 1`. Since `T ≤ L̄` entrywise, `ρ(T) ≤ ρ(L̄)`; the certificate
/// records that relation as a note.
pub fn corollary41_rho_lbar(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<Certificate> {
    const NAME: &str = "corollary41_rho_Lbar";
    check_size(p.n(), cfg.dense_max_n)?;
    let pc = match pieces(p, cfg, sp) {
        Ok(pc) => pc,
        Err(reason) => return Ok(Certificate::failed(NAME, reason)),
    };
    let mut notes = Vec::new();
    let lbar = rho(&lbar_from(&pc), &mut notes);
    let t = rho(&t_from(&pc), &mut notes);
    let mut c = Certificate::new(NAME, lbar, 1.0);
    c.notes.extend(notes);
    c.note(format!(
        "rho(T) = {t:.16e} <= rho(Lbar) + 1e-10: {}",
        t <= lbar + 1e-10
    ));
    Ok(c)
}

/// 2-norm bounds `S` and `S̄`; satisfied when `min(S, S̄) < 1`.
///
/// `S  = ‖sys⁻¹‖₂(‖(N+φ)Ω₁‖₂ + ‖AΩ₁ − Ω₂‖₂ + ‖2G‖₂)`,
/// `S̄ = ‖sys⁻¹‖₂(2‖(N+φ)Ω₁‖₂ + ‖(M+φ)Ω₁ − Ω₂‖₂ + ‖2G‖₂)`.
pub fn corollary42_norm_bounds(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<Certificate> {
    const NAME: &str = "corollary42_S_Sbar";
    check_size(p.n(), cfg.dense_max_n)?;
    let (s, sbar) = match norm_bounds(p, cfg, sp) {
        Ok(v) => v,
        Err(reason) => return Ok(Certificate::failed(NAME, reason)),
    };
    let mut c = Certificate::new(NAME, s.min(sbar), 1.0);
    c.note(format!("S = {s:.16e}"));
    c.note(format!("Sbar = {sbar:.16e}"));
    Ok(c)
}

/// `(S, S̄)` as defined on [`corollary42_norm_bounds`].
pub fn norm_bounds(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> std::result::Result<(f64, f64), String> {
    let pc = pieces(p, cfg, sp)?;
    let nrm = |m: &DenseMatrix| norm2(m, CERT_POWER).value;
    let inv = nrm(&pc.sys_inv);
    let n_phi = nrm(&pc.n_phi);
    let g2 = nrm(&pc.g.scale(2.0));
    let s = inv * (n_phi + nrm(&pc.o2_minus_a) + g2);
    let sbar = inv * (2.0 * n_phi + nrm(&pc.m_phi_minus_o2) + g2);
    Ok((s, sbar))
}

/// H₊ condition: (a) `⟨M + φ⟩ − |N + φ|` is an M-matrix, (b) `Ω₂ ≥ DΩ₁`,
/// (c) `⟨MΩ₁⟩ − |NΩ₁| − 2G` is an M-matrix. The argument behind it also
/// needs `φ ≥ 0` and a nonnegative diagonal of `M`, which are checked.
pub fn theorem42_hplus_condition(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<Certificate> {
    const NAME: &str = "theorem42_hplus";
    let n = p.n();
    check_size(n, cfg.dense_max_n)?;
    let a = p.a();
    let phi = diag_dense(&cfg.phi);

    let h_plus = is_h_plus_matrix(a);
    let m_phi = sp.m.to_dense().add(&phi);
    let n_phi = sp.n.to_dense().add(&phi);
    let cond_a = dense_is_m_matrix(&dense_comparison(&m_phi).sub(&n_phi.abs()));
    let d = a.diagonal();
    let cond_b = (0..n).all(|i| cfg.omega2[i] >= d[i] * cfg.omega1[i]);
    let cond_c = match coupling_matrix(a, p.zeta().psi(), &cfg.omega2) {
        Ok(g) => {
            let mo = dense_comparison(&sp.m.to_dense().mul_diag_right(&cfg.omega1));
            let no = sp.n.to_dense().mul_diag_right(&cfg.omega1).abs();
            dense_is_m_matrix(&mo.sub(&no).sub(&g.scale(2.0)))
        }
        Err(_) => false,
    };

    let mut c = Certificate::structural(NAME, cond_a && cond_b && cond_c);
    c.note(format!("(a) H-splitting of <M+phi> - |N+phi|: {cond_a}"));
    c.note(format!("(b) Omega2 >= D*Omega1: {cond_b}"));
    c.note(format!("(c) <M Omega1> - |N Omega1| - 2G is an M-matrix: {cond_c}"));
    if !h_plus {
        c.reject("A is not an H+-matrix");
    }
    if !cfg.phi.is_nonnegative() {
        c.reject("phi has negative entries; the condition is only established for phi >= 0");
    }
    if sp.m.diagonal().iter().any(|&v| v < 0.0) {
        c.reject("M has a negative diagonal entry");
    }
    Ok(c)
}

/// AOR parameter window:
/// `max{α, β}·ρ(D_{Ω₁}⁻¹|B_{Ω₁}| + G) < min{1, α}` with `B = L + U`.
///
/// Besides the window itself the certificate requires the remaining
/// hypotheses: `A` is H₊, `Ω₂ ≥ DΩ₁`, `ρ(D_{Ω₁}⁻¹|B_{Ω₁}| + G) < 1` and
/// `β ≥ 0`. The window is only guaranteed with `G` scaled by `D_{Ω₁}⁻¹`
/// too, so `max{α, β}·ρ(D_{Ω₁}⁻¹(|B_{Ω₁}| + G)) < min{1, α}` is checked as
/// well; the two agree in verdict whenever `DΩ₁ ≥ I`.
pub fn theorem43_eq7_window(
    a: &SparseMatrix,
    omega1: &DiagonalMatrix,
    omega2: &DiagonalMatrix,
    psi: &SparseMatrix,
    alpha: f64,
    beta: f64,
) -> Result<Certificate> {
    const NAME: &str = "theorem43_aor_window";
    let n = a.n();
    let d = a.diagonal();
    if let Some(i) = d.iter().position(|&v| v == 0.0) {
        return Err(IcpError::Splitting(format!("zero diagonal entry a[{i},{i}]")));
    }
    let g = match coupling_matrix(a, psi, omega2) {
        Ok(g) => g,
        Err(_) => return Ok(Certificate::failed(NAME, "A is singular")),
    };
    let d_o1: Vec<f64> = (0..n).map(|i| d[i] * omega1[i]).collect();
    let inv_d = DiagonalMatrix::new(d_o1.iter().map(|v| 1.0 / v.abs()).collect());
    let (_, l, u) = a.extract_dlu();
    let b_abs = l.add(&u)?.mul_diag_right(omega1).abs().to_dense();
    let jac = b_abs.mul_diag_left(&inv_d);

    let mut notes = Vec::new();
    let rho0 = rho(&jac.add(&g), &mut notes);
    let rho_scaled = rho(&b_abs.add(&g).mul_diag_left(&inv_d), &mut notes);
    let mx = alpha.max(beta);
    let threshold = alpha.min(1.0);

    let mut c = Certificate::new(NAME, mx * rho0, threshold);
    c.notes.extend(notes);
    c.note(format!("rho(D^-1|B| + G) = {rho0:.16e}"));
    c.note(format!("rescaled quantity max(alpha,beta)*rho(D^-1(|B| + G)) = {:.16e}", mx * rho_scaled));
    if rho0 >= 1.0 - STRICT_MARGIN {
        c.reject("rho(D^-1|B| + G) is not below 1");
    }
    if mx * rho_scaled >= threshold - STRICT_MARGIN {
        c.reject("rescaled quantity is not below the threshold");
    }
    if beta < 0.0 {
        c.reject("beta < 0 is outside the window");
    }
    if !(alpha > 0.0) {
        c.reject("alpha must be positive");
    }
    if !(0..n).all(|i| omega2[i] >= d_o1[i]) {
        c.reject("hypothesis Omega2 >= D*Omega1 fails");
    }
    if !is_h_plus_matrix(a) {
        c.reject("A is not an H+-matrix");
    }
    Ok(c)
}

/// [`theorem43_eq7_window`] for a solver configuration. Not applicable
/// (`None`) outside the AOR family; also requires `φ ≥ 0`.
pub fn theorem43_for_config(p: &IcpProblem, cfg: &SolverConfig) -> Result<Option<Certificate>> {
    check_size(p.n(), cfg.dense_max_n)?;
    let Some((alpha, beta)) = cfg.scheme.aor_parameters() else {
        return Ok(None);
    };
    let mut c = theorem43_eq7_window(p.a(), &cfg.omega1, &cfg.omega2, p.zeta().psi(), alpha, beta)?;
    if !cfg.phi.is_nonnegative() {
        c.reject("phi has negative entries; the window is only established for phi >= 0");
    }
    Ok(Some(c))
}

/// Scaling condition with `V = diag(Ā⁻¹e)`, `Ā = ⟨M + φ⟩ − |N + φ|`.
///
/// Case (1), `Ω₂ ≥ DΩ₁`: `(⟨(M+φ)Ω₁⟩ − |(N+φ)Ω₁| − G)Ve > 0`.
/// Case (2), `Ω₂ < DΩ₁`: the same with `Ω₂ − DΩ₁` added.
/// Here `D` is the diagonal of `A = M − N`. The quantity is
/// `−min_i (·Ve)_i` against threshold 0.
pub fn theorem44_scaling_check(
    m: &SparseMatrix,
    n: &SparseMatrix,
    phi: &DiagonalMatrix,
    omega1: &DiagonalMatrix,
    omega2: &DiagonalMatrix,
    psi: &SparseMatrix,
) -> Result<Certificate> {
    const NAME: &str = "theorem44_scaling";
    let dim = m.n();
    let a = m.sub(n)?;
    let phi_d = diag_dense(phi);
    let m_phi = m.to_dense().add(&phi_d);
    let n_phi = n.to_dense().add(&phi_d);
    let abar = dense_comparison(&m_phi).sub(&n_phi.abs());
    if !dense_is_m_matrix(&abar) {
        return Ok(Certificate::failed(NAME, "<M+phi> - |N+phi| is not an M-matrix"));
    }
    let v = abar.lu()?.solve(&vec![1.0; dim]);
    let g = match coupling_matrix(&a, psi, omega2) {
        Ok(g) => g,
        Err(_) => return Ok(Certificate::failed(NAME, "A is singular")),
    };
    let d = a.diagonal();
    let ge = (0..dim).all(|i| omega2[i] >= d[i] * omega1[i]);
    let lt = (0..dim).all(|i| omega2[i] < d[i] * omega1[i]);
    if !ge && !lt {
        return Ok(Certificate::failed(NAME, "mixed regime: Omega2 and D*Omega1 are not comparable"));
    }
    let mut w = dense_comparison(&m_phi.mul_diag_right(omega1))
        .sub(&n_phi.mul_diag_right(omega1).abs())
        .sub(&g);
    if lt {
        for i in 0..dim {
            w[(i, i)] += omega2[i] - d[i] * omega1[i];
        }
    }
    let wv = w.matvec(&v);
    let min = wv.iter().copied().fold(f64::INFINITY, f64::min);
    let mut c = Certificate::new(NAME, -min, 0.0);
    c.note(if ge { "case (1): Omega2 >= D*Omega1" } else { "case (2): Omega2 < D*Omega1" });
    c.note(format!("min component of the scaled vector = {min:.16e}"));
    if (0..dim).any(|i| m_phi[(i, i)] <= 0.0) {
        c.reject("M + phi has a nonpositive diagonal entry");
    }
    if !is_h_plus_matrix(&a) {
        c.reject("A is not an H+-matrix");
    }
    Ok(c)
}

/// Every certificate that applies to the configuration, in a fixed order.
pub fn all_certificates(p: &IcpProblem, cfg: &SolverConfig, sp: &SplitPair) -> Result<Vec<Certificate>> {
    let mut out = vec![
        theorem41_rho_t(p, cfg, sp)?,
        corollary41_rho_lbar(p, cfg, sp)?,
        corollary42_norm_bounds(p, cfg, sp)?,
        theorem42_hplus_condition(p, cfg, sp)?,
    ];
    if let Some(c) = theorem43_for_config(p, cfg)? {
        out.push(c);
    }
    out.push(theorem44_scaling_check(&sp.m, &sp.n, &cfg.phi, &cfg.omega1, &cfg.omega2, p.zeta().psi())?);
    Ok(out)
}
