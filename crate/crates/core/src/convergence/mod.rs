//! Matrix classifiers and sufficient convergence conditions.
//!
//! Classifiers follow the usual definitions: a Z-matrix has nonpositive
//! off-diagonal entries, an M-matrix is a Z-matrix with `A⁻¹ ≥ 0`, an
//! H₊-matrix has positive diagonal and `⟨A⟩` an M-matrix, and a P-matrix has
//! all principal minors positive. Certificates are dense and meant for
//! `n` up to a few hundred.

mod certificates;
mod classify;

pub use certificates::{
    all_certificates, corollary41_rho_lbar, corollary42_norm_bounds, coupling_matrix, lbar_matrix, norm_bounds,
    t_matrix, theorem41_rho_t, theorem42_hplus_condition, theorem43_eq7_window, theorem43_for_config,
    theorem44_scaling_check, Certificate, CERT_POWER, STRICT_MARGIN,
};
pub use classify::{
    classify, is_h_plus_matrix, is_h_splitting, is_m_matrix, is_p_matrix, is_sdd, is_z_matrix, MatrixClasses,
    MINOR_TOL, M_INVERSE_TOL, P_MATRIX_MAX_N,
};
