//! Conjugate gradient and BiCGSTAB for the inner linear solves.

use crate::matrix::{norm2_vec, SparseMatrix};

/// Outcome of a Krylov run: the final iterate, its true residual norm and
/// whether the tolerance was met.
#[derive(Debug, Clone)]
pub(crate) struct KrylovOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub breakdown: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn true_residual(a: &SparseMatrix, x: &[f64], b: &[f64], work: &mut [f64]) -> f64 {
    a.matvec_into(x, work);
    work.iter()
        .zip(b)
        .map(|(ax, bi)| (bi - ax) * (bi - ax))
        .sum::<f64>()
        .sqrt()
}

/// Conjugate gradient; stops when `‖b − Ax‖₂ ≤ target`.
pub(crate) fn conjugate_gradient(a: &SparseMatrix, b: &[f64], x0: &[f64], target: f64, max_iter: usize) -> KrylovOutcome {
    let n = b.len();
    let mut x = x0.to_vec();
    let mut ap = vec![0.0; n];
    a.matvec_into(&x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, v)| bi - v).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut breakdown = false;
    for _ in 0..max_iter {
        if rr.sqrt() <= target {
            break;
        }
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            breakdown = true;
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    let residual = true_residual(a, &x, b, &mut ap);
    KrylovOutcome {
        converged: residual <= target,
        x,
        residual,
        breakdown,
    }
}

/// BiCGSTAB; stops when `‖b − Ax‖₂ ≤ target`.
pub(crate) fn bicgstab(a: &SparseMatrix, b: &[f64], x0: &[f64], target: f64, max_iter: usize) -> KrylovOutcome {
    let n = b.len();
    let mut x = x0.to_vec();
    let mut v = vec![0.0; n];
    a.matvec_into(&x, &mut v);
    let mut r: Vec<f64> = b.iter().zip(&v).map(|(bi, ax)| bi - ax).collect();
    let r_hat = r.clone();
    let mut p = vec![0.0; n];
    v.iter_mut().for_each(|e| *e = 0.0);
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut breakdown = false;

    let mut best = x.clone();
    let mut best_res = norm2_vec(&r);
    for _ in 0..max_iter {
        if norm2_vec(&r) <= target {
            break;
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() || omega == 0.0 {
            breakdown = true;
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        a.matvec_into(&p, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 || !rv.is_finite() {
            breakdown = true;
            break;
        }
        alpha = rho_new / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2_vec(&s) <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            r.copy_from_slice(&s);
            break;
        }
        a.matvec_into(&s, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            breakdown = true;
            break;
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        let rn = norm2_vec(&r);
        if rn < best_res {
            best_res = rn;
            best.copy_from_slice(&x);
        }
    }
    let mut work = vec![0.0; n];
    let mut residual = true_residual(a, &x, b, &mut work);
    let best_true = true_residual(a, &best, b, &mut work);
    if best_true < residual {
        x = best;
        residual = best_true;
    }
    KrylovOutcome {
        converged: residual <= target,
        x,
        residual,
        breakdown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, lower: f64, diag: f64, upper: f64) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, diag));
            if i > 0 {
                t.push((i, i - 1, lower));
            }
            if i + 1 < n {
                t.push((i, i + 1, upper));
            }
        }
        SparseMatrix::from_triplets(n, t).unwrap()
    }

    #[test]
    fn cg_solves_spd() {
        let a = tridiag(50, -1.0, 4.0, -1.0);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x_true).unwrap();
        let out = conjugate_gradient(&a, &b, &vec![0.0; 50], 1e-12, 500);
        assert!(out.converged);
        for (x, e) in out.x.iter().zip(&x_true) {
            assert!((x - e).abs() < 1e-10);
        }
    }

    #[test]
    fn bicgstab_solves_nonsymmetric() {
        let a = tridiag(60, -2.0, 5.0, -0.5);
        let x_true: Vec<f64> = (0..60).map(|i| 1.0 + (i % 7) as f64).collect();
        let b = a.matvec(&x_true).unwrap();
        let out = bicgstab(&a, &b, &vec![0.0; 60], 1e-11, 1000);
        assert!(out.converged, "residual {}", out.residual);
        for (x, e) in out.x.iter().zip(&x_true) {
            assert!((x - e).abs() < 1e-9);
        }
    }

    #[test]
    fn cg_reports_indefinite_breakdown() {
        let a = SparseMatrix::from_diagonal(&[1.0, -1.0]);
        let out = conjugate_gradient(&a, &[1.0, 1.0], &[0.0, 0.0], 1e-12, 10);
        assert!(out.breakdown);
        assert!(!out.converged);
    }
}
