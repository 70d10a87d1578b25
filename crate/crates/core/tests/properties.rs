use proptest::prelude::*;

use icp_core::convergence::{
    all_certificates, classify, is_h_plus_matrix, is_m_matrix, is_p_matrix, is_sdd, is_z_matrix,
};
use icp_core::generators::{gen_random_hplus, gen_random_instance, Lcg};
use icp_core::matrix::{dense_inverse, spectral_radius_nonneg, DenseMatrix, PowerOptions};
use icp_core::oracle::{enumerate_icp, oracle_unique_solution};
use icp_core::{build_splitting, solve_icp, DiagonalMatrix, IcpProblem, SolverConfig, SparseMatrix, SplittingScheme};

fn dense(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = DenseMatrix> {
    proptest::collection::vec(lo..hi, n * n).prop_map(move |v| {
        let rows: Vec<Vec<f64>> = v.chunks(n).map(<[f64]>::to_vec).collect();
        DenseMatrix::from_rows(&rows)
    })
}

fn sized_dense(lo: f64, hi: f64) -> impl Strategy<Value = DenseMatrix> {
    (1usize..=10).prop_flat_map(move |n| dense(n, lo, hi))
}

fn tight() -> PowerOptions {
    PowerOptions {
        tol: 1e-14,
        max_iter: 1_000_000,
    }
}

/// Strictly diagonally dominant Z-matrix with positive diagonal: an M-matrix.
fn m_matrix_from(off: &DenseMatrix, margin: f64) -> SparseMatrix {
    let n = off.n();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        let mut sum = 0.0;
        for j in 0..n {
            if i != j {
                row[j] = -off[(i, j)].abs();
                sum += off[(i, j)].abs();
            }
        }
        row[i] = sum + margin;
    }
    SparseMatrix::from_dense(&DenseMatrix::from_rows(&rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn m_matrix_dominated_by_z_matrix(off in sized_dense(0.0, 1.0), bump in sized_dense(0.0, 1.0), margin in 0.1f64..2.0) {
        let a = m_matrix_from(&off, margin);
        prop_assert!(is_m_matrix(&a));
        let n = a.n();
        // B ≥ A entrywise, off-diagonals of B kept nonpositive.
        let b = a.map_values(|i, j, v| {
            let extra = if i < bump.n() && j < bump.n() { bump[(i, j)] } else { 0.0 };
            if i == j { v + extra } else { (v + extra * v.abs()).min(0.0) }
        });
        prop_assert!(is_z_matrix(&b));
        prop_assert!(b.triplets().all(|(i, j, v)| v >= a.get(i, j)));
        prop_assert!(is_m_matrix(&b), "n = {}", n);
    }

    #[test]
    fn inverse_bounded_by_comparison_inverse(seed in any::<u64>(), n in 1usize..=10, scale in proptest::collection::vec(0.2f64..5.0, 10), flip in proptest::collection::vec(any::<bool>(), 10)) {
        let a = gen_random_hplus(n, seed, 0.6).unwrap()
            .map_values(|i, j, v| if i == j && flip[i] { -v } else { v })
            .mul_diag_right(&DiagonalMatrix::new(scale[..n].to_vec()));
        let inv = dense_inverse(&a, 10).unwrap().abs();
        let cmp = dense_inverse(&a.comparison(), 10).unwrap();
        for (x, y) in inv.data().iter().zip(cmp.data()) {
            prop_assert!(*x <= y + 1e-10);
        }
    }

    #[test]
    fn spectral_radius_is_monotone(a in sized_dense(0.0, 1.0), e in sized_dense(0.0, 0.5)) {
        let n = a.n();
        let e = DenseMatrix::from_rows(&(0..n).map(|i| (0..n).map(|j| if i < e.n() && j < e.n() { e[(i, j)] } else { 0.0 }).collect()).collect::<Vec<_>>());
        let b = a.add(&e);
        let ra = spectral_radius_nonneg(&a, tight()).unwrap().value;
        let rb = spectral_radius_nonneg(&b, tight()).unwrap().value;
        prop_assert!(ra <= rb + 1e-10, "{} > {}", ra, rb);
    }

    #[test]
    fn sdd_inverse_norm_bound(seed in any::<u64>(), n in 1usize..=10, e in dense(10, -2.0, 2.0), flip in proptest::collection::vec(any::<bool>(), 10)) {
        let a = gen_random_hplus(n, seed, 0.7).unwrap().map_values(|i, _, v| if flip[i] { -v } else { v });
        prop_assert!(is_sdd(&a));
        let e = DenseMatrix::from_rows(&(0..n).map(|i| e.row(i)[..n].to_vec()).collect::<Vec<_>>());
        let lhs = dense_inverse(&a, 10).unwrap().matmul(&e).norm_inf();
        let rowsum = a.comparison().matvec(&vec![1.0; n]).unwrap();
        let bound = (0..n).map(|i| e.row(i).iter().map(|v| v.abs()).sum::<f64>() / rowsum[i]).fold(0.0, f64::max);
        prop_assert!(lhs <= bound + 1e-10);
    }

    #[test]
    fn sdd_with_positive_diagonal_is_h_plus(seed in any::<u64>(), n in 1usize..=12, density in 0.05f64..=1.0) {
        let a = gen_random_hplus(n, seed, density).unwrap();
        prop_assert!(is_sdd(&a));
        prop_assert!(is_h_plus_matrix(&a));
        let c = classify(&a, 200);
        prop_assert_eq!(c.h_plus, Some(true));
        prop_assert_eq!(c.m_matrix, Some(is_z_matrix(&a)));
        // An sdd matrix with positive diagonal is a P-matrix.
        prop_assert!(is_p_matrix(&a).unwrap());
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 1usize..=8, c in prop_oneof![Just(0.0), Just(0.1), Just(0.3)]) {
        let x = gen_random_instance(n, seed, 0.5, c).unwrap();
        let y = gen_random_instance(n, seed, 0.5, c).unwrap();
        prop_assert_eq!(&x.problem, &y.problem);
        prop_assert_eq!(&x.zstar, &y.zstar);
        prop_assert!(x.problem.is_solution(&x.zstar, 1e-12));
        let mut r1 = Lcg::new(seed);
        let mut r2 = Lcg::new(seed);
        for _ in 0..16 {
            prop_assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }

    #[test]
    fn residual_vanishes_exactly_on_solutions(seed in any::<u64>(), n in 1usize..=8, i in 0usize..8, delta in 1e-3f64..1.0) {
        let inst = gen_random_instance(n, seed, 0.5, 0.1).unwrap();
        let p = &inst.problem;
        prop_assert!(p.residual(&inst.zstar).unwrap().value() < 1e-12);
        prop_assert!(p.is_solution(&inst.zstar, 1e-12));
        // Pushing one component negative breaks feasibility of z − ζ(z).
        let mut z = inst.zstar.clone();
        let i = i % n;
        z[i] = -delta;
        let r = p.residual(&z).unwrap().value();
        prop_assert!(r > 0.0);
        prop_assert!(!p.is_solution(&z, 0.5 * r / (n as f64).sqrt()));
    }

    #[test]
    fn oracle_solutions_are_solutions(seed in any::<u64>(), n in 1usize..=6) {
        let inst = gen_random_instance(n, seed, 0.5, 0.3).unwrap();
        let tol = 1e-9;
        for z in enumerate_icp(&inst.problem, tol).unwrap() {
            prop_assert!(inst.problem.is_solution(&z, 10.0 * tol));
        }
    }

    #[test]
    fn p_matrix_lcp_has_unique_solution(seed in any::<u64>(), n in 1usize..=7, q in proptest::collection::vec(-3.0f64..3.0, 7)) {
        let a = gen_random_hplus(n, seed, 0.5).unwrap();
        prop_assert!(is_p_matrix(&a).unwrap());
        let p = IcpProblem::lcp(a, q[..n].to_vec()).unwrap();
        let sols = enumerate_icp(&p, 1e-9).unwrap();
        prop_assert_eq!(sols.len(), 1);
        prop_assert_eq!(oracle_unique_solution(&p).unwrap(), sols[0].clone());
    }

    #[test]
    fn certificate_ordering(seed in any::<u64>(), n in 2usize..=8, phi in 0.0f64..1.0, omega2_is_diag in any::<bool>()) {
        let inst = gen_random_instance(n, seed, 0.5, 0.1).unwrap();
        let p = &inst.problem;
        let mut cfg = SolverConfig::new(n);
        cfg.phi = DiagonalMatrix::scalar(n, phi);
        if omega2_is_diag {
            cfg.omega2 = DiagonalMatrix::new(p.a().diagonal());
        }
        let sp = build_splitting(p.a(), cfg.scheme).unwrap();
        let certs = all_certificates(p, &cfg, &sp).unwrap();
        let t = certs[0].quantity;
        let l = certs[1].quantity;
        prop_assert!(t <= l + 1e-10, "rho(T) = {} > rho(Lbar) = {}", t, l);
    }

    #[test]
    fn splitting_reproduces_a(seed in any::<u64>(), n in 1usize..=8, alpha in 0.1f64..2.0, beta in -1.0f64..2.0) {
        let a = gen_random_hplus(n, seed, 0.5).unwrap();
        for scheme in [SplittingScheme::Aor { alpha, beta }, SplittingScheme::Sor { alpha }, SplittingScheme::GaussSeidel, SplittingScheme::Jacobi, SplittingScheme::FullM] {
            let sp = build_splitting(&a, scheme).unwrap();
            let diff = sp.m.sub(&sp.n).unwrap().sub(&a).unwrap();
            prop_assert!(diff.values().iter().all(|v| v.abs() <= 1e-12 * (1.0 + a.norm_inf())));
        }
    }

    #[test]
    fn converged_runs_satisfy_stopping_rule(seed in any::<u64>(), n in 1usize..=8) {
        let inst = gen_random_instance(n, seed, 0.5, 0.3).unwrap();
        let cfg = SolverConfig::new(n).with_eps(1e-10);
        let r = solve_icp(&inst.problem, &cfg, None).unwrap();
        prop_assert!(r.residuals.iter().all(|v| v.is_finite()));
        if r.status == icp_core::SolveStatus::Converged {
            prop_assert!(r.final_residual() < cfg.eps);
            prop_assert!(inst.problem.is_solution(&r.z, 10.0 * cfg.eps));
        }
    }
}
