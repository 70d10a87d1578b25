use std::path::Path;
use std::process::{Command, Output};

use icp_core::generators::{gen_known_solution, gen_tridiag};
use icp_core::matrix::{mtx, SparseMatrix};
use icp_core::{IcpProblem, ImplicitMap, ProblemBundle, SolveReport, SolveStatus};

fn icp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icp")).args(args).output().expect("binary runs")
}

fn icp_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icp"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_lcp(dir: &Path, q: [f64; 2]) {
    let a = gen_tridiag(2, -1.0, 4.0);
    ProblemBundle::new(IcpProblem::lcp(a, q.to_vec()).unwrap()).write(dir).unwrap();
}

#[test]
fn solve_interior_lcp() {
    let dir = tempfile::tempdir().unwrap();
    write_lcp(dir.path(), [-3.0, -3.0]);
    let out = icp(&["solve", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = SolveReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.z.iter().all(|z| (z - 1.0).abs() < 1e-6));

    let report = dir.path().join("report.json");
    let out = icp(&["solve", p(dir.path()), "--scheme", "aor:0.5,0.5", "--out", p(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let r = SolveReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.z.iter().all(|z| (z - 1.0).abs() < 1e-6));
}

#[test]
fn solve_iteration_limit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_lcp(dir.path(), [-4.0, 2.0]);
    let out = icp(&["solve", p(dir.path()), "--max-outer", "1", "--eps", "1e-14"]);
    assert_eq!(out.status.code(), Some(2));
    let r = SolveReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.status, SolveStatus::MaxIters);
    assert_eq!(r.iterations, 1);
}

#[test]
fn malformed_bundle_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = icp(&["solve", p(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    mtx::write_sparse(dir.path().join("A.mtx"), &SparseMatrix::identity(2)).unwrap();
    mtx::write_vector(dir.path().join("q.mtx"), &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(icp(&["solve", p(dir.path())]).status.code(), Some(1));
    assert_eq!(icp(&["check", p(dir.path())]).status.code(), Some(1));

    write_lcp(dir.path(), [-3.0, -3.0]);
    let out = icp(&["solve", p(dir.path()), "--scheme", "aor:0,1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = icp(&["solve", p(dir.path()), "--omega1", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_reports_certificates_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    write_lcp(dir.path(), [-3.0, -3.0]);
    let json = dir.path().join("check.json");
    let out = icp(&["check", p(dir.path()), "--omega2", "4", "--oracle", "--out", p(&json)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("is_h_plus_matrix = true"));
    assert!(text.contains("oracle: 1 solution(s)"));

    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let certs = v["certificates"].as_array().unwrap();
    let t = certs.iter().find(|c| c["name"] == "theorem41_rho_T").unwrap();
    assert!(t["quantity"].as_f64().unwrap() < 1.0);
    assert_eq!(t["satisfied"], true);
    let sols = v["oracle_solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    for z in sols[0].as_array().unwrap() {
        assert!((z.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn check_non_p_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let a = SparseMatrix::from_triplets(2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
    ProblemBundle::new(IcpProblem::lcp(a, vec![0.0, 0.0]).unwrap()).write(dir.path()).unwrap();
    let out = icp(&["check", p(dir.path()), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("is_p_matrix = false"));
    assert!(text.contains("certificates skipped"));
}

#[test]
fn check_over_size_limit_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    write_lcp(dir.path(), [-3.0, -3.0]);
    let out = icp_env(&["check", p(dir.path())], "ICP_CERT_MAX_N", "1");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_families() {
    let root = tempfile::tempdir().unwrap();
    let tri = root.path().join("tri");
    let out = icp(&["gen", "tridiag", "--n", "6", "--out", p(&tri)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("zstar passes is_solution(1e-12) = true"));
    let b = ProblemBundle::read(&tri).unwrap();
    assert_eq!(b.problem.a(), &gen_tridiag(6, -1.0, 4.0));
    assert!(b.problem.is_solution(b.zstar.as_ref().unwrap(), 1e-12));

    let lap = root.path().join("lap");
    assert_eq!(icp(&["gen", "lap2d", "--m", "3", "--out", p(&lap)]).status.code(), Some(0));
    assert_eq!(ProblemBundle::read(&lap).unwrap().problem.n(), 9);

    let ks = root.path().join("ks");
    let out = icp(&["gen", "known-solution", "--n", "5", "--seed", "7", "--c", "0.3", "--out", p(&ks)]);
    assert_eq!(out.status.code(), Some(0));
    let b = ProblemBundle::read(&ks).unwrap();
    assert!(!b.problem.zeta().is_zero());
    assert!(b.problem.is_solution(b.zstar.as_ref().unwrap(), 1e-12));

    let out = icp(&["solve", p(&ks), "--eps", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let r = SolveReport::from_json(&stdout(&out)).unwrap();
    let zstar = b.zstar.unwrap();
    assert!(r.z.iter().zip(&zstar).all(|(a, b)| (a - b).abs() < 1e-6));
}

fn rows(table: &str) -> Vec<Vec<String>> {
    table
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

#[test]
fn bench_single_bundle_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    write_lcp(dir.path(), [-3.0, -3.0]);
    let out = icp(&["bench", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][1], "jacobi");
    assert_eq!(r[1][1], "gs");
    assert!(r.iter().all(|row| row[3] == "converged"));

    let out = icp(&["bench", p(dir.path()), "--scheme", "gs", "--scheme", "sor:1.2", "--grid", "phi=0,0.1,0.2"]);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 6);
    assert_eq!(r[2][2], "phi=0.2");
    assert_eq!(r[3][1], "sor:1.2");
}

#[test]
fn bench_gauss_seidel_beats_jacobi_on_tridiag() {
    let root = tempfile::tempdir().unwrap();
    for n in [20usize, 50] {
        let a = gen_tridiag(n, -1.0, 4.0);
        let zstar: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let active: Vec<usize> = (0..n).step_by(2).collect();
        let p = gen_known_solution(&a, &zstar, &active, ImplicitMap::zero(n)).unwrap();
        ProblemBundle::new(p).with_zstar(zstar).write(root.path().join(format!("tri{n}"))).unwrap();
    }
    let table = root.path().join("bench.tsv");
    let out = icp(&["bench", p(root.path()), "--out", p(&table)]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&std::fs::read_to_string(&table).unwrap());
    assert_eq!(r.len(), 4);
    for pair in r.chunks(2) {
        assert_eq!(pair[0][0], pair[1][0]);
        let jacobi: usize = pair[0][4].parse().unwrap();
        let gs: usize = pair[1][4].parse().unwrap();
        assert!(gs <= jacobi, "{pair:?}");
    }
}

#[test]
fn bench_empty_corpus_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(icp(&["bench", p(dir.path())]).status.code(), Some(1));
    write_lcp(dir.path(), [-3.0, -3.0]);
    assert_eq!(icp(&["bench", p(dir.path()), "--grid", "tau=1"]).status.code(), Some(1));
}
