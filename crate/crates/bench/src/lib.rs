//! Benchmark fixtures shared by the criterion benches.

use icp_core::generators::{gen_known_solution, gen_laplacian2d, gen_tridiag};
use icp_core::{IcpProblem, ImplicitMap};

/// LCP on `gen_tridiag(n, −1, 4)` whose solution alternates between an
/// active zero and the value 1.
pub fn tridiag_lcp(n: usize) -> IcpProblem {
    let a = gen_tridiag(n, -1.0, 4.0);
    known(a)
}

/// LCP on the `m × m` five-point Laplacian with the same solution pattern.
pub fn laplacian_lcp(m: usize) -> IcpProblem {
    known(gen_laplacian2d(m))
}

fn known(a: icp_core::SparseMatrix) -> IcpProblem {
    let n = a.n();
    let zstar: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
    let active: Vec<usize> = (0..n).step_by(2).collect();
    gen_known_solution(&a, &zstar, &active, ImplicitMap::zero(n)).expect("valid construction")
}
