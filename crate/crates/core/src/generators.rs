//! Reproducible test problems.
//!
//! Random streams come from a 64-bit linear congruential generator
//! `s ← a·s + c (mod 2⁶⁴)` with `a = 6364136223846793005` and
//! `c = 1442695040888963407`, seeded with `s₀ = seed`. A uniform draw in
//! `[0, 1)` is the top 53 bits of the advanced state times `2⁻⁵³`. The
//! stream is fixed so that corpora can be regenerated by any implementation.

use crate::error::{IcpError, Result};
use crate::matrix::SparseMatrix;
use crate::problem::{IcpProblem, ImplicitMap};

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

/// The documented linear congruential stream.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_f64() * bound as f64) as usize).min(bound - 1)
    }
}

/// Constant tridiagonal matrix.
pub fn gen_tridiag(n: usize, off: f64, diag: f64) -> SparseMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, off));
        }
        t.push((i, i, diag));
        if i + 1 < n {
            t.push((i, i + 1, off));
        }
    }
    SparseMatrix::from_triplets(n, t).expect("indices in range")
}

/// Five-point Laplacian on an `m × m` grid (`n = m²`, row-major cells).
pub fn gen_laplacian2d(m: usize) -> SparseMatrix {
    let n = m * m;
    let mut t = Vec::with_capacity(5 * n);
    for r in 0..m {
        for c in 0..m {
            let i = r * m + c;
            t.push((i, i, 4.0));
            if r > 0 {
                t.push((i, i - m, -1.0));
            }
            if c > 0 {
                t.push((i, i - 1, -1.0));
            }
            if c + 1 < m {
                t.push((i, i + 1, -1.0));
            }
            if r + 1 < m {
                t.push((i, i + m, -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, t).expect("indices in range")
}

/// Strictly diagonally dominant matrix with positive diagonal.
///
/// Every off-diagonal position `(i, j)`, row by row, draws `u`; the entry is
/// kept when `u < density` and then gets the value `2v − 1` from the next
/// draw `v`. The diagonal is the absolute off-diagonal row sum plus one.
pub fn gen_random_hplus(n: usize, seed: u64, density: f64) -> Result<SparseMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(IcpError::InvalidArgument(format!("density must lie in (0, 1], got {density}")));
    }
    let mut rng = Lcg::new(seed);
    let mut t = Vec::new();
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            if rng.next_f64() < density {
                let v = 2.0 * rng.next_f64() - 1.0;
                row_sum += v.abs();
                t.push((i, j, v));
            }
        }
        t.push((i, i, row_sum + 1.0));
    }
    SparseMatrix::from_triplets(n, t)
}

/// Problem with a prescribed solution `zstar`.
///
/// Off the active set `q_i = −(A·zstar)_i`, so `(A·zstar + q)_i = 0`; on the
/// active set `(A·zstar + q)_i = 1`. The caller guarantees
/// `(zstar − ζ(zstar))_i = 0` on the active set and `> 0` off it.
pub fn gen_known_solution(a: &SparseMatrix, zstar: &[f64], active: &[usize], zeta: ImplicitMap) -> Result<IcpProblem> {
    let n = a.n();
    crate::matrix::check_len(n, zstar.len())?;
    let mut is_active = vec![false; n];
    for &i in active {
        if i >= n {
            return Err(IcpError::IndexOutOfRange { row: i, col: 0, n });
        }
        is_active[i] = true;
    }
    let az = a.matvec(zstar)?;
    let zeta_z = zeta.apply(zstar)?;
    for i in 0..n {
        let s = zstar[i] - zeta_z[i];
        if is_active[i] && s != 0.0 {
            return Err(IcpError::Contract(format!(
                "active index {i} needs zstar - zeta(zstar) = 0, got {s}"
            )));
        }
        if !is_active[i] && !(s > 0.0) {
            return Err(IcpError::Contract(format!(
                "inactive index {i} needs zstar - zeta(zstar) > 0, got {s}"
            )));
        }
    }
    let q = (0..n).map(|i| if is_active[i] { 1.0 - az[i] } else { -az[i] }).collect();
    IcpProblem::new(a.clone(), q, zeta)
}

/// A random instance of the oracle corpus together with its solution.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub problem: IcpProblem,
    pub zstar: Vec<f64>,
    pub active: Vec<usize>,
}

/// `A = gen_random_hplus(n, seed, density)`, `ζ(z) = c·z`, and a solution
/// whose entries are active (zero) with probability ½ and otherwise uniform
/// in `[0.5, 2)`. The matrix and the solution use independent streams
/// derived from `seed`. Requires `c < 1`.
pub fn gen_random_instance(n: usize, seed: u64, density: f64, c: f64) -> Result<RandomInstance> {
    if !(c < 1.0) {
        return Err(IcpError::InvalidArgument(format!("need c < 1, got {c}")));
    }
    let a = gen_random_hplus(n, seed, density)?;
    let mut rng = Lcg::new(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut zstar = vec![0.0; n];
    let mut active = Vec::new();
    for (i, z) in zstar.iter_mut().enumerate() {
        if rng.next_f64() < 0.5 {
            active.push(i);
        } else {
            *z = rng.uniform(0.5, 2.0);
        }
    }
    let zeta = if c == 0.0 {
        ImplicitMap::zero(n)
    } else {
        ImplicitMap::affine(SparseMatrix::from_diagonal(&vec![c; n]), vec![0.0; n])?
    };
    let problem = gen_known_solution(&a, &zstar, &active, zeta)?;
    Ok(RandomInstance { problem, zstar, active })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{is_h_plus_matrix, is_sdd};

    #[test]
    fn lcg_stream_is_fixed() {
        let mut r = Lcg::new(0);
        assert_eq!(r.next_u64(), LCG_INCREMENT);
        assert_eq!(r.next_u64(), LCG_INCREMENT.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT));
        let mut r = Lcg::new(42);
        for _ in 0..1000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn tridiag_examples() {
        let a2 = SparseMatrix::from_triplets(2, [(0, 0, 4.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 4.0)]).unwrap();
        assert_eq!(gen_tridiag(2, -1.0, 4.0), a2);
        let t3 = gen_tridiag(3, -1.0, 4.0);
        assert_eq!(t3.to_dense().row(1), &[-1.0, 4.0, -1.0]);
        assert_eq!(t3.get(0, 2), 0.0);
        assert_eq!(gen_tridiag(1, -1.0, 7.0), SparseMatrix::from_diagonal(&[7.0]));
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(gen_laplacian2d(1), SparseMatrix::from_diagonal(&[4.0]));
        let l2 = gen_laplacian2d(2);
        assert_eq!(l2.nnz(), 4 + 8);
        assert!(l2.is_symmetric(0.0));
        let l3 = gen_laplacian2d(3);
        assert_eq!(l3.row(4).filter(|&(_, v)| v == -1.0).count(), 4);
        assert!(is_h_plus_matrix(&l3));
    }

    #[test]
    fn known_solution_examples() {
        let a2 = gen_tridiag(2, -1.0, 4.0);
        let p = gen_known_solution(&a2, &[1.0, 1.0], &[], ImplicitMap::zero(2)).unwrap();
        assert_eq!(p.q(), &[-3.0, -3.0]);
        let p = gen_known_solution(&SparseMatrix::from_diagonal(&[2.0]), &[0.0], &[0], ImplicitMap::zero(1)).unwrap();
        assert_eq!(p.q(), &[1.0]);
        let p = gen_known_solution(&a2, &[1.0, 0.0], &[1], ImplicitMap::zero(2)).unwrap();
        assert_eq!(p.q(), &[-4.0, 2.0]);
        assert!(p.is_solution(&[1.0, 0.0], 1e-12));
        assert!(gen_known_solution(&a2, &[1.0, 1.0], &[1], ImplicitMap::zero(2)).is_err());
        assert!(gen_known_solution(&a2, &[1.0, 0.0], &[], ImplicitMap::zero(2)).is_err());
    }

    #[test]
    fn random_hplus_properties() {
        for seed in 0..20 {
            let a = gen_random_hplus(12, seed, 0.4).unwrap();
            assert!(is_sdd(&a));
            assert!(is_h_plus_matrix(&a));
            assert_eq!(a, gen_random_hplus(12, seed, 0.4).unwrap());
        }
        assert!(gen_random_hplus(3, 0, 0.0).is_err());
    }

    #[test]
    fn random_instance_is_solved_by_zstar() {
        for seed in 0..20 {
            for c in [0.0, 0.1, 0.3] {
                let inst = gen_random_instance(6, seed, 0.5, c).unwrap();
                assert!(inst.problem.is_solution(&inst.zstar, 1e-12));
            }
        }
    }
}
