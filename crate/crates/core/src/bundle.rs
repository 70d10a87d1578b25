//! Problem bundles on disk.
//!
//! A bundle is a directory holding Matrix Market files:
//!
//! | file        | content                          | required |
//! |-------------|----------------------------------|----------|
//! | `A.mtx`     | system matrix                    | yes      |
//! | `q.mtx`     | right-hand side vector           | yes      |
//! | `C.mtx`     | linear part of `ζ(z) = Cz + d`   | no (0)   |
//! | `d.mtx`     | constant part of `ζ`             | no (0)   |
//! | `psi.mtx`   | Lipschitz matrix                 | no (`|C|`) |
//! | `zstar.mtx` | known solution                   | no       |
//!
//! Without `C`, `d` and `psi` the problem is an LCP.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::matrix::{mtx, SparseMatrix};
use crate::problem::{IcpProblem, ImplicitMap};

/// A problem plus an optional reference solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBundle {
    pub problem: IcpProblem,
    pub zstar: Option<Vec<f64>>,
}

impl ProblemBundle {
    pub fn new(problem: IcpProblem) -> Self {
        ProblemBundle { problem, zstar: None }
    }

    pub fn with_zstar(mut self, zstar: Vec<f64>) -> Self {
        self.zstar = Some(zstar);
        self
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let a = mtx::read_sparse(dir.join("A.mtx"))?;
        let n = a.n();
        let q = mtx::read_vector(dir.join("q.mtx"))?;
        let opt = |name: &str| {
            let path = dir.join(name);
            path.exists().then_some(path)
        };
        let c = opt("C.mtx").map(mtx::read_sparse).transpose()?;
        let d = opt("d.mtx").map(mtx::read_vector).transpose()?;
        let psi = opt("psi.mtx").map(mtx::read_sparse).transpose()?;
        let zeta = if c.is_none() && d.is_none() && psi.is_none() {
            ImplicitMap::zero(n)
        } else {
            let c = c.unwrap_or_else(|| SparseMatrix::zeros(n));
            let d = d.unwrap_or_else(|| vec![0.0; n]);
            match psi {
                Some(psi) => ImplicitMap::with_lipschitz(c, d, psi)?,
                None => ImplicitMap::affine(c, d)?,
            }
        };
        let problem = IcpProblem::new(a, q, zeta)?;
        let zstar = opt("zstar.mtx").map(mtx::read_vector).transpose()?;
        if let Some(z) = &zstar {
            crate::matrix::check_len(n, z.len())?;
        }
        Ok(ProblemBundle { problem, zstar })
    }

    /// Writes every file; `C`, `d`, `psi` only when `ζ` is not zero.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let p = &self.problem;
        mtx::write_sparse(dir.join("A.mtx"), p.a())?;
        mtx::write_vector(dir.join("q.mtx"), p.q())?;
        let zeta = p.zeta();
        for name in ["C.mtx", "d.mtx", "psi.mtx", "zstar.mtx"] {
            let path = dir.join(name);
            if path.exists() {
                fs::remove_file(path)?;
            }
        }
        if !zeta.is_zero() || zeta.psi().nnz() > 0 {
            mtx::write_sparse(dir.join("C.mtx"), zeta.c())?;
            mtx::write_vector(dir.join("d.mtx"), zeta.d())?;
            mtx::write_sparse(dir.join("psi.mtx"), zeta.psi())?;
        }
        if let Some(z) = &self.zstar {
            mtx::write_vector(dir.join("zstar.mtx"), z)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random_instance, gen_tridiag};

    #[test]
    fn lcp_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = IcpProblem::lcp(gen_tridiag(3, -1.0, 4.0), vec![-1.0, 2.0, -3.0]).unwrap();
        let b = ProblemBundle::new(p).with_zstar(vec![0.5, 0.0, 1.0]);
        b.write(dir.path()).unwrap();
        assert!(!dir.path().join("C.mtx").exists());
        assert_eq!(ProblemBundle::read(dir.path()).unwrap(), b);
    }

    #[test]
    fn icp_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = gen_random_instance(5, 3, 0.5, 0.3).unwrap();
        let b = ProblemBundle::new(inst.problem).with_zstar(inst.zstar);
        b.write(dir.path()).unwrap();
        assert_eq!(ProblemBundle::read(dir.path()).unwrap(), b);
    }

    #[test]
    fn missing_files_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(ProblemBundle::read(dir.path()).is_err());
        mtx::write_sparse(dir.path().join("A.mtx"), &SparseMatrix::identity(2)).unwrap();
        assert!(ProblemBundle::read(dir.path()).is_err());
        mtx::write_vector(dir.path().join("q.mtx"), &[1.0, 2.0, 3.0]).unwrap();
        assert!(ProblemBundle::read(dir.path()).is_err());
        mtx::write_vector(dir.path().join("q.mtx"), &[1.0, 2.0]).unwrap();
        assert!(ProblemBundle::read(dir.path()).is_ok());
    }
}
