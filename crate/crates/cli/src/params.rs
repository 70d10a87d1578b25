//! Solver flags shared by `solve`, `check` and `bench`.

use clap::Args;

use icp_core::generators::Lcg;
use icp_core::matrix::mtx;
use icp_core::{DiagonalMatrix, IcpError, SolverConfig, SplittingScheme};

#[derive(Args, Clone, Debug)]
pub struct SolveFlags {
    /// fullm | jacobi | gs | sor:<alpha> | aor:<alpha>,<beta>
    #[arg(long, default_value = "gs")]
    pub scheme: SplittingScheme,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_outer: usize,
    /// Scalar s (meaning s·I) or a Matrix Market diagonal file.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub omega1: String,
    /// Scalar s (meaning s·I) or a Matrix Market diagonal file.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub omega2: String,
    /// Scalar s (meaning s·I) or a Matrix Market diagonal file.
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    pub phi: String,
    /// Start from a seeded x⁽⁰⁾ uniform in [−1, 1) instead of zero.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SolveFlags {
    pub fn config(&self, n: usize) -> Result<SolverConfig, IcpError> {
        let mut cfg = SolverConfig::new(n).with_scheme(self.scheme).with_eps(self.eps);
        cfg.gamma = self.gamma;
        cfg.max_outer = self.max_outer;
        cfg.omega1 = diagonal_arg(&self.omega1, n)?;
        cfg.omega2 = diagonal_arg(&self.omega2, n)?;
        cfg.phi = diagonal_arg(&self.phi, n)?;
        cfg.validate(n)?;
        Ok(cfg)
    }

    pub fn x0(&self, n: usize) -> Option<Vec<f64>> {
        self.seed.map(|s| {
            let mut rng = Lcg::new(s);
            (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
        })
    }
}

/// A scalar promotes to `s·I`; anything else is read as a diagonal file.
pub fn diagonal_arg(arg: &str, n: usize) -> Result<DiagonalMatrix, IcpError> {
    if let Ok(s) = arg.trim().parse::<f64>() {
        return Ok(DiagonalMatrix::scalar(n, s));
    }
    let d = mtx::read_diagonal(arg)?;
    if d.n() != n {
        return Err(IcpError::DimensionMismatch { expected: n, found: d.n() });
    }
    Ok(d)
}

pub fn format_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("[{}]", parts.join(", "))
}
