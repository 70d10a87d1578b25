//! `icp`: solve problem bundles, check convergence certificates, generate
//! corpora and benchmark splitting schemes.
//!
//! Exit codes: 0 success (or converged), 1 invalid input or other error,
//! 2 `solve` hit the outer iteration limit, 3 `solve` hit an inner solver
//! failure.

mod bench;
mod params;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use icp_core::convergence::{all_certificates, classify, Certificate, MatrixClasses};
use icp_core::generators::{gen_known_solution, gen_laplacian2d, gen_random_hplus, gen_tridiag, Lcg};
use icp_core::matrix::DEFAULT_SMALL_N;
use icp_core::oracle::{enumerate_icp_detailed, ORACLE_TOL};
use icp_core::{build_splitting, solve_icp, IcpError, ImplicitMap, ProblemBundle, SolveStatus, SparseMatrix};

use params::SolveFlags;

#[derive(Parser)]
#[command(name = "icp", version, about = "Modulus-based splitting solvers for implicit complementarity problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem bundle and write a JSON report.
    Solve {
        bundle: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Report file; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate matrix classes and convergence certificates.
    Check {
        bundle: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Also enumerate all solutions by brute force (n ≤ 12).
        #[arg(long)]
        oracle: bool,
        /// JSON output file; a text summary is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every (bundle, scheme, grid point) cell of a corpus.
    Bench(bench::BenchArgs),
    /// Write a generated problem bundle.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tridiag,
    Lap2d,
    RandomHplus,
    KnownSolution,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
    /// Dimension (tridiag, random-hplus, known-solution).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Grid side for lap2d (n = m²).
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    diag: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    off: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Off-diagonal density for random matrices.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// ζ(z) = c·z for known-solution bundles.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share code 1 with other invalid input; 2 is reserved.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<u8, IcpError> {
    match cmd {
        Command::Solve { bundle, flags, out } => cmd_solve(&bundle, &flags, out.as_deref()),
        Command::Check {
            bundle,
            flags,
            oracle,
            out,
        } => cmd_check(&bundle, &flags, oracle, out.as_deref()),
        Command::Bench(args) => bench::cmd_bench(&args),
        Command::Gen(args) => cmd_gen(&args),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), IcpError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| IcpError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(bundle: &Path, flags: &SolveFlags, out: Option<&Path>) -> Result<u8, IcpError> {
    let b = ProblemBundle::read(bundle)?;
    let p = &b.problem;
    let cfg = flags.config(p.n())?;
    let x0 = flags.x0(p.n());
    let report = solve_icp(p, &cfg, x0.as_deref())?;
    write_or_print(out, &report.to_json())?;
    eprintln!(
        "{:?}: {} iterations, residual {:.3e}",
        report.status,
        report.iterations,
        report.final_residual()
    );
    Ok(match report.status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIters => 2,
        SolveStatus::InnerFailure => 3,
    })
}

/// Bound on `n` for dense certificate work, overridable by `ICP_CERT_MAX_N`.
fn cert_limit() -> Result<usize, IcpError> {
    match std::env::var("ICP_CERT_MAX_N") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| IcpError::InvalidArgument(format!("ICP_CERT_MAX_N must be a count, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SMALL_N),
    }
}

#[derive(Serialize)]
struct CheckOutput {
    scheme: String,
    classes: MatrixClasses,
    certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_solutions: Option<Vec<Vec<f64>>>,
}

fn cmd_check(bundle: &Path, flags: &SolveFlags, oracle: bool, out: Option<&Path>) -> Result<u8, IcpError> {
    let b = ProblemBundle::read(bundle)?;
    let p = &b.problem;
    let mut cfg = flags.config(p.n())?;
    cfg.dense_max_n = cert_limit()?;
    let classes = classify(p.a(), cfg.dense_max_n);
    println!("n = {}, nnz = {}, scheme = {}", classes.n, classes.nnz, cfg.scheme);
    print_classes(&classes);

    let certificates = match build_splitting(p.a(), cfg.scheme) {
        Ok(sp) => all_certificates(p, &cfg, &sp)?,
        Err(e) => {
            println!("certificates skipped: {e}");
            Vec::new()
        }
    };
    for c in &certificates {
        println!("{c}");
    }
    let oracle_solutions = if oracle {
        let e = enumerate_icp_detailed(p, ORACLE_TOL)?;
        println!("oracle: {} solution(s), {} singular active-set system(s)", e.solutions.len(), e.singular_subsets.len());
        for z in &e.solutions {
            println!("  z = {}", params::format_vec(z));
        }
        Some(e.solutions)
    } else {
        None
    };
    if let Some(path) = out {
        let output = CheckOutput {
            scheme: cfg.scheme.to_string(),
            classes,
            certificates,
            oracle_solutions,
        };
        let json = serde_json::to_string_pretty(&output).map_err(|e| IcpError::Io(e.to_string()))?;
        write_or_print(Some(path), &json)?;
    }
    Ok(0)
}

fn print_classes(c: &MatrixClasses) {
    let show = |v: Option<bool>| v.map_or_else(|| "skipped".to_string(), |b| b.to_string());
    println!("is_sdd = {}", c.sdd);
    println!("is_z_matrix = {}", c.z_matrix);
    println!("is_m_matrix = {}", show(c.m_matrix));
    println!("is_h_plus_matrix = {}", show(c.h_plus));
    println!("is_p_matrix = {}", show(c.p_matrix));
    println!("symmetric = {}", c.symmetric);
}

fn cmd_gen(args: &GenArgs) -> Result<u8, IcpError> {
    if args.n == 0 || args.m == 0 {
        return Err(IcpError::InvalidArgument("dimensions must be positive".into()));
    }
    let a = match args.family {
        Family::Tridiag => gen_tridiag(args.n, args.off, args.diag),
        Family::Lap2d => gen_laplacian2d(args.m),
        Family::RandomHplus | Family::KnownSolution => gen_random_hplus(args.n, args.seed, args.density)?,
    };
    let c = match args.family {
        Family::KnownSolution => args.c,
        _ => 0.0,
    };
    let bundle = known_solution_bundle(a, args.seed, c)?;
    bundle.write(&args.out)?;
    let p = &bundle.problem;
    let zstar = bundle.zstar.as_deref().expect("generated with a solution");
    println!("wrote {} (n = {})", args.out.display(), p.n());
    print_classes(&classify(p.a(), cert_limit()?));
    println!("zstar passes is_solution(1e-12) = {}", p.is_solution(zstar, 1e-12));
    Ok(0)
}

/// Bundle around `a` with a seeded solution: each component is active
/// (zero) with probability ½, otherwise uniform in `[0.5, 2)`. `ζ(z) = c·z`.
fn known_solution_bundle(a: SparseMatrix, seed: u64, c: f64) -> Result<ProblemBundle, IcpError> {
    if c.partial_cmp(&1.0) != Some(std::cmp::Ordering::Less) {
        return Err(IcpError::InvalidArgument(format!("need c < 1, got {c}")));
    }
    let n = a.n();
    let mut rng = Lcg::new(seed.wrapping_add(1));
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
    let p = gen_known_solution(&a, &zstar, &active, zeta)?;
    Ok(ProblemBundle::new(p).with_zstar(zstar))
}
