//! `bench`: iteration counts, residuals and timings over a corpus.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use icp_core::{solve_icp, DiagonalMatrix, IcpError, ProblemBundle, SolverConfig, SplittingScheme};

#[derive(Args)]
pub struct BenchArgs {
    /// A bundle directory, or a directory of bundle directories.
    corpus: PathBuf,
    /// Scheme to run; repeat for several.
    #[arg(long = "scheme", default_values = ["jacobi", "gs"])]
    schemes: Vec<SplittingScheme>,
    /// Parameter sweep `key=v1,v2,...` over phi, gamma, omega1 or omega2
    /// (scalars); repeated flags form a Cartesian product.
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    max_outer: usize,
    /// Table file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Phi,
    Gamma,
    Omega1,
    Omega2,
}

impl Param {
    fn parse(s: &str) -> Result<Self, IcpError> {
        match s {
            "phi" => Ok(Param::Phi),
            "gamma" => Ok(Param::Gamma),
            "omega1" => Ok(Param::Omega1),
            "omega2" => Ok(Param::Omega2),
            _ => Err(IcpError::InvalidArgument(format!("unknown grid key {s:?}"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Param::Phi => "phi",
            Param::Gamma => "gamma",
            Param::Omega1 => "omega1",
            Param::Omega2 => "omega2",
        }
    }
}

type GridPoint = Vec<(Param, f64)>;

fn expand_grid(entries: &[String]) -> Result<Vec<GridPoint>, IcpError> {
    let mut points: Vec<GridPoint> = vec![Vec::new()];
    for entry in entries {
        let (key, values) = entry
            .split_once('=')
            .ok_or_else(|| IcpError::InvalidArgument(format!("grid entry {entry:?} is not key=values")))?;
        let key = Param::parse(key.trim())?;
        let values: Vec<f64> = values
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| IcpError::InvalidArgument(format!("bad grid values in {entry:?}")))?;
        if values.is_empty() {
            return Err(IcpError::InvalidArgument(format!("empty grid {entry:?}")));
        }
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((key, v));
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Bundles of the corpus in name order.
fn discover(corpus: &Path) -> Result<Vec<PathBuf>, IcpError> {
    if corpus.join("A.mtx").is_file() {
        return Ok(vec![corpus.to_path_buf()]);
    }
    let entries = std::fs::read_dir(corpus).map_err(|e| IcpError::Io(format!("{}: {e}", corpus.display())))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("A.mtx").is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(IcpError::InvalidArgument(format!("no bundles found in {}", corpus.display())));
    }
    Ok(dirs)
}

struct Row {
    problem: String,
    scheme: SplittingScheme,
    point: GridPoint,
    outcome: Result<(String, usize, f64, f64), String>,
}

fn run_cell(bundle: &ProblemBundle, scheme: SplittingScheme, point: &GridPoint, args: &BenchArgs) -> Result<(String, usize, f64, f64), String> {
    let p = &bundle.problem;
    let n = p.n();
    let mut cfg = SolverConfig::new(n).with_scheme(scheme).with_eps(args.eps);
    cfg.max_outer = args.max_outer;
    for &(k, v) in point {
        match k {
            Param::Phi => cfg.phi = DiagonalMatrix::scalar(n, v),
            Param::Gamma => cfg.gamma = v,
            Param::Omega1 => cfg.omega1 = DiagonalMatrix::scalar(n, v),
            Param::Omega2 => cfg.omega2 = DiagonalMatrix::scalar(n, v),
        }
    }
    let r = solve_icp(p, &cfg, None).map_err(|e| e.to_string())?;
    let status = serde_json::to_value(r.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    Ok((status, r.iterations, r.final_residual(), r.elapsed_seconds))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<u8, IcpError> {
    let dirs = discover(&args.corpus)?;
    let points = expand_grid(&args.grid)?;
    let bundles: Vec<(String, ProblemBundle)> = dirs
        .iter()
        .map(|d| {
            let name = d.file_name().map_or_else(|| d.display().to_string(), |s| s.to_string_lossy().into_owned());
            ProblemBundle::read(d).map(|b| (name, b))
        })
        .collect::<Result<_, _>>()?;

    let mut cells = Vec::new();
    for (bi, _) in bundles.iter().enumerate() {
        for &scheme in &args.schemes {
            for point in &points {
                cells.push((bi, scheme, point.clone()));
            }
        }
    }
    // Cells are independent; collect() keeps the input order.
    let rows: Vec<Row> = cells
        .into_par_iter()
        .map(|(bi, scheme, point)| Row {
            problem: bundles[bi].0.clone(),
            scheme,
            outcome: run_cell(&bundles[bi].1, scheme, &point, args),
            point,
        })
        .collect();

    let table = render(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, table).map_err(|e| IcpError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{table}"),
    }
    Ok(0)
}

fn render(rows: &[Row]) -> String {
    let mut out = String::from("problem\tscheme\tparams\tstatus\titerations\tresidual\tseconds\n");
    for r in rows {
        let params = if r.point.is_empty() {
            "-".to_string()
        } else {
            r.point.iter().map(|(k, v)| format!("{}={v}", k.name())).collect::<Vec<_>>().join(";")
        };
        let _ = match &r.outcome {
            Ok((status, it, res, secs)) => writeln!(out, "{}\t{}\t{}\t{}\t{}\t{:.6e}\t{:.6}", r.problem, r.scheme, params, status, it, res, secs),
            Err(e) => writeln!(out, "{}\t{}\t{}\terror: {}\t-\t-\t-", r.problem, r.scheme, params, e),
        };
    }
    out
}
