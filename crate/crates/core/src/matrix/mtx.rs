//! Matrix Market reader and writer.
//!
//! Matrices use the `coordinate real general` format (1-based indices), vectors
//! the `array real general` format with a single column. Values are written
//! with 17 significant digits so a write/read cycle reproduces every `f64`.
//! The reader also accepts `integer` fields, `symmetric` storage (mirrored on
//! load) and single-column coordinate files for vectors.

use std::fs;
use std::path::Path;

use crate::error::{IcpError, Result};
use crate::matrix::{DiagonalMatrix, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(IcpError::Parse(format!("bad Matrix Market banner: {line:?}")));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(IcpError::Parse(format!("unsupported layout {other:?}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(IcpError::Parse(format!("unsupported field {other:?}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(IcpError::Parse(format!("unsupported symmetry {other:?}"))),
    };
    Ok(Header { layout, symmetry })
}

/// Non-comment, non-blank lines after the banner.
fn body_lines(text: &str) -> Result<(Header, Vec<&str>)> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| IcpError::Parse("empty file".into()))?;
    let header = parse_header(banner)?;
    let body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
        .collect();
    Ok((header, body))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| IcpError::Parse(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| IcpError::Parse(format!("cannot parse {what} from {tok:?}")))
}

fn parse_size_line(line: &str, expected: usize) -> Result<Vec<usize>> {
    let mut it = line.split_whitespace();
    let out = (0..expected)
        .map(|k| parse_num::<usize>(it.next(), &format!("size field {k}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(out)
}

/// Parses a square sparse matrix.
pub fn parse_sparse(text: &str) -> Result<SparseMatrix> {
    let (header, body) = body_lines(text)?;
    let (size, entries) = body
        .split_first()
        .ok_or_else(|| IcpError::Parse("missing size line".into()))?;
    match header.layout {
        Layout::Coordinate => {
            let dims = parse_size_line(size, 3)?;
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            if rows != cols {
                return Err(IcpError::Parse(format!("matrix must be square, got {rows}x{cols}")));
            }
            if entries.len() != nnz {
                return Err(IcpError::Parse(format!(
                    "declared {nnz} entries, found {}",
                    entries.len()
                )));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            for line in entries {
                let mut it = line.split_whitespace();
                let i: usize = parse_num(it.next(), "row index")?;
                let j: usize = parse_num(it.next(), "column index")?;
                let v: f64 = parse_num(it.next(), "value")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(IcpError::Parse(format!("index ({i}, {j}) out of range")));
                }
                triplets.push((i - 1, j - 1, v));
                if header.symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
            SparseMatrix::from_triplets(rows, triplets)
        }
        Layout::Array => {
            let dims = parse_size_line(size, 2)?;
            let (rows, cols) = (dims[0], dims[1]);
            if rows != cols {
                return Err(IcpError::Parse(format!("matrix must be square, got {rows}x{cols}")));
            }
            let vals = entries
                .iter()
                .map(|l| parse_num::<f64>(Some(l), "value"))
                .collect::<Result<Vec<_>>>()?;
            let n = rows;
            let mut triplets = Vec::new();
            match header.symmetry {
                Symmetry::General => {
                    if vals.len() != n * n {
                        return Err(IcpError::Parse(format!("expected {} values, found {}", n * n, vals.len())));
                    }
                    // column-major
                    for j in 0..n {
                        for i in 0..n {
                            triplets.push((i, j, vals[j * n + i]));
                        }
                    }
                }
                Symmetry::Symmetric => {
                    if vals.len() != n * (n + 1) / 2 {
                        return Err(IcpError::Parse("wrong number of symmetric array values".into()));
                    }
                    let mut k = 0;
                    for j in 0..n {
                        for i in j..n {
                            triplets.push((i, j, vals[k]));
                            if i != j {
                                triplets.push((j, i, vals[k]));
                            }
                            k += 1;
                        }
                    }
                }
            }
            SparseMatrix::from_triplets(n, triplets)
        }
    }
}

/// Parses a dense vector (array `n x 1`, or coordinate `n x 1`).
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let (header, body) = body_lines(text)?;
    let (size, entries) = body
        .split_first()
        .ok_or_else(|| IcpError::Parse("missing size line".into()))?;
    match header.layout {
        Layout::Array => {
            let dims = parse_size_line(size, 2)?;
            if dims[1] != 1 {
                return Err(IcpError::Parse(format!("vector must have one column, got {}", dims[1])));
            }
            if entries.len() != dims[0] {
                return Err(IcpError::Parse(format!(
                    "declared {} values, found {}",
                    dims[0],
                    entries.len()
                )));
            }
            entries.iter().map(|l| parse_num(Some(l), "value")).collect()
        }
        Layout::Coordinate => {
            let dims = parse_size_line(size, 3)?;
            if dims[1] != 1 {
                return Err(IcpError::Parse(format!("vector must have one column, got {}", dims[1])));
            }
            let mut out = vec![0.0; dims[0]];
            for line in entries {
                let mut it = line.split_whitespace();
                let i: usize = parse_num(it.next(), "row index")?;
                let j: usize = parse_num(it.next(), "column index")?;
                let v: f64 = parse_num(it.next(), "value")?;
                if i == 0 || i > dims[0] || j != 1 {
                    return Err(IcpError::Parse(format!("index ({i}, {j}) out of range")));
                }
                out[i - 1] += v;
            }
            Ok(out)
        }
    }
}

/// Parses a diagonal: either a vector file or a square matrix whose
/// off-diagonal entries are all zero.
pub fn parse_diagonal(text: &str) -> Result<DiagonalMatrix> {
    if let Ok(v) = parse_vector(text) {
        return Ok(DiagonalMatrix::new(v));
    }
    let m = parse_sparse(text)?;
    if m.triplets().any(|(i, j, _)| i != j) {
        return Err(IcpError::Parse("diagonal matrix file has off-diagonal entries".into()));
    }
    Ok(DiagonalMatrix::new(m.diagonal()))
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_sparse(m: &SparseMatrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    s.push_str(&format!("{} {} {}\n", m.n(), m.n(), m.nnz()));
    for (i, j, v) in m.triplets() {
        s.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_value(v)));
    }
    s
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    s.push_str(&format!("{} 1\n", v.len()));
    for x in v {
        s.push_str(&fmt_value(*x));
        s.push('\n');
    }
    s
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| IcpError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| IcpError::Io(format!("{}: {e}", path.display())))
}

pub fn read_sparse(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    parse_sparse(&read(path)?).map_err(|e| annotate(e, path))
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_vector(&read(path)?).map_err(|e| annotate(e, path))
}

pub fn read_diagonal(path: impl AsRef<Path>) -> Result<DiagonalMatrix> {
    let path = path.as_ref();
    parse_diagonal(&read(path)?).map_err(|e| annotate(e, path))
}

pub fn write_sparse(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    write(path.as_ref(), &format_sparse(m))
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    write(path.as_ref(), &format_vector(v))
}

fn annotate(e: IcpError, path: &Path) -> IcpError {
    match e {
        IcpError::Parse(msg) => IcpError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}
