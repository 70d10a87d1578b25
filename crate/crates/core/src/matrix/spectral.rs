//! Perron root of nonnegative matrices and matrix 2-norms by power iteration.

use crate::error::{IcpError, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};

/// Minimal shift added to the diagonal before iterating.
pub const SHIFT_EPS: f64 = 1e-12;

/// Anything that can be applied to a vector.
pub trait MatVec {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn is_nonnegative(&self) -> bool;
    fn norm_inf(&self) -> f64;
    fn norm_one(&self) -> f64;
}

impl MatVec for DenseMatrix {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y)
    }
    fn is_nonnegative(&self) -> bool {
        DenseMatrix::is_nonnegative(self)
    }
    fn norm_inf(&self) -> f64 {
        DenseMatrix::norm_inf(self)
    }
    fn norm_one(&self) -> f64 {
        DenseMatrix::norm_one(self)
    }
}

impl MatVec for SparseMatrix {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y)
    }
    fn is_nonnegative(&self) -> bool {
        SparseMatrix::is_nonnegative(self)
    }
    fn norm_inf(&self) -> f64 {
        SparseMatrix::norm_inf(self)
    }
    fn norm_one(&self) -> f64 {
        self.transpose().norm_inf()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            max_iter: 50_000,
        }
    }
}

/// Result of a power iteration. `converged == false` means `value` is the
/// best estimate available after `max_iter` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Spectral radius of an entrywise nonnegative matrix.
///
/// Iterates on `A + σI`, started from the all-ones vector, with
/// `σ = 1e-12 + ½·min(‖A‖_∞, ‖A‖_1)`. For nonnegative `A` the Perron root
/// moves to `ρ(A) + σ` and becomes the unique eigenvalue of maximal modulus,
/// so cyclic matrices (eigenvalues `±ρ`) no longer stall. The estimate is the
/// Rayleigh quotient minus `σ`. Iteration stops once the extrapolated error
/// `Δ_k / (1 - r_k)` (with `r_k = Δ_k / Δ_{k-1}`) drops below `tol` relative,
/// or the Collatz–Wielandt bracket closes to the same tolerance.
pub fn spectral_radius_nonneg<M: MatVec + ?Sized>(a: &M, opts: PowerOptions) -> Result<SpectralEstimate> {
    if !a.is_nonnegative() {
        return Err(IcpError::Contract("spectral_radius_nonneg requires a nonnegative matrix".into()));
    }
    let n = a.dim();
    if n == 0 {
        return Ok(SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let bound = a.norm_inf().min(a.norm_one());
    if bound == 0.0 {
        return Ok(SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let shift = SHIFT_EPS + 0.5 * bound;

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut prev_delta = f64::NAN;
    let mut estimate = 0.0;
    for it in 1..=opts.max_iter {
        a.apply(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        // x is unit-norm, so the Rayleigh quotient is x·y.
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        estimate = rq - shift;

        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for (yi, xi) in y.iter().zip(&x) {
            if *xi > 0.0 {
                let r = yi / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            } else {
                lo = 0.0;
                hi = f64::INFINITY;
            }
        }
        let scale = estimate.abs().max(f64::MIN_POSITIVE);
        if hi.is_finite() && hi - lo <= opts.tol * scale {
            return Ok(SpectralEstimate {
                value: (0.5 * (lo + hi) - shift).max(0.0),
                iterations: it,
                converged: true,
            });
        }

        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }

        if prev.is_finite() {
            let delta = (estimate - prev).abs();
            let ratio = if prev_delta > 0.0 { (delta / prev_delta).min(0.999) } else { 0.0 };
            if delta == 0.0 || delta / (1.0 - ratio) <= opts.tol * scale {
                return Ok(SpectralEstimate {
                    value: estimate.max(0.0),
                    iterations: it,
                    converged: true,
                });
            }
            prev_delta = delta;
        }
        prev = estimate;
    }
    Ok(SpectralEstimate {
        value: estimate.max(0.0),
        iterations: opts.max_iter,
        converged: false,
    })
}

/// Largest singular value `‖G‖₂ = sqrt(λ_max(GᵀG))` by power iteration on
/// the symmetric positive semidefinite `GᵀG`.
pub fn norm2(g: &DenseMatrix, opts: PowerOptions) -> SpectralEstimate {
    let n = g.n();
    if n == 0 || g.data().iter().all(|&v| v == 0.0) {
        return SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let gtg = g.transpose().matmul(g);
    // Start from the dominant column direction of GᵀG, plus a generic
    // component so no eigenvector is orthogonal to the start.
    let mut x: Vec<f64> = (0..n)
        .map(|i| gtg[(i, i)].sqrt() + 1e-3 * (1.0 + i as f64 / n as f64))
        .collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut lambda = 0.0;
    for it in 1..=opts.max_iter {
        gtg.matvec_into(&x, &mut y);
        lambda = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if prev.is_finite() && (lambda - prev).abs() <= opts.tol * lambda.abs() {
            return SpectralEstimate {
                value: lambda.max(0.0).sqrt(),
                iterations: it,
                converged: true,
            };
        }
        prev = lambda;
    }
    SpectralEstimate {
        value: lambda.max(0.0).sqrt(),
        iterations: opts.max_iter,
        converged: false,
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
