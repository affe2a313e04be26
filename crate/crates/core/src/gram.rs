//! Random Gram matrices: the full `n x n` matrix `B_n` with entries
//! `(1/n) K(X_i, X_j)`, its truncated `n x N` sub-matrix `A_N`, their
//! descending spectra, trace tails, the statistical dimension, and the
//! singular-value interlacing check `mu_i(A_N) <= lam_i(B_n)`.
//!
//! Storage is dense throughout; the kernels here have no sparsity and sample
//! counts stay at desk scale.

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Point};
use crate::spectral::{EigenvalueTable, SpectrumSource};
use nalgebra::DMatrix;

/// Eigenvalues at least this negative (relative to `kappa_1`) indicate a
/// genuinely non-PSD matrix rather than roundoff.
const PSD_CLAMP_RELATIVE: f64 = 1e-10;

/// The full scaled Gram matrix `B_n`.
#[derive(Debug, Clone)]
pub struct GramFull {
    entries: DMatrix<f64>,
    samples: Vec<Point>,
    kappa1: f64,
}

/// The first `N` columns of `B_n`.
#[derive(Debug, Clone)]
pub struct GramTruncated {
    entries: DMatrix<f64>,
    kappa1: f64,
}

impl GramFull {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    /// `(1/n) sum_i K(X_i, X_i)`, equal to the eigenvalue sum.
    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }
}

impl GramTruncated {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_trunc(&self) -> usize {
        self.entries.ncols()
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }
}

fn check_samples(kernel: &KernelSpec, samples: &[Point]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::invalid("need at least one sample"));
    }
    let d = kernel.dim();
    for p in samples {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(())
}

/// Builds `B_n` with entries `(1/n) K(X_i, X_j)`; the upper triangle is
/// computed and mirrored, so the matrix is symmetric by construction.
pub fn build_full(kernel: &KernelSpec, samples: &[Point]) -> Result<GramFull> {
    check_samples(kernel, samples)?;
    let n = samples.len();
    let scale = 1.0 / n as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = scale * kernel.eval_raw(samples[i].coords(), samples[j].coords());
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(GramFull { entries: m, samples: samples.to_vec(), kappa1: kernel.kappa1() })
}

/// Builds `A_N`, the first `N` columns of `B_n` in sampling order.
pub fn build_truncated(kernel: &KernelSpec, samples: &[Point], n_trunc: usize) -> Result<GramTruncated> {
    check_samples(kernel, samples)?;
    let n = samples.len();
    if n_trunc < 1 || n_trunc > n {
        return Err(Error::invalid(format!("truncation order {n_trunc} outside 1..={n}")));
    }
    let scale = 1.0 / n as f64;
    let mut m = DMatrix::<f64>::zeros(n, n_trunc);
    for i in 0..n {
        for j in 0..n_trunc {
            m[(i, j)] = scale * kernel.eval_raw(samples[i].coords(), samples[j].coords());
        }
    }
    Ok(GramTruncated { entries: m, kappa1: kernel.kappa1() })
}

fn clamp_spectrum(mut eigs: Vec<f64>, kappa1: f64) -> Result<Vec<f64>> {
    let tol = PSD_CLAMP_RELATIVE * kappa1;
    for v in eigs.iter_mut() {
        if *v < 0.0 {
            if *v < -tol {
                return Err(Error::Decomposition(format!(
                    "eigenvalue {v:e} below the PSD roundoff tolerance -{tol:e}"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(eigs)
}

/// All `n` eigenvalues of `B_n`, descending. Negative roundoff values within
/// `1e-10 kappa_1` of zero are clamped to zero.
pub fn eigvals_desc(gram: &GramFull) -> Result<EigenvalueTable> {
    if gram.entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition("Gram matrix has non-finite entries".into()));
    }
    let mut eigs: Vec<f64> =
        gram.entries.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    let eigs = clamp_spectrum(eigs, gram.kappa1)?;
    EigenvalueTable::new(eigs, SpectrumSource::Empirical)
}

/// The `N` singular values of `A_N`, descending, from the symmetric
/// eigendecomposition of `A_N^T A_N` (clamped, then square-rooted).
pub fn singvals_desc(gram: &GramTruncated) -> Result<EigenvalueTable> {
    if gram.entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition("Gram matrix has non-finite entries".into()));
    }
    let gramian = gram.entries.transpose() * &gram.entries;
    let mut eigs: Vec<f64> = gramian.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    // kappa1^2 bounds the squared singular values' scale.
    let eigs = clamp_spectrum(eigs, gram.kappa1 * gram.kappa1)?;
    let svs = eigs.into_iter().map(|v| v.sqrt()).collect();
    EigenvalueTable::new(svs, SpectrumSource::Empirical)
}

/// Tail sum `sum_{j >= k}` of a descending table, 1-based; `k = len + 1`
/// gives 0. Terms accumulate smallest-first.
pub fn trace_tail(table: &EigenvalueTable, k: usize) -> Result<f64> {
    let len = table.len();
    if k < 1 || k > len + 1 {
        return Err(Error::invalid(format!("tail start {k} outside 1..={}", len + 1)));
    }
    Ok(table.values()[k - 1..].iter().rev().sum())
}

/// `sum_j lam_j / (lam_j + lam)`, the effective degrees of freedom of the
/// table at regularization level `lam > 0`.
pub fn statistical_dimension(table: &EigenvalueTable, lam: f64) -> f64 {
    assert!(lam > 0.0, "regularization level must be positive");
    table.values().iter().map(|&v| v / (v + lam)).sum()
}

/// Whether `mu_i <= lam_full_i + tol` for every index of `mu`.
///
/// Always false when `mu` is longer than `lam_full` (nothing to compare
/// against).
pub fn interlacing_holds(mu: &EigenvalueTable, lam_full: &EigenvalueTable, tol: f64) -> bool {
    if mu.len() > lam_full.len() {
        return false;
    }
    mu.values().iter().zip(lam_full.values()).all(|(m, l)| *m <= *l + tol)
}
