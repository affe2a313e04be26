//! Spectral models of the kernel integral operator: closed forms for the
//! Gaussian kernel, a non-asymptotic upper bound for the Sinc (prolate)
//! eigenvalues, a quadrature (Nystrom) oracle, degrees of freedom, and
//! tensor-product spectra.
//!
//! Conventions worth calling out:
//!
//! * The Sinc integral operator is discretized against Lebesgue measure on
//!   [-1, 1] (no 1/2 density factor). Under this convention the Nystrom
//!   eigenvalues reproduce the classical prolate spheroidal eigenvalues: a
//!   plateau near 1 followed by a super-exponential plunge past `2c/pi`.
//! * [`gaussian_eigenvalue`] uses the leading constant
//!   `sqrt(pi / (xi + c + gamma))`, which is the convention the reference
//!   tables are computed with. [`gaussian_eigenvalue_normalized`] uses
//!   `sqrt(2c / (c + xi + gamma))`, the constant consistent with the
//!   normalized Gaussian measure. Successive-eigenvalue ratios agree across
//!   both conventions, and every selection rule depends only on the ratio.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{gauss_hermite, gauss_legendre};
use crate::sampling::{density, MeasureSpec};
use crate::kernels::Point;
use nalgebra::DMatrix;
use std::collections::HashSet;

/// Provenance of a finite eigenvalue table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    /// Materialized from a closed-form eigenvalue sequence.
    ClosedForm,
    /// Computed by quadrature discretization of the integral operator.
    Nystrom,
    /// Values of an analytic upper bound, not of the spectrum itself.
    Bound,
    /// Spectrum of a sample Gram matrix.
    Empirical,
}

/// A finite, descending list of nonnegative eigenvalues (or singular values).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueTable {
    values: Vec<f64>,
    source: SpectrumSource,
}

impl EigenvalueTable {
    /// Validates ordering and nonnegativity.
    pub fn new(values: Vec<f64>, source: SpectrumSource) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("eigenvalue table must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("eigenvalue table entries must be finite and >= 0"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalue table must be nonincreasing"));
        }
        Ok(EigenvalueTable { values, source })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }
}

/// Decay classification of an eigenvalue sequence.
///
/// `b` and `s` are stored exactly as the selection rules consume them: for an
/// exponential spectrum `b` is the rule parameter (the successive-eigenvalue
/// ratio for the Gaussian closed form, 2 for the Sinc kernel), `onset` the
/// rank from which the decay regime holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel {
    Exponential { b: f64, onset: usize, constant: f64 },
    Polynomial { s: f64, onset: usize, constant: f64 },
}

enum EigenvalueSeq {
    GaussianClosedForm { xi: f64, c: f64, paper_literal: bool },
    Table(EigenvalueTable),
}

/// Eigenvalue sequence of a kernel integral operator together with the
/// eigenfunction sup-norm growth exponent `a` (`||phi_k||_inf <~ k^{a/2}`)
/// and a decay classification.
pub struct SpectralModel {
    eigenvalues: EigenvalueSeq,
    sup_norm_exponent: f64,
    decay: DecayModel,
}

impl SpectralModel {
    /// Closed-form Gaussian spectrum. The eigenfunctions are uniformly
    /// bounded, so `a = 0`; the decay parameter is the reciprocal ratio
    /// `b = (c + xi + gamma) / xi`, geometric from the first eigenvalue.
    pub fn gaussian(xi: f64, c: f64, paper_literal: bool) -> Result<Self> {
        if !(xi > 0.0 && c > 0.0) {
            return Err(Error::invalid("Gaussian spectrum requires xi > 0 and c > 0"));
        }
        let b = gaussian_eigenvalue_ratio(xi, c).recip();
        let lam1 = if paper_literal {
            gaussian_eigenvalue(xi, c, 1)
        } else {
            gaussian_eigenvalue_normalized(xi, c, 1)
        };
        Ok(SpectralModel {
            eigenvalues: EigenvalueSeq::GaussianClosedForm { xi, c, paper_literal },
            sup_norm_exponent: 0.0,
            // lam_k = (lam1 * b) * exp(-ln(b) k) exactly.
            decay: DecayModel::Exponential { b, onset: 1, constant: lam1 * b },
        })
    }

    /// Spectrum backed by a finite table; eigenvalues beyond the table are
    /// treated as zero.
    pub fn from_table(table: EigenvalueTable, sup_norm_exponent: f64, decay: DecayModel) -> Result<Self> {
        if !(sup_norm_exponent >= 0.0) {
            return Err(Error::invalid("sup-norm exponent must be >= 0"));
        }
        Ok(SpectralModel { eigenvalues: EigenvalueSeq::Table(table), sup_norm_exponent, decay })
    }

    /// The k-th eigenvalue, 1-based.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k >= 1, "eigenvalue index is 1-based");
        match &self.eigenvalues {
            EigenvalueSeq::GaussianClosedForm { xi, c, paper_literal } => {
                if *paper_literal {
                    gaussian_eigenvalue(*xi, *c, k)
                } else {
                    gaussian_eigenvalue_normalized(*xi, *c, k)
                }
            }
            EigenvalueSeq::Table(t) => t.values().get(k - 1).copied().unwrap_or(0.0),
        }
    }

    pub fn sup_norm_exponent(&self) -> f64 {
        self.sup_norm_exponent
    }

    pub fn decay(&self) -> DecayModel {
        self.decay
    }
}

fn gamma_param(xi: f64, c: f64) -> f64 {
    (c * c + 2.0 * c * xi).sqrt()
}

/// Ratio `lam_{k+1} / lam_k = xi / (c + xi + gamma)` of the Gaussian spectrum.
pub fn gaussian_eigenvalue_ratio(xi: f64, c: f64) -> f64 {
    xi / (c + xi + gamma_param(xi, c))
}

/// k-th Gaussian eigenvalue, 1-based, with the table-reproduction constant
/// `sqrt(pi / (xi + c + gamma))`.
pub fn gaussian_eigenvalue(xi: f64, c: f64, k: usize) -> f64 {
    assert!(k >= 1, "eigenvalue index is 1-based");
    let gamma = gamma_param(xi, c);
    (std::f64::consts::PI / (xi + c + gamma)).sqrt()
        * gaussian_eigenvalue_ratio(xi, c).powi((k - 1) as i32)
}

/// k-th Gaussian eigenvalue with the measure-consistent constant
/// `sqrt(2c / (c + xi + gamma))`.
pub fn gaussian_eigenvalue_normalized(xi: f64, c: f64, k: usize) -> f64 {
    assert!(k >= 1, "eigenvalue index is 1-based");
    let gamma = gamma_param(xi, c);
    (2.0 * c / (c + xi + gamma)).sqrt() * gaussian_eigenvalue_ratio(xi, c).powi((k - 1) as i32)
}

/// Largest index supported by the normalized Hermite recurrence.
pub const MAX_HERMITE_INDEX: usize = 200;

/// k-th eigenfunction of the Gaussian kernel operator, 1-based:
/// `(1/sqrt(2 gamma)) alpha_{k-1} H_{k-1}(sqrt(2 gamma) x) exp(-gamma x^2)`
/// with `gamma = sqrt(c^2 + 2 c xi)`.
///
/// Computed with the stable normalized-Hermite-function recurrence, never
/// with explicit factorials, so values stay accurate up to `k = 200`.
pub fn gaussian_eigenfunction(xi: f64, c: f64, k: usize, x: f64) -> Result<f64> {
    if !(xi > 0.0 && c > 0.0) {
        return Err(Error::invalid("Gaussian eigenfunction requires xi > 0 and c > 0"));
    }
    if k < 1 || k > MAX_HERMITE_INDEX {
        return Err(Error::invalid(format!(
            "eigenfunction index {k} outside supported range 1..={MAX_HERMITE_INDEX}"
        )));
    }
    let scale = (2.0 * gamma_param(xi, c)).sqrt();
    Ok(normalized_hermite_function(k - 1, scale * x) / scale)
}

/// `psi_m(u) = alpha_m H_m(u) exp(-u^2/2)`, the L2-normalized Hermite function.
fn normalized_hermite_function(m: usize, u: f64) -> f64 {
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-u * u / 2.0).exp();
    if m == 0 {
        return psi0;
    }
    let mut prev = psi0;
    let mut cur = u * std::f64::consts::SQRT_2 * psi0;
    for j in 2..=m {
        let j = j as f64;
        let next = u * (2.0 / j).sqrt() * cur - ((j - 1.0) / j).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Non-asymptotic upper bound on the m-th Sinc (prolate) eigenvalue:
/// `exp(-(2m + 1) ln(2 (m + 1) / (e c)))`, valid for `m >= e c / 2`.
///
/// Errors below the validity threshold rather than returning a vacuous value.
pub fn sinc_eigenvalue_upper_bound(c: f64, m: usize) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("bandwidth must be positive and finite"));
    }
    let threshold = std::f64::consts::E * c / 2.0;
    if (m as f64) < threshold {
        return Err(Error::invalid(format!(
            "index {m} below the bound's validity threshold e*c/2 = {threshold:.4}"
        )));
    }
    let m_f = m as f64;
    Ok((-(2.0 * m_f + 1.0) * (2.0 * (m_f + 1.0) / (std::f64::consts::E * c)).ln()).exp())
}

/// Landau-type estimate of the Sinc degrees of freedom at level `eps`:
/// `2c/pi + (1/pi^2) ln((1 - eps)/eps) ln(2c/pi)`.
///
/// Real-valued; callers round. Meaningful for `c >= 1` and `eps` in (0, 1).
pub fn sinc_dof_estimate(c: f64, eps: f64) -> f64 {
    debug_assert!(c >= 1.0, "estimate is calibrated for c >= 1");
    debug_assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    let t = 2.0 * c / std::f64::consts::PI;
    t + ((1.0 - eps) / eps).ln() / (std::f64::consts::PI * std::f64::consts::PI) * t.ln()
}

/// Eigenvalues below this fraction of the largest are squashed to zero: they
/// sit at or below the absolute accuracy of the dense symmetric eigensolver,
/// so keeping them would report roundoff as spectrum.
const NYSTROM_RELATIVE_FLOOR: f64 = 1e-14;

/// Top `count` eigenvalues of the kernel integral operator, by quadrature
/// discretization (symmetrized Nystrom matrix `sqrt(w_i) K(t_i, t_j) sqrt(w_j)`).
///
/// Compact measures use Gauss-Legendre nodes reweighted by the density;
/// the Gaussian measure uses Gauss-Hermite nodes under `u = x sqrt(2c)`.
/// The Sinc kernel on the uniform cube is discretized against Lebesgue
/// measure (see the module docs).
pub fn nystrom_eigenvalues(
    kernel: &KernelSpec,
    measure: &MeasureSpec,
    quad_order: usize,
    count: usize,
) -> Result<EigenvalueTable> {
    if kernel.dim() != 1 {
        return Err(Error::invalid("Nystrom oracle supports univariate kernels only"));
    }
    if measure.dim() != 1 {
        return Err(Error::invalid("Nystrom oracle supports univariate measures only"));
    }
    if count < 1 || quad_order < count {
        return Err(Error::invalid("need quad_order >= count >= 1"));
    }

    let (nodes, weights): (Vec<f64>, Vec<f64>) = match measure {
        MeasureSpec::UniformCube { .. } | MeasureSpec::TruncatedStdNormal => {
            let (t, w) = gauss_legendre(quad_order);
            let lebesgue_sinc = matches!(kernel, KernelSpec::Sinc { .. })
                && matches!(measure, MeasureSpec::UniformCube { .. });
            if lebesgue_sinc {
                (t, w)
            } else {
                let w = t
                    .iter()
                    .zip(&w)
                    .map(|(&ti, &wi)| Ok(wi * density(measure, &Point::scalar(ti))?))
                    .collect::<Result<Vec<f64>>>()?;
                (t, w)
            }
        }
        MeasureSpec::GaussianMeasure { scale } => {
            let (u, w) = gauss_hermite(quad_order);
            let s = (2.0 * scale).sqrt();
            let pi_sqrt = std::f64::consts::PI.sqrt();
            (u.iter().map(|&ui| ui / s).collect(), w.iter().map(|&wi| wi / pi_sqrt).collect())
        }
        MeasureSpec::Normal { .. } => {
            return Err(Error::invalid("Nystrom oracle does not support the noise law"));
        }
    };

    let n = quad_order;
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = sqrt_w[i] * kernel.eval_raw(&nodes[i..=i], &nodes[j..=j]) * sqrt_w[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition("Nystrom matrix has non-finite entries".into()));
    }
    let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    let floor = eigs[0].max(0.0) * NYSTROM_RELATIVE_FLOOR;
    for v in eigs.iter_mut() {
        if *v < floor {
            *v = 0.0;
        }
    }
    eigs.truncate(count);
    EigenvalueTable::new(eigs, SpectrumSource::Nystrom)
}

/// Uniform degrees of freedom at level `eps`: the smallest (1-based) index k
/// with `lam_k <= eps`, i.e. `#{lam_j > eps} + 1`.
///
/// Errors when every tabulated value exceeds `eps` (the table cannot answer).
pub fn degrees_of_freedom(table: &EigenvalueTable, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::invalid("degrees-of-freedom level must be positive"));
    }
    let exceeding = table.values().iter().take_while(|v| **v > eps).count();
    if exceeding == table.len() {
        return Err(Error::TableExhausted(format!(
            "all {} tabulated eigenvalues exceed eps = {eps:e}",
            table.len()
        )));
    }
    Ok(exceeding + 1)
}

#[derive(PartialEq)]
struct LatticeItem {
    value: f64,
    index: Vec<u32>,
}

impl Eq for LatticeItem {}

impl Ord for LatticeItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap by value; index order only breaks ties deterministically.
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for LatticeItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn lattice_product(values: &[f64], index: &[u32]) -> f64 {
    index.iter().map(|&i| values[i as usize]).product()
}

/// The `m` largest d-fold products `base[i_1] * ... * base[i_d]` over ordered
/// index tuples, descending, found by best-first search over the product
/// lattice without enumerating the full grid.
///
/// Errors when the base table is provably too short to certify the m-th
/// largest product: a product using one unseen eigenvalue could reach
/// `base[last] * base[first]^(d-1)`, so that bound must not beat the m-th
/// found value.
pub fn tensor_top_eigenvalues(
    base: &EigenvalueTable,
    dim: usize,
    m: usize,
) -> Result<EigenvalueTable> {
    if dim < 1 {
        return Err(Error::invalid("tensor dimension must be >= 1"));
    }
    if m < 1 {
        return Err(Error::invalid("must request at least one product"));
    }
    let values = base.values();
    let len = values.len() as u32;

    let mut heap = std::collections::BinaryHeap::new();
    let mut visited: HashSet<Vec<u32>> = HashSet::new();
    let root = vec![0u32; dim];
    heap.push(LatticeItem { value: lattice_product(values, &root), index: root.clone() });
    visited.insert(root);

    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let Some(item) = heap.pop() else { break };
        out.push(item.value);
        for pos in 0..dim {
            if item.index[pos] + 1 < len {
                let mut next = item.index.clone();
                next[pos] += 1;
                if visited.insert(next.clone()) {
                    heap.push(LatticeItem { value: lattice_product(values, &next), index: next });
                }
            }
        }
    }
    if out.len() < m {
        return Err(Error::TableExhausted(format!(
            "product lattice holds only {} entries, {m} requested",
            out.len()
        )));
    }
    let unseen_bound = values[values.len() - 1] * values[0].powi(dim as i32 - 1);
    if unseen_bound > out[m - 1] {
        return Err(Error::TableExhausted(format!(
            "base table too short: an unseen product could reach {unseen_bound:e} > {:e}",
            out[m - 1]
        )));
    }
    EigenvalueTable::new(out, base.source())
}
