//! Ridge estimators: the truncated estimator built on the first `N` kernel
//! columns, the full kernel ridge baseline, and the generalized ridge solve
//! that unifies both.
//!
//! Scaling conventions, kept exactly as stated by the estimator definitions:
//! the truncated fit solves `(A_N^T A_N + lam I_N) w = A_N^T Y` with the
//! 1/n-scaled matrix `A_N` and predicts `sum_j w_j (1/n) K(X_j, x)`; the full
//! fit solves `(K + n lam I_n) C = Y` with the unscaled kernel matrix and
//! predicts `sum_i C_i K(X_i, x)`.

use crate::error::{Error, Result};
use crate::gram;
use crate::kernels::{KernelSpec, Point};
use nalgebra::{Cholesky, DMatrix, DVector};

/// Truncated ridge model: weights over the first `N` sample points.
#[derive(Debug, Clone)]
pub struct TkrrModel {
    basis_points: Vec<Point>,
    weights: DVector<f64>,
    lam: f64,
    kernel: KernelSpec,
    n: usize,
}

/// Full kernel ridge model: one coefficient per sample.
#[derive(Debug, Clone)]
pub struct KrrModel {
    points: Vec<Point>,
    coeffs: DVector<f64>,
    lam: f64,
    kernel: KernelSpec,
}

impl TkrrModel {
    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn basis_points(&self) -> &[Point] {
        &self.basis_points
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }
}

impl KrrModel {
    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }
}

/// Cholesky solve with iterative refinement; `None` when the matrix is not
/// numerically positive definite.
fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = Cholesky::new(m.clone())?;
    let mut x = chol.solve(rhs);
    let rhs_norm = rhs.norm();
    for _ in 0..2 {
        let residual = rhs - m * &x;
        if residual.norm() <= 1e-14 * rhs_norm {
            break;
        }
        x += chol.solve(&residual);
    }
    Some(x)
}

fn check_responses(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::invalid(format!("{} responses for {} samples", y.len(), n)));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("responses must be finite"));
    }
    Ok(())
}

fn check_lam(lam: f64) -> Result<()> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::invalid("ridge parameter must be positive and finite"));
    }
    Ok(())
}

/// Fits the truncated estimator: `w = (A_N^T A_N + lam I_N)^{-1} A_N^T Y`.
///
/// The normal equations are solved by a positive-definite factorization with
/// iterative refinement; if the factorization fails (duplicated sample
/// points can make the Gramian numerically semidefinite), the ridge is
/// inflated once by `1e-12 tr(A^T A)` before giving up.
pub fn fit_tkrr(
    kernel: &KernelSpec,
    samples: &[Point],
    y: &[f64],
    n_trunc: usize,
    lam: f64,
) -> Result<TkrrModel> {
    check_responses(y, samples.len())?;
    check_lam(lam)?;
    let a = gram::build_truncated(kernel, samples, n_trunc)?;
    let yv = DVector::from_column_slice(y);
    let gramian = a.entries().transpose() * a.entries();
    let rhs = a.entries().transpose() * &yv;

    let system = &gramian + DMatrix::identity(n_trunc, n_trunc) * lam;
    let weights = match solve_spd(&system, &rhs) {
        Some(w) => w,
        None => {
            let inflated = lam + 1e-12 * gramian.trace();
            let system = &gramian + DMatrix::identity(n_trunc, n_trunc) * inflated;
            solve_spd(&system, &rhs).ok_or(Error::SingularSystem)?
        }
    };
    Ok(TkrrModel {
        basis_points: samples[..n_trunc].to_vec(),
        weights,
        lam,
        kernel: kernel.clone(),
        n: samples.len(),
    })
}

/// `f(x) = sum_{j=1..N} w_j (1/n) K(X_j, x)`.
pub fn predict_tkrr(model: &TkrrModel, x: &Point) -> Result<f64> {
    let scale = 1.0 / model.n as f64;
    let mut acc = 0.0;
    for (p, w) in model.basis_points.iter().zip(model.weights.iter()) {
        acc += w * scale * model.kernel.eval(p, x)?;
    }
    Ok(acc)
}

/// Fits the full kernel ridge baseline: `(K + n lam I_n) C = Y` with the
/// unscaled kernel matrix `K_{ij} = K(X_i, X_j)`.
pub fn fit_krr(kernel: &KernelSpec, samples: &[Point], y: &[f64], lam: f64) -> Result<KrrModel> {
    check_responses(y, samples.len())?;
    check_lam(lam)?;
    let n = samples.len();
    let scaled = gram::build_full(kernel, samples)?;
    let system = scaled.entries() * n as f64 + DMatrix::identity(n, n) * (n as f64 * lam);
    let yv = DVector::from_column_slice(y);
    let coeffs = solve_spd(&system, &yv).ok_or(Error::SingularSystem)?;
    Ok(KrrModel { points: samples.to_vec(), coeffs, lam, kernel: kernel.clone() })
}

/// `f(x) = sum_i C_i K(X_i, x)`.
pub fn predict_krr(model: &KrrModel, x: &Point) -> Result<f64> {
    let mut acc = 0.0;
    for (p, c) in model.points.iter().zip(model.coeffs.iter()) {
        acc += c * model.kernel.eval(p, x)?;
    }
    Ok(acc)
}

/// Minimizer of `||K1 w - Y||_n^2 + lam w^T K2 w`, namely
/// `w = (K1^T K1 + n lam K2)^{-1} K1^T Y` with `n` the row count of `K1`.
///
/// `K2` must be symmetric positive semi-definite; the assembled system must
/// be positive definite.
pub fn fit_generalized_ridge(
    k1: &DMatrix<f64>,
    k2: &DMatrix<f64>,
    y: &DVector<f64>,
    lam: f64,
) -> Result<DVector<f64>> {
    check_lam(lam)?;
    let n = k1.nrows();
    let p = k1.ncols();
    if y.len() != n {
        return Err(Error::invalid(format!("{} responses for {} rows", y.len(), n)));
    }
    if k2.nrows() != p || k2.ncols() != p {
        return Err(Error::invalid("penalty matrix shape must match K1's column count"));
    }
    let asym = (k2 - k2.transpose()).amax();
    if asym > 1e-10 * k2.amax().max(1.0) {
        return Err(Error::invalid("penalty matrix must be symmetric"));
    }
    let system = k1.transpose() * k1 + k2 * (n as f64 * lam);
    let rhs = k1.transpose() * y;
    solve_spd(&system, &rhs).ok_or(Error::SingularSystem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{draw, MeasureSpec, RngSeed};
    use approx::assert_relative_eq;
    use nalgebra::LU;

    fn linspace_points(n: usize, lo: f64, hi: f64) -> Vec<Point> {
        (0..n)
            .map(|i| Point::scalar(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn zero_responses_give_zero_weights() {
        let k = KernelSpec::gaussian(25.0).unwrap();
        let samples = linspace_points(8, -0.9, 0.9);
        let m = fit_tkrr(&k, &samples, &[0.0; 8], 4, 1e-3).unwrap();
        assert!(m.weights().iter().all(|w| *w == 0.0));
        let krr = fit_krr(&k, &samples, &[0.0; 8], 1e-3).unwrap();
        assert!(krr.coeffs().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn scalar_instances_match_closed_forms() {
        let k = KernelSpec::sinc(25.0).unwrap();
        let kappa = k.kappa1();
        let samples = vec![Point::scalar(0.3)];
        let (y, lam) = (2.0, 0.7);
        let m = fit_tkrr(&k, &samples, &[y], 1, lam).unwrap();
        assert_relative_eq!(m.weights()[0], kappa * y / (kappa * kappa + lam), max_relative = 1e-12);

        let krr = fit_krr(&k, &samples, &[y], lam).unwrap();
        assert_relative_eq!(krr.coeffs()[0], y / (kappa + lam), max_relative = 1e-12);
    }

    #[test]
    fn predict_basics() {
        let k = KernelSpec::gaussian(4.0).unwrap();
        let samples = linspace_points(6, -1.0, 1.0);
        let y = [0.1, -0.4, 0.2, 0.9, -0.3, 0.5];
        let mut m = fit_tkrr(&k, &samples, &y, 3, 1e-2).unwrap();
        let x = Point::scalar(0.17);

        // zero weights predict zero everywhere
        let saved = m.weights.clone();
        m.weights.fill(0.0);
        assert_eq!(predict_tkrr(&m, &x).unwrap(), 0.0);

        // single basis point with weight n cancels the 1/n scaling
        let mut single = fit_tkrr(&k, &samples, &y, 1, 1e-2).unwrap();
        single.weights[0] = samples.len() as f64;
        assert_relative_eq!(
            predict_tkrr(&single, &x).unwrap(),
            k.eval(&samples[0], &x).unwrap(),
            max_relative = 1e-14
        );

        // linearity in the weight vector
        m.weights = saved.clone();
        let base = predict_tkrr(&m, &x).unwrap();
        m.weights = &saved * 2.0;
        let doubled = predict_tkrr(&m, &x).unwrap();
        assert_relative_eq!(doubled, 2.0 * base, max_relative = 1e-12);
    }

    #[test]
    fn krr_interpolates_as_lam_vanishes() {
        let k = KernelSpec::gaussian(25.0).unwrap();
        let samples = linspace_points(10, -0.9, 0.9);
        let y: Vec<f64> = samples.iter().map(|p| (3.0 * p.coords()[0]).sin()).collect();
        let m = fit_krr(&k, &samples, &y, 1e-10).unwrap();

        // Oracle: direct interpolation solve K C = Y.
        let n = samples.len();
        let mut km = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                km[(i, j)] = k.eval(&samples[i], &samples[j]).unwrap();
            }
        }
        let oracle = LU::new(km.clone()).solve(&DVector::from_column_slice(&y)).unwrap();
        let interp = &km * &oracle;
        for (v, yi) in interp.iter().zip(&y) {
            assert!((v - yi).abs() < 1e-10, "oracle interpolates");
        }

        let resid2: f64 = samples
            .iter()
            .zip(&y)
            .map(|(p, yi)| (predict_krr(&m, p).unwrap() - yi).powi(2))
            .sum::<f64>()
            / n as f64;
        assert!(resid2.sqrt() < 1e-6, "training residual {}", resid2.sqrt());
    }

    #[test]
    fn krr_residual_identity() {
        // (K + n lam I) C = Y implies Y - K C = n lam C.
        let k = KernelSpec::gaussian(9.0).unwrap();
        let samples = draw(&MeasureSpec::uniform_cube(1).unwrap(), 14, RngSeed::new(3, 2)).unwrap();
        let y: Vec<f64> = samples.iter().map(|p| p.coords()[0].cos()).collect();
        let lam = 0.05;
        let m = fit_krr(&k, &samples, &y, lam).unwrap();
        let n = samples.len() as f64;
        for (i, p) in samples.iter().enumerate() {
            let fitted = predict_krr(&m, p).unwrap();
            let lhs = y[i] - fitted;
            let rhs = n * lam * m.coeffs()[i];
            assert!((lhs - rhs).abs() < 1e-8, "i={i} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn shrinkage_in_lambda() {
        let k = KernelSpec::sinc(10.0).unwrap();
        let samples = draw(&MeasureSpec::TruncatedStdNormal, 30, RngSeed::new(4, 3)).unwrap();
        let y: Vec<f64> = samples.iter().map(|p| (5.0 * p.coords()[0]).sin()).collect();
        let mut prev = f64::INFINITY;
        for lam in [1e-6, 1e-4, 1e-2, 1.0, 100.0] {
            let m = fit_tkrr(&k, &samples, &y, 10, lam).unwrap();
            let norm = m.weights().norm();
            assert!(norm <= prev * (1.0 + 1e-10), "lam={lam} norm={norm} prev={prev}");
            prev = norm;
        }
    }

    #[test]
    fn generalized_ridge_identity_matrices() {
        let n = 6;
        let y = DVector::from_fn(n, |i, _| (i as f64 * 0.77).sin());
        let eye = DMatrix::<f64>::identity(n, n);
        let lam = 0.3;
        let w = fit_generalized_ridge(&eye, &eye, &y, lam).unwrap();
        for i in 0..n {
            assert_relative_eq!(w[i], y[i] / (1.0 + n as f64 * lam), max_relative = 1e-12);
        }
    }

    #[test]
    fn generalized_ridge_reduces_to_tkrr() {
        let k = KernelSpec::gaussian(16.0).unwrap();
        let samples = draw(&MeasureSpec::uniform_cube(1).unwrap(), 20, RngSeed::new(5, 4)).unwrap();
        let y: Vec<f64> = samples.iter().map(|p| p.coords()[0]).collect();
        let n_trunc = 7;
        let lam = 1e-3;
        let a = gram::build_truncated(&k, &samples, n_trunc).unwrap();
        let k2 = DMatrix::<f64>::identity(n_trunc, n_trunc) / samples.len() as f64;
        let w = fit_generalized_ridge(a.entries(), &k2, &DVector::from_column_slice(&y), lam)
            .unwrap();
        let m = fit_tkrr(&k, &samples, &y, n_trunc, lam).unwrap();
        assert!((&w - m.weights()).norm() <= 1e-8 * m.weights().norm().max(1.0));
    }

    #[test]
    fn generalized_ridge_reduces_to_krr() {
        // (K^2 + n lam K)^{-1} K Y = (K + n lam I)^{-1} Y for PD K.
        let k = KernelSpec::gaussian(16.0).unwrap();
        let samples = linspace_points(12, -1.0, 1.0);
        let y: Vec<f64> = samples.iter().map(|p| (2.0 * p.coords()[0]).cos()).collect();
        let n = samples.len();
        let mut km = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                km[(i, j)] = k.eval(&samples[i], &samples[j]).unwrap();
            }
        }
        let lam = 2e-2;
        let w = fit_generalized_ridge(&km, &km, &DVector::from_column_slice(&y), lam).unwrap();
        let m = fit_krr(&k, &samples, &y, lam).unwrap();
        assert!((&w - m.coeffs()).norm() <= 1e-8 * m.coeffs().norm());
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let samples = linspace_points(3, -1.0, 1.0);
        assert!(fit_tkrr(&k, &samples, &[1.0, f64::NAN, 0.0], 2, 0.1).is_err());
        assert!(fit_tkrr(&k, &samples, &[1.0, 2.0, 3.0], 4, 0.1).is_err());
        assert!(fit_tkrr(&k, &samples, &[1.0, 2.0, 3.0], 2, 0.0).is_err());
        assert!(fit_krr(&k, &samples, &[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn fits_are_bit_deterministic() {
        let k = KernelSpec::sinc(25.0).unwrap();
        let samples = draw(&MeasureSpec::TruncatedStdNormal, 40, RngSeed::new(6, 6)).unwrap();
        let y: Vec<f64> = samples.iter().map(|p| (20.0 * p.coords()[0]).sin()).collect();
        let a = fit_tkrr(&k, &samples, &y, 15, 2.47e-4).unwrap();
        let b = fit_tkrr(&k, &samples, &y, 15, 2.47e-4).unwrap();
        assert_eq!(a.weights().as_slice(), b.weights().as_slice());
    }
}
