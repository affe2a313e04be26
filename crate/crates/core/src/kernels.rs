//! Mercer kernel specifications and pointwise evaluation.
//!
//! Two univariate kernels are provided, together with their d-fold tensor
//! products:
//!
//! * the Sinc kernel `K_c(x, y) = sin(c (x - y)) / (pi (x - y))` with
//!   bandwidth `c > 0`, whose diagonal value is the limit `c / pi`;
//! * the Gaussian kernel `K_G(x, y) = exp(-xi (x - y)^2)` with shape
//!   `xi > 0`.
//!
//! Both are continuous, symmetric and positive semi-definite, so every Gram
//! matrix built from them is PSD up to floating-point roundoff. Evaluation is
//! pure and safe for unrestricted concurrent use.

use crate::error::{Error, Result};

/// A point in the kernel's domain, a finite real vector of dimension `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinate vectors.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have dimension >= 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point { coords })
    }

    /// Builds a univariate point.
    ///
    /// Panics on non-finite input; use [`Point::new`] for fallible
    /// construction.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "point coordinate must be finite");
        Point { coords: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Relative offsets below this threshold evaluate the Sinc diagonal limit.
const SINC_DIAGONAL_EPS: f64 = 1e-12;
/// Scaled offsets `|c (x - y)|` below this use the second-order Taylor guard.
const SINC_TAYLOR_EPS: f64 = 1e-4;

/// A Mercer kernel description.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `sin(c (x - y)) / (pi (x - y))` on the line, bandwidth `c > 0`.
    Sinc { bandwidth: f64 },
    /// `exp(-xi (x - y)^2)` on the line, shape `xi > 0`.
    Gaussian { shape: f64 },
    /// Coordinate-wise product of `dim` copies of a univariate base kernel.
    TensorProduct { base: Box<KernelSpec>, dim: usize },
}

impl KernelSpec {
    /// Sinc kernel with bandwidth `c > 0`.
    pub fn sinc(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::invalid("Sinc bandwidth must be a positive finite real"));
        }
        Ok(KernelSpec::Sinc { bandwidth })
    }

    /// Gaussian kernel with shape `xi > 0`.
    pub fn gaussian(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::invalid("Gaussian shape must be a positive finite real"));
        }
        Ok(KernelSpec::Gaussian { shape })
    }

    /// `dim`-fold tensor product of a univariate base kernel.
    pub fn tensor_product(base: KernelSpec, dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("tensor product dimension must be >= 1"));
        }
        match base {
            KernelSpec::Sinc { .. } | KernelSpec::Gaussian { .. } => {
                Ok(KernelSpec::TensorProduct { base: Box::new(base), dim })
            }
            KernelSpec::TensorProduct { .. } => {
                Err(Error::invalid("tensor product base must be univariate"))
            }
        }
    }

    /// Dimension of the kernel's domain.
    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Sinc { .. } | KernelSpec::Gaussian { .. } => 1,
            KernelSpec::TensorProduct { dim, .. } => *dim,
        }
    }

    /// Supremum of the diagonal, `kappa_1 = sup_x K(x, x)`.
    ///
    /// The diagonal is constant for both univariate kernels (`c / pi` for
    /// Sinc, `1` for Gaussian), so the supremum is attained everywhere.
    pub fn kappa1(&self) -> f64 {
        match self {
            KernelSpec::Sinc { bandwidth } => bandwidth / std::f64::consts::PI,
            KernelSpec::Gaussian { .. } => 1.0,
            KernelSpec::TensorProduct { base, dim } => base.kappa1().powi(*dim as i32),
        }
    }

    /// Evaluates the kernel at a pair of points.
    ///
    /// The Sinc kernel's removable singularity on the diagonal is filled with
    /// the limit `c / pi`; near-diagonal values use a second-order Taylor
    /// expansion to avoid catastrophic cancellation.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let d = self.dim();
        if x.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
        }
        if y.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: y.dim() });
        }
        Ok(self.eval_raw(x.coords(), y.coords()))
    }

    /// Evaluation without dimension checks; callers must validate once upfront.
    pub(crate) fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::Sinc { bandwidth } => sinc_eval(*bandwidth, x[0], y[0]),
            KernelSpec::Gaussian { shape } => {
                let u = x[0] - y[0];
                (-shape * u * u).exp()
            }
            KernelSpec::TensorProduct { base, dim } => (0..*dim)
                .map(|i| base.eval_raw(&x[i..=i], &y[i..=i]))
                .product(),
        }
    }
}

fn sinc_eval(c: f64, x: f64, y: f64) -> f64 {
    let u = x - y;
    let t = c * u;
    let diag = c / std::f64::consts::PI;
    if u.abs() < SINC_DIAGONAL_EPS {
        diag
    } else if t.abs() < SINC_TAYLOR_EPS {
        // sin(t)/t = 1 - t^2/6 + O(t^4); the t^4 term is below 4e-17 here.
        diag * (1.0 - t * t / 6.0)
    } else {
        t.sin() / (std::f64::consts::PI * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const C_OVER_PI_25: f64 = 7.957747154594767; // 25/pi
    const SIN25_OVER_PI: f64 = -0.042128870509847639; // sin(25)/pi

    #[test]
    fn sinc_diagonal_is_c_over_pi() {
        let k = KernelSpec::sinc(25.0).unwrap();
        let x = Point::scalar(0.3);
        assert_relative_eq!(k.eval(&x, &x).unwrap(), C_OVER_PI_25, max_relative = 1e-15);
        assert_relative_eq!(k.kappa1(), C_OVER_PI_25, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_diagonal_is_one() {
        let k = KernelSpec::gaussian(25.0).unwrap();
        let x = Point::scalar(0.0);
        assert_eq!(k.eval(&x, &x).unwrap(), 1.0);
        assert_eq!(k.kappa1(), 1.0);
    }

    #[test]
    fn sinc_off_diagonal_value() {
        let k = KernelSpec::sinc(25.0).unwrap();
        let v = k.eval(&Point::scalar(1.0), &Point::scalar(0.0)).unwrap();
        assert_relative_eq!(v, SIN25_OVER_PI, max_relative = 1e-14);
    }

    #[test]
    fn tensor_kappa1_and_eval() {
        let base = KernelSpec::gaussian(25.0).unwrap();
        let k = KernelSpec::tensor_product(base.clone(), 3).unwrap();
        assert_eq!(k.kappa1(), 1.0);
        let x = Point::new(vec![0.1, -0.2, 0.5]).unwrap();
        let y = Point::new(vec![0.0, 0.3, 0.4]).unwrap();
        let expected: f64 = [(0.1f64, 0.0f64), (-0.2, 0.3), (0.5, 0.4)]
            .iter()
            .map(|&(a, b)| base.eval(&Point::scalar(a), &Point::scalar(b)).unwrap())
            .product();
        assert_relative_eq!(k.eval(&x, &y).unwrap(), expected, max_relative = 1e-15);
    }

    #[test]
    fn tensor_base_must_be_univariate() {
        let base = KernelSpec::gaussian(1.0).unwrap();
        let t = KernelSpec::tensor_product(base, 2).unwrap();
        assert!(KernelSpec::tensor_product(t, 2).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let k = KernelSpec::sinc(1.0).unwrap();
        let x = Point::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            k.eval(&x, &Point::scalar(0.0)),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn sinc_continuity_at_the_diagonal() {
        let k = KernelSpec::sinc(25.0).unwrap();
        let h = 1e-8;
        let v = k.eval(&Point::scalar(0.2), &Point::scalar(0.2 + h)).unwrap();
        assert!((v - C_OVER_PI_25).abs() < 1e-6);
    }

    #[test]
    fn sinc_taylor_guard_matches_direct_formula_at_crossover() {
        // Both branches agree near the |c(x-y)| = 1e-4 switch point.
        let c = 25.0;
        let k = KernelSpec::sinc(c).unwrap();
        for &t in &[0.99e-4, 1.01e-4] {
            let u = t / c;
            let v = k.eval(&Point::scalar(u), &Point::scalar(0.0)).unwrap();
            let direct = (c * u).sin() / (std::f64::consts::PI * u);
            assert_relative_eq!(v, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(KernelSpec::sinc(0.0).is_err());
        assert!(KernelSpec::sinc(-1.0).is_err());
        assert!(KernelSpec::gaussian(f64::NAN).is_err());
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }
}
