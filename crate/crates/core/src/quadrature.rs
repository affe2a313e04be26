//! Gauss-Legendre and Gauss-Hermite quadrature rules.
//!
//! Nodes and weights come from the Golub-Welsch construction: the nodes are
//! the eigenvalues of the symmetric Jacobi matrix of the orthogonal-polynomial
//! recurrence, and each weight is the total measure times the squared first
//! component of the corresponding normalized eigenvector.

use nalgebra::DMatrix;

/// Nodes and weights for the weight function 1 on [-1, 1].
///
/// Weights sum to 2. Exact for polynomials of degree `2 * order - 1`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be >= 1");
    let beta: Vec<f64> = (1..order)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&beta, 2.0)
}

/// Nodes and weights for the weight function `exp(-u^2)` on the line.
///
/// Weights sum to `sqrt(pi)`.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be >= 1");
    let beta: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&beta, std::f64::consts::PI.sqrt())
}

fn golub_welsch(off_diagonal: &[f64], total_mass: f64) -> (Vec<f64>, Vec<f64>) {
    let n = off_diagonal.len() + 1;
    if n == 1 {
        return (vec![0.0], vec![total_mass]);
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in off_diagonal.iter().enumerate() {
        jacobi[(k, k + 1)] = b;
        jacobi[(k + 1, k)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, total_mass * first * first)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_even_monomials() {
        let (nodes, weights) = gauss_legendre(12);
        assert_relative_eq!(weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        for p in [2u32, 4, 8, 16] {
            let q: f64 = nodes.iter().zip(&weights).map(|(&t, &w)| w * t.powi(p as i32)).sum();
            assert_relative_eq!(q, 2.0 / (p as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn hermite_moments() {
        let (nodes, weights) = gauss_hermite(20);
        let pi_sqrt = std::f64::consts::PI.sqrt();
        assert_relative_eq!(weights.iter().sum::<f64>(), pi_sqrt, max_relative = 1e-13);
        let m2: f64 = nodes.iter().zip(&weights).map(|(&t, &w)| w * t * t).sum();
        assert_relative_eq!(m2, pi_sqrt / 2.0, max_relative = 1e-12);
        let m4: f64 = nodes.iter().zip(&weights).map(|(&t, &w)| w * t.powi(4)).sum();
        assert_relative_eq!(m4, 3.0 * pi_sqrt / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn order_one_rules() {
        assert_eq!(gauss_legendre(1), (vec![0.0], vec![2.0]));
        let (n, w) = gauss_hermite(1);
        assert_eq!(n, vec![0.0]);
        assert_relative_eq!(w[0], std::f64::consts::PI.sqrt());
    }
}
