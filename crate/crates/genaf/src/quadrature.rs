//! 1-D quadrature rules on the reference interval [-1/2, 1/2].
//!
//! Nodes and weights come from the Golub-Welsch eigenvalue method applied to
//! the Jacobi matrix of the orthogonal polynomial family. Weights are
//! normalized to sum to 1 (the length of the reference interval), so a tensor
//! product of two rules integrates with the unit reference measure.

use nalgebra::DMatrix;

/// A 1-D rule on [-1/2, 1/2]: `points[i]` with weight `weights[i]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// The n-point Gauss-Legendre rule, exact for polynomials of degree
    /// 2n - 1 on the reference interval.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one point");
        let (nodes, weights) = golub_welsch_legendre(n);
        QuadratureRule {
            points: nodes.iter().map(|x| 0.5 * x).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
        }
    }

    /// Integral of `f` against the rule (unit reference measure).
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (weights sum to 2).
fn golub_welsch_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Jacobi matrix of the Legendre recurrence: zero diagonal, off-diagonal
    // b_k = k / sqrt(4k^2 - 1).
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, first_components) = symmetric_tridiagonal_eigen(&vec![0.0; n], &offdiag);
    let weights = first_components.iter().map(|c| 2.0 * c * c).collect();
    (nodes, weights)
}

/// Roots of the derivative of the Legendre polynomial P'_{n+1} on [-1, 1]:
/// the interior nodes of the (n+2)-point Gauss-Lobatto rule. These are the
/// Gauss nodes of the Jacobi weight (1 - x^2).
pub fn lobatto_interior_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    // Jacobi(1,1) monic recurrence: beta_k = k(k+2) / ((2k+1)(2k+3)).
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            (k * (k + 2.0) / ((2.0 * k + 1.0) * (2.0 * k + 3.0))).sqrt()
        })
        .collect();
    let (nodes, _) = symmetric_tridiagonal_eigen(&vec![0.0; n], &offdiag);
    nodes
}

/// Eigenvalues (ascending) and first eigenvector components of a symmetric
/// tridiagonal matrix.
fn symmetric_tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    for (i, &b) in offdiag.iter().enumerate() {
        m[(i, i + 1)] = b;
        m[(i + 1, i)] = b;
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let nodes = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let firsts = order.iter().map(|&i| eig.eigenvectors[(0, i)]).collect();
    (nodes, firsts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integrate x^d over [-1/2, 1/2] exactly.
    fn monomial_integral(d: u32) -> f64 {
        if d % 2 == 1 {
            0.0
        } else {
            (0.5f64).powi(d as i32) / (d as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_legendre_exactness_degree_by_degree() {
        for n in 1..=8 {
            let rule = QuadratureRule::gauss_legendre(n);
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for d in 0..=(2 * n as u32 - 1) {
                let approx = rule.integrate(|x| x.powi(d as i32));
                assert!(
                    (approx - monomial_integral(d)).abs() < 1e-14,
                    "n = {n}, degree {d}: got {approx}"
                );
            }
            // One degree past the exactness bound must fail for even degree.
            let d = 2 * n as u32;
            let approx = rule.integrate(|x| x.powi(d as i32));
            assert!((approx - monomial_integral(d)).abs() > 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_known_nodes() {
        let r1 = QuadratureRule::gauss_legendre(1);
        assert!(r1.points[0].abs() < 1e-15);

        let r2 = QuadratureRule::gauss_legendre(2);
        let expected = 0.5 / 3.0f64.sqrt();
        assert!((r2.points[0] + expected).abs() < 1e-14);
        assert!((r2.points[1] - expected).abs() < 1e-14);

        let r3 = QuadratureRule::gauss_legendre(3);
        let expected = 0.5 * (3.0f64 / 5.0).sqrt();
        assert!((r3.points[0] + expected).abs() < 1e-14);
        assert!(r3.points[1].abs() < 1e-15);
        assert!((r3.points[2] - expected).abs() < 1e-14);
    }

    #[test]
    fn lobatto_interior_known_nodes() {
        // Roots of P'_2 = 3x.
        let n1 = lobatto_interior_nodes(1);
        assert!(n1[0].abs() < 1e-15);
        // Roots of P'_3: x = +-1/sqrt(5).
        let n2 = lobatto_interior_nodes(2);
        let expected = 1.0 / 5.0f64.sqrt();
        assert!((n2[0] + expected).abs() < 1e-14);
        assert!((n2[1] - expected).abs() < 1e-14);
        // Roots of P'_4: x = 0, +-sqrt(3/7).
        let n3 = lobatto_interior_nodes(3);
        let expected = (3.0f64 / 7.0).sqrt();
        assert!((n3[0] + expected).abs() < 1e-14);
        assert!(n3[1].abs() < 1e-14);
        assert!((n3[2] - expected).abs() < 1e-14);
    }

    #[test]
    fn nodes_symmetric_and_interior() {
        for n in 1..=7 {
            let rule = QuadratureRule::gauss_legendre(n);
            for i in 0..n {
                assert!((rule.points[i] + rule.points[n - 1 - i]).abs() < 1e-14);
                assert!(rule.points[i].abs() < 0.5);
                assert!(rule.weights[i] > 0.0);
            }
        }
    }
}
