use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};

/// Largest supported node count.
pub const MAX_NODES: usize = 64;

/// Gauss-Hermite rule for the standard normal weight `exp(-x²/2)/√(2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    /// Ascending nodes.
    pub nodes: Vec<f64>,
    /// Weights summing to one.
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Orthonormal Hermite values `ψ_k = He_k/√(k!)` for `k = 0..=n`.
fn normalized_hermite(x: f64, n: usize) -> (f64, f64, f64) {
    // returns (ψ_n, ψ_{n-1}, Σ_{k<n} ψ_k²)
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

/// `n`-point Gauss-Hermite rule, exact for polynomials of degree `≤ 2n − 1`.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the probabilists'
/// recurrence (off-diagonal `√k`), polished by Newton steps on `ψ_n`.
/// Weights come from the Christoffel function `1/Σ_{k<n} ψ_k(x)²`.
pub fn gauss_hermite(n: usize) -> Result<GaussHermite> {
    if !(1..=MAX_NODES).contains(&n) {
        return Err(invalid(format!("node count must be in 1..={MAX_NODES}, got {n}")));
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, q, _) = normalized_hermite(*x, n);
            // ψ_n' = √n ψ_{n-1}
            let dp = (n as f64).sqrt() * q;
            if dp == 0.0 {
                break;
            }
            *x -= p / dp;
        }
    }

    // enforce the reflection symmetry of the exact rule
    for i in 0..n / 2 {
        let a = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[n - 1 - i] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes.iter().map(|&x| 1.0 / normalized_hermite(x, n).2).collect();
    for i in 0..n / 2 {
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    Ok(GaussHermite { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `E[x^{2m}] = (2m − 1)!!` for the standard normal.
    fn gaussian_moment(p: usize) -> f64 {
        if p % 2 == 1 {
            0.0
        } else {
            (1..p).step_by(2).map(|k| k as f64).product()
        }
    }

    #[test]
    fn one_point_rule() {
        let g = gauss_hermite(1).unwrap();
        assert_eq!(g.nodes, vec![0.0]);
        assert_eq!(g.weights, vec![1.0]);
    }

    #[test]
    fn two_point_rule() {
        let g = gauss_hermite(2).unwrap();
        assert!((g.nodes[0] + 1.0).abs() < 1e-15 && (g.nodes[1] - 1.0).abs() < 1e-15);
        assert!((g.weights[0] - 0.5).abs() < 1e-15 && (g.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fourth_moment() {
        for n in 3..=64 {
            let g = gauss_hermite(n).unwrap();
            assert!((g.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_up_to_degree_2n_minus_1() {
        for n in [1, 2, 3, 5, 8, 12] {
            let g = gauss_hermite(n).unwrap();
            assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            for p in 0..2 * n {
                let exact = gaussian_moment(p);
                // odd moments cancel, so measure against E|x|^p
                let scale = gaussian_moment(p + p % 2).max(1.0);
                let got = g.integrate(|x| x.powi(p as i32));
                assert!((got - exact).abs() <= 1e-12 * scale, "n={n} p={p}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_hermite(65).is_err());
    }
}
