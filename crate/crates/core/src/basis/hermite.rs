use std::f64::consts::PI;

use super::MultiIndex;
use crate::error::{invalid, Result};

/// The Maxwellian weight `ω^{[u,θ]}(ξ) = (2πθ)^{-D/2} exp(-|ξ-u|²/(2θ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteWeight {
    u: Vec<f64>,
    theta: f64,
}

impl HermiteWeight {
    pub fn new(u: Vec<f64>, theta: f64) -> Result<Self> {
        if theta <= 0.0 || !theta.is_finite() {
            return Err(invalid(format!("temperature must be positive, got {theta}")));
        }
        if u.is_empty() || u.len() > super::MAX_DIM {
            return Err(invalid(format!("velocity must have 1..=3 components, got {}", u.len())));
        }
        Ok(Self { u, theta })
    }

    /// Weight centred at the origin with unit temperature.
    pub fn standard(dim: usize) -> Self {
        Self {
            u: vec![0.0; dim],
            theta: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn velocity(&self) -> &[f64] {
        &self.u
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn density(&self, xi: &[f64]) -> f64 {
        let d = self.u.len() as f64;
        let r2: f64 = xi.iter().zip(&self.u).map(|(x, u)| (x - u) * (x - u)).sum();
        (2.0 * PI * self.theta).powf(-d / 2.0) * (-r2 / (2.0 * self.theta)).exp()
    }
}

/// One-dimensional values `He_n^{[u,θ]}(ξ)` for `n = 0..=order`.
///
/// `He_n = ω⁻¹ dⁿω/dξⁿ` obeys `He_{n+1} = -((ξ-u)/θ) He_n - (n/θ) He_{n-1}`,
/// so `He_1 = -(ξ-u)/θ`.
pub fn hermite_table_1d(xi: f64, u: f64, theta: f64, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    fill_hermite_1d(xi, u, theta, &mut out);
    out
}

pub(crate) fn fill_hermite_1d(xi: f64, u: f64, theta: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let s = (xi - u) / theta;
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = -s;
    }
    for n in 1..out.len() - 1 {
        out[n + 1] = -s * out[n] - (n as f64 / theta) * out[n - 1];
    }
}

/// `He_α^{[u,θ]}(ξ) = Π_d He_{α_d}^{[u_d,θ]}(ξ_d)`.
pub fn hermite_eval(alpha: &MultiIndex, xi: &[f64], weight: &HermiteWeight) -> Result<f64> {
    let dim = alpha.dim();
    if xi.len() != dim || weight.dim() != dim {
        return Err(invalid(format!(
            "dimension mismatch: index {dim}, velocity {}, weight {}",
            xi.len(),
            weight.dim()
        )));
    }
    let mut value = 1.0;
    for (d, (&x, &u)) in xi.iter().zip(&weight.u).enumerate() {
        let n = alpha.get(d);
        let table = hermite_table_1d(x, u, weight.theta, n);
        value *= table[n];
    }
    Ok(value)
}

/// The basis function `H_α^{[u,θ]}(ξ) = He_α^{[u,θ]}(ξ) ω^{[u,θ]}(ξ)`.
pub fn hermite_function(alpha: &MultiIndex, xi: &[f64], weight: &HermiteWeight) -> Result<f64> {
    Ok(hermite_eval(alpha, xi, weight)? * weight.density(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{gauss_hermite, MomentBasis};

    #[test]
    fn zeroth_index_is_one() {
        let w = HermiteWeight::new(vec![0.3, -1.0], 2.5).unwrap();
        let a = MultiIndex::zero(2);
        assert_eq!(hermite_eval(&a, &[4.0, -7.0], &w).unwrap(), 1.0);
    }

    #[test]
    fn first_index_matches_finite_difference_of_weight() {
        let w = HermiteWeight::new(vec![0.0], 1.0).unwrap();
        let h = 1e-5;
        let fd = (w.density(&[2.0 + h]) - w.density(&[2.0 - h])) / (2.0 * h) / w.density(&[2.0]);
        let he = hermite_eval(&MultiIndex::unit(1, 0), &[2.0], &w).unwrap();
        assert!((he - fd).abs() < 1e-8, "{he} vs {fd}");
        assert!((he + 2.0).abs() < 1e-14);
    }

    #[test]
    fn higher_derivatives_match_finite_differences() {
        // second and third derivatives of ω by nested central differences
        let (u, theta, x) = (0.4, 1.7, -0.9);
        let w = HermiteWeight::new(vec![u], theta).unwrap();
        let f = |y: f64| w.density(&[y]);
        let h = 1e-3;
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let d3 = (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
        let t = hermite_table_1d(x, u, theta, 3);
        assert!((t[2] - d2 / f(x)).abs() < 1e-5);
        assert!((t[3] - d3 / f(x)).abs() < 1e-4);
    }

    #[test]
    fn rejects_nonpositive_temperature() {
        assert!(HermiteWeight::new(vec![0.0], 0.0).is_err());
        assert!(HermiteWeight::new(vec![0.0], -1.0).is_err());
        let w = HermiteWeight::standard(2);
        assert!(hermite_eval(&MultiIndex::zero(1), &[0.0, 0.0], &w).is_err());
    }

    /// `∫ He_α He_β ω dξ = δ_{αβ} α!/θ^{|α|}` by tensor Gauss-Hermite quadrature.
    fn orthogonality_residual(dim: usize, theta: f64, u: &[f64]) -> f64 {
        let basis = MomentBasis::new(dim, 4).unwrap();
        let gh = gauss_hermite(8).unwrap();
        let w = HermiteWeight::new(u.to_vec(), theta).unwrap();
        let n = basis.len();
        let mut gram = vec![0.0; n * n];
        let nodes: Vec<(Vec<f64>, f64)> = if dim == 1 {
            gh.nodes
                .iter()
                .zip(&gh.weights)
                .map(|(x, q)| (vec![u[0] + theta.sqrt() * x], *q))
                .collect()
        } else {
            let mut v = Vec::new();
            for (x, qx) in gh.nodes.iter().zip(&gh.weights) {
                for (y, qy) in gh.nodes.iter().zip(&gh.weights) {
                    v.push((vec![u[0] + theta.sqrt() * x, u[1] + theta.sqrt() * y], qx * qy));
                }
            }
            v
        };
        for (xi, q) in &nodes {
            let vals: Vec<f64> = basis
                .indices()
                .iter()
                .map(|a| hermite_eval(a, xi, &w).unwrap())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] += q * vals[i] * vals[j];
                }
            }
        }
        let mut worst: f64 = 0.0;
        for (i, a) in basis.indices().iter().enumerate() {
            for j in 0..n {
                let expected = if i == j {
                    a.factorial() / theta.powi(a.degree() as i32)
                } else {
                    0.0
                };
                worst = worst.max((gram[i * n + j] - expected).abs());
            }
        }
        worst
    }

    #[test]
    fn orthogonality_by_quadrature() {
        for theta in [0.5, 1.0, 2.0] {
            assert!(orthogonality_residual(1, theta, &[0.7]) <= 1e-10);
            assert!(orthogonality_residual(2, theta, &[-0.3, 1.1]) <= 1e-10);
        }
    }
}
