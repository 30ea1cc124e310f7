//! Linearized binary collision operator for a constant kernel in 2-D.
//!
//! At the unit Maxwellian the Jacobian has the quadratic-form structure
//! `Q̄_{αβ} = −(B₀ / (4 α!)) ∫ ω(ξ) ω(ξ₁) L(α) L(β) dn dξ₁ dξ` with
//! `L(α) = He_α(ξ') + He_α(ξ₁') − He_α(ξ) − He_α(ξ₁)`. The velocity integrals
//! use tensor Gauss-Hermite rules and the half circle of unit vectors
//! `n = (cos φ, sin φ)`, `φ ∈ [0, π)`, the trapezoidal rule. Both are exact
//! for the polynomial and trigonometric degrees that occur once
//! `nodes > M` and `angles > 2M`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::basis::hermite::fill_hermite_1d;
use crate::basis::{gauss_hermite, MomentBasis, MAX_NODES};
use crate::error::{invalid, HmeError, Result};
use crate::linalg::RMatrix;

pub const MIN_QUADRATURE_ORDER: usize = 8;
pub const MAX_ANGLES: usize = 1024;
pub const MAX_BINARY_ORDER: usize = 4;

pub fn qbar_binary(basis: &MomentBasis, kernel: f64, nodes: usize, angles: usize) -> Result<RMatrix> {
    if basis.dim() != 2 {
        return Err(HmeError::Unsupported(format!(
            "binary collisions are implemented for D = 2 only, got D = {}",
            basis.dim()
        )));
    }
    if basis.order() > MAX_BINARY_ORDER {
        return Err(HmeError::Unsupported(format!(
            "binary collisions are implemented for M ≤ {MAX_BINARY_ORDER}, got M = {}",
            basis.order()
        )));
    }
    if !(kernel > 0.0 && kernel.is_finite()) {
        return Err(invalid(format!("kernel magnitude must be positive, got {kernel}")));
    }
    if !(MIN_QUADRATURE_ORDER..=MAX_NODES).contains(&nodes) {
        return Err(invalid(format!(
            "velocity quadrature order must be in {MIN_QUADRATURE_ORDER}..={MAX_NODES}, got {nodes}"
        )));
    }
    if !(MIN_QUADRATURE_ORDER..=MAX_ANGLES).contains(&angles) {
        return Err(invalid(format!(
            "angular quadrature order must be in {MIN_QUADRATURE_ORDER}..={MAX_ANGLES}, got {angles}"
        )));
    }

    let gh = gauss_hermite(nodes)?;
    let points: Vec<([f64; 2], f64)> = gh
        .nodes
        .iter()
        .zip(&gh.weights)
        .flat_map(|(x, wx)| gh.nodes.iter().zip(&gh.weights).map(move |(y, wy)| ([*x, *y], wx * wy)))
        .collect();
    let dirs: Vec<[f64; 2]> = (0..angles)
        .map(|j| {
            let phi = PI * j as f64 / angles as f64;
            [phi.cos(), phi.sin()]
        })
        .collect();
    let angle_weight = PI / angles as f64;

    let order = basis.order();
    let n = basis.len();
    let idx: Vec<[usize; 2]> = basis.indices().iter().map(|a| [a.get(0), a.get(1)]).collect();

    let partials: Vec<Vec<f64>> = points
        .par_iter()
        .map(|(xi, wxi)| {
            let mut acc = vec![0.0; n * n];
            let mut tables = [[0.0; MAX_BINARY_ORDER + 1]; 8];
            let mut l = vec![0.0; n];
            for (xi1, wxi1) in &points {
                let g = [xi1[0] - xi[0], xi1[1] - xi[1]];
                for nv in &dirs {
                    let s = g[0] * nv[0] + g[1] * nv[1];
                    let post = [xi[0] + s * nv[0], xi[1] + s * nv[1]];
                    let post1 = [xi1[0] - s * nv[0], xi1[1] - s * nv[1]];
                    let vals = [post[0], post[1], post1[0], post1[1], xi[0], xi[1], xi1[0], xi1[1]];
                    for (t, v) in tables.iter_mut().zip(vals) {
                        fill_hermite_1d(v, 0.0, 1.0, &mut t[..=order]);
                    }
                    for (k, a) in idx.iter().enumerate() {
                        l[k] = tables[0][a[0]] * tables[1][a[1]] + tables[2][a[0]] * tables[3][a[1]]
                            - tables[4][a[0]] * tables[5][a[1]]
                            - tables[6][a[0]] * tables[7][a[1]];
                    }
                    let w = wxi * wxi1 * angle_weight;
                    for r in 0..n {
                        let lr = w * l[r];
                        if lr == 0.0 {
                            continue;
                        }
                        let row = &mut acc[r * n..(r + 1) * n];
                        for c in r..n {
                            row[c] += lr * l[c];
                        }
                    }
                }
            }
            acc
        })
        .collect();

    // fixed summation order keeps the result independent of the thread count
    let mut total = vec![0.0; n * n];
    for p in &partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    let mut q = RMatrix::zeros(n, n);
    for r in 0..n {
        let fact = basis.index(r).factorial();
        for c in 0..n {
            let v = if c >= r { total[r * n + c] } else { total[c * n + r] };
            q[(r, c)] = -0.25 * kernel * v / fact;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs, symmetric_eigen, symmetry_residual};

    #[test]
    fn collision_invariants_give_zero_rows() {
        let b = MomentBasis::new(2, 3).unwrap();
        let q = qbar_binary(&b, 1.0, 8, 8).unwrap();
        let scale = max_abs(&q);
        for k in [0, b.unit_pos(0), b.unit_pos(1)] {
            assert!(q.row(k).iter().all(|x| x.abs() <= 1e-12 * scale));
            assert!(q.column(k).iter().all(|x| x.abs() <= 1e-12 * scale));
        }
        let energy = q.row(b.pair_pos(0, 0)) + q.row(b.pair_pos(1, 1));
        assert!(energy.iter().all(|x| x.abs() <= 1e-12 * scale));
    }

    #[test]
    fn symmetrized_form_is_negative_semidefinite() {
        let b = MomentBasis::new(2, 3).unwrap();
        let q = qbar_binary(&b, 1.0, 8, 8).unwrap();
        let t: Vec<f64> = b.indices().iter().map(|a| 1.0 / a.factorial().sqrt()).collect();
        let ti: Vec<f64> = t.iter().map(|x| 1.0 / x).collect();
        let s = diag(&ti) * &q * diag(&t);
        assert!(symmetry_residual(&s) < 1e-12);
        let (ev, _) = symmetric_eigen(&s);
        let top = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(ev.last().unwrap() / top < 1e-12);
        assert_eq!(ev.iter().filter(|x| x.abs() <= 1e-8 * top).count(), 4);
    }

    #[test]
    fn result_is_exact_once_rules_are_large_enough() {
        let b = MomentBasis::new(2, 4).unwrap();
        let q1 = qbar_binary(&b, 2.0, 8, 10).unwrap();
        let q2 = qbar_binary(&b, 2.0, 12, 16).unwrap();
        assert!(max_abs(&(&q1 - &q2)) < 1e-11 * max_abs(&q2));
    }

    #[test]
    fn kernel_scales_linearly() {
        let b = MomentBasis::new(2, 3).unwrap();
        let q1 = qbar_binary(&b, 1.0, 8, 8).unwrap();
        let q3 = qbar_binary(&b, 3.0, 8, 8).unwrap();
        assert!(max_abs(&(q1 * 3.0 - q3)) < 1e-13);
    }

    #[test]
    fn rejects_unsupported_configurations() {
        let b3 = MomentBasis::new(3, 3).unwrap();
        assert!(matches!(qbar_binary(&b3, 1.0, 8, 8), Err(HmeError::Unsupported(_))));
        let b5 = MomentBasis::new(2, 5).unwrap();
        assert!(matches!(qbar_binary(&b5, 1.0, 8, 8), Err(HmeError::Unsupported(_))));
        let b = MomentBasis::new(2, 3).unwrap();
        assert!(qbar_binary(&b, 1.0, 4, 8).is_err());
        assert!(qbar_binary(&b, 1.0, 8, 4).is_err());
        assert!(qbar_binary(&b, 0.0, 8, 8).is_err());
    }
}
