//! Coefficient matrices of the quasi-linear moment system
//! `D ∂_t w + Σ_d M_d D ∂_{x_d} w = S`.

mod grad;
mod linear;
mod state;

pub use grad::{assemble_grad_flux_1d, grad_flux_jacobian_1d, linearize_flux};
pub use linear::{linearize, LinearizedSystem};
pub use state::{MomentState, Moments};

use crate::basis::MultiIndex;
use crate::error::{invalid, Result};
use crate::linalg::RMatrix;

/// Row `α`, column `e_d` entries `f_{α−e_d}` and the other corrections of `D(w)`.
pub fn assemble_d(state: &MomentState) -> RMatrix {
    let b = state.basis();
    let dim = b.dim();
    let n = b.len();
    let f = state.coefficients();
    let rho = state.rho();
    let theta = state.theta();
    let coeff = |a: &MultiIndex, axis: usize, delta: isize| b.position_shifted(a, axis, delta).map_or(0.0, |k| f[k]);

    let mut m = RMatrix::identity(n, n);
    for (row, a) in b.indices().iter().enumerate() {
        for d in 0..dim {
            m[(row, b.unit_pos(d))] += coeff(a, d, -1);
            m[(row, 0)] -= theta / (2.0 * rho) * coeff(a, d, -2);
        }
        if a.degree() >= 3 {
            let s: f64 = (0..dim).map(|d| coeff(a, d, -2)).sum();
            for k in 0..dim {
                m[(row, b.pair_pos(k, k))] += s / (dim as f64 * rho);
            }
        }
    }
    for d in 0..dim {
        let e = b.unit_pos(d);
        m[(e, e)] -= 1.0;
    }
    m
}

/// Closed-form inverse of [`assemble_d`].
pub fn assemble_d_inv(state: &MomentState) -> RMatrix {
    let b = state.basis();
    let dim = b.dim();
    let n = b.len();
    let f = state.coefficients();
    let rho = state.rho();
    let theta = state.theta();
    let coeff = |a: &MultiIndex, axis: usize, delta: isize| b.position_shifted(a, axis, delta).map_or(0.0, |k| f[k]);

    let mut m = RMatrix::identity(n, n);
    for (row, a) in b.indices().iter().enumerate() {
        for d in 0..dim {
            m[(row, b.unit_pos(d))] -= coeff(a, d, -1) / rho;
        }
        if a.degree() >= 3 {
            let s: f64 = (0..dim).map(|d| coeff(a, d, -2)).sum();
            for k in 0..dim {
                m[(row, b.pair_pos(k, k))] -= s / (dim as f64 * rho);
            }
        }
    }
    for d in 0..dim {
        let e = b.unit_pos(d);
        m[(e, e)] += 1.0 / rho;
        m[(b.pair_pos(d, d), 0)] += 0.5 * theta;
    }
    m
}

/// `M_d = Σ_α θ E_{α,α−e_d} + u_d E_{α,α} + (1 − δ_{|α|,M})(α_d + 1) E_{α,α+e_d}`.
pub fn assemble_m(state: &MomentState, axis: usize) -> Result<RMatrix> {
    let b = state.basis();
    if axis >= b.dim() {
        return Err(invalid(format!("direction {axis} out of range for D = {}", b.dim())));
    }
    Ok(transport_matrix(b, axis, state.velocity()[axis], state.theta()))
}

pub(crate) fn transport_matrix(b: &crate::basis::MomentBasis, axis: usize, u: f64, theta: f64) -> RMatrix {
    let n = b.len();
    let mut m = RMatrix::zeros(n, n);
    for (row, a) in b.indices().iter().enumerate() {
        if let Some(k) = b.position_shifted(a, axis, -1) {
            m[(row, k)] = theta;
        }
        m[(row, row)] = u;
        if a.degree() < b.order() {
            let k = b.position_shifted(a, axis, 1).expect("degree below order");
            m[(row, k)] = (a.get(axis) + 1) as f64;
        }
    }
    m
}

/// `D`, `D⁻¹`, `M_d` and `A_d = D⁻¹ M_d D` at one state.
#[derive(Clone, Debug)]
pub struct SystemMatrices {
    pub d: RMatrix,
    pub d_inv: RMatrix,
    pub m: Vec<RMatrix>,
    pub a: Vec<RMatrix>,
}

impl SystemMatrices {
    pub fn assemble(state: &MomentState) -> Self {
        let d = assemble_d(state);
        let d_inv = assemble_d_inv(state);
        let m: Vec<RMatrix> = (0..state.basis().dim())
            .map(|k| assemble_m(state, k).expect("axis in range"))
            .collect();
        let a = m.iter().map(|mk| &d_inv * mk * &d).collect();
        Self { d, d_inv, m, a }
    }
}

pub fn assemble_a(state: &MomentState, axis: usize) -> Result<RMatrix> {
    let m = assemble_m(state, axis)?;
    Ok(assemble_d_inv(state) * m * assemble_d(state))
}
