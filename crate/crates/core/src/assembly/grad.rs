//! Flux of the unregularized Grad system in one dimension.
//!
//! Grad's equations differ from the regularized ones only in the rows
//! `|α| = M`, where the terms `(M+1) f_M ∂_x u` and `½ (M+1) f_{M−1} ∂_x θ`
//! survive the truncation.

use super::{assemble_d, assemble_d_inv, assemble_m, LinearizedSystem, MomentState};
use crate::error::{HmeError, Result};
use crate::linalg::{diag, RMatrix};

/// `B₁ = M₁ D + C` such that Grad's system reads `D ∂_t w + B₁ ∂_x w = S`.
pub fn assemble_grad_flux_1d(state: &MomentState) -> Result<RMatrix> {
    let b = state.basis();
    if b.dim() != 1 {
        return Err(HmeError::Unsupported(format!(
            "Grad flux is only assembled for D = 1, got D = {}",
            b.dim()
        )));
    }
    let order = b.order();
    let f = state.coefficients();
    let rho = state.rho();
    let theta = state.theta();
    let mut flux = assemble_m(state, 0)? * assemble_d(state);

    let row = order;
    let k = (order + 1) as f64;
    flux[(row, 1)] += k * f[order];
    // θ = 2 w_2 / ρ, so ∂θ = (1/ρ)(2 ∂w_2 − θ ∂w_0)
    let g = 0.5 * k * f[order - 1];
    flux[(row, 2)] += g * 2.0 / rho;
    flux[(row, 0)] -= g * theta / rho;
    Ok(flux)
}

/// `D⁻¹ B₁`, the flux Jacobian in `∂_t w + J ∂_x w = D⁻¹ S`.
pub fn grad_flux_jacobian_1d(state: &MomentState) -> Result<RMatrix> {
    let flux = assemble_grad_flux_1d(state)?;
    Ok(assemble_d_inv(state) * flux)
}

/// Dimensionless form `(1/√θ₀) Λ₀⁻¹ J Λ₀` of a flux Jacobian evaluated at
/// the equilibrium of `lin`.
pub fn linearize_flux(lin: &LinearizedSystem, jacobian: &RMatrix) -> RMatrix {
    let inv: Vec<f64> = lin.lambda0.iter().map(|x| 1.0 / x).collect();
    diag(&inv) * jacobian * lin.lambda0_matrix() / lin.theta0.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_a, linearize};
    use crate::basis::MomentBasis;
    use crate::linalg::{max_abs, real_eigenvalues};

    #[test]
    fn equilibrium_grad_matches_regularized_linearization() {
        for order in 3..=6 {
            let b = MomentBasis::new(1, order).unwrap();
            let lin = linearize(&b, 1.4, 0.8).unwrap();
            let eq = lin.equilibrium_state();
            let grad = linearize_flux(&lin, &grad_flux_jacobian_1d(&eq).unwrap());
            let hme = linearize_flux(&lin, &assemble_a(&eq, 0).unwrap());
            assert!(max_abs(&(&grad - &hme)) <= 1e-12);
            assert!(max_abs(&(&grad - &lin.abar[0])) <= 1e-12);
        }
    }

    #[test]
    fn correction_vanishes_without_higher_moments() {
        let b = MomentBasis::new(1, 5).unwrap();
        let s = MomentState::new(b, vec![1.2, 0.3, 0.8, 0.0, 0.0, 0.0]).unwrap();
        let grad = assemble_grad_flux_1d(&s).unwrap();
        let hme = assemble_m(&s, 0).unwrap() * assemble_d(&s);
        assert_eq!(grad, hme);
    }

    #[test]
    fn correction_only_touches_last_row() {
        let b = MomentBasis::new(1, 4).unwrap();
        let s = MomentState::new(b, vec![1.0, 0.0, 0.5, 0.1, -0.2]).unwrap();
        let grad = assemble_grad_flux_1d(&s).unwrap();
        let hme = assemble_m(&s, 0).unwrap() * assemble_d(&s);
        let diff = grad - hme;
        for r in 0..4 {
            assert!(diff.row(r).iter().all(|x| *x == 0.0));
        }
        assert!((diff[(4, 1)] - 5.0 * -0.2).abs() < 1e-15);
        assert!((diff[(4, 2)] - 2.5 * 0.1 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn large_heat_flux_breaks_grad_hyperbolicity() {
        let b = MomentBasis::new(1, 3).unwrap();
        let s = MomentState::new(b, vec![1.0, 0.0, 0.5, 0.5]).unwrap();
        let grad = real_eigenvalues(&grad_flux_jacobian_1d(&s).unwrap()).unwrap();
        assert!(grad.iter().any(|z| z.im.abs() > 1e-6));
        let hme = real_eigenvalues(&assemble_a(&s, 0).unwrap()).unwrap();
        assert!(hme.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn rejects_higher_dimensions() {
        let b = MomentBasis::new(2, 3).unwrap();
        let s = MomentState::equilibrium(b, 1.0, &[0.0, 0.0], 1.0).unwrap();
        assert!(matches!(assemble_grad_flux_1d(&s), Err(HmeError::Unsupported(_))));
    }
}
