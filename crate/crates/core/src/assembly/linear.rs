use super::{transport_matrix, MomentState};
use crate::basis::MomentBasis;
use crate::error::{invalid, Result};
use crate::linalg::{diag, RMatrix};

/// The moment system linearized at the Maxwellian `(ρ₀, u = 0, θ₀)` in
/// dimensionless variables `w = Λ₀(w₀ + w̄)`, `x = L x̄`, `t = L x̄/√θ₀`.
///
/// The characteristic length `L` is one.
#[derive(Clone, Debug)]
pub struct LinearizedSystem {
    pub basis: MomentBasis,
    pub rho0: f64,
    pub theta0: f64,
    /// `D̄ = I − ½ Σ_d E_{2e_d,0}`.
    pub dbar: RMatrix,
    pub dbar_inv: RMatrix,
    /// `M̄_d`, the transport matrix at `u = 0`, `θ = 1`.
    pub mbar: Vec<RMatrix>,
    /// `Ā_d = D̄⁻¹ M̄_d D̄`.
    pub abar: Vec<RMatrix>,
    /// Diagonal of the symmetrizer `T = diag(1/√α!)`.
    pub t: Vec<f64>,
    pub lambda0: Vec<f64>,
    pub lambda1: Vec<f64>,
}

pub fn linearize(basis: &MomentBasis, rho0: f64, theta0: f64) -> Result<LinearizedSystem> {
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(invalid(format!("equilibrium density must be positive, got {rho0}")));
    }
    if !(theta0 > 0.0 && theta0.is_finite()) {
        return Err(invalid(format!(
            "equilibrium temperature must be positive, got {theta0}"
        )));
    }
    let n = basis.len();
    let dim = basis.dim();
    let mut dbar = RMatrix::identity(n, n);
    let mut dbar_inv = RMatrix::identity(n, n);
    for d in 0..dim {
        dbar[(basis.pair_pos(d, d), 0)] = -0.5;
        dbar_inv[(basis.pair_pos(d, d), 0)] = 0.5;
    }
    let mbar: Vec<RMatrix> = (0..dim).map(|d| transport_matrix(basis, d, 0.0, 1.0)).collect();
    let abar = mbar.iter().map(|m| &dbar_inv * m * &dbar).collect();
    let t = basis.indices().iter().map(|a| 1.0 / a.factorial().sqrt()).collect();
    let lambda1: Vec<f64> = basis
        .indices()
        .iter()
        .map(|a| rho0 * theta0.powf(a.degree() as f64 / 2.0))
        .collect();
    let lambda0 = basis
        .indices()
        .iter()
        .zip(&lambda1)
        .map(|(a, l)| if a.degree() == 1 { theta0.sqrt() } else { *l })
        .collect();
    Ok(LinearizedSystem {
        basis: basis.clone(),
        rho0,
        theta0,
        dbar,
        dbar_inv,
        mbar,
        abar,
        t,
        lambda0,
        lambda1,
    })
}

impl LinearizedSystem {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn t_matrix(&self) -> RMatrix {
        diag(&self.t)
    }

    pub fn lambda0_matrix(&self) -> RMatrix {
        diag(&self.lambda0)
    }

    pub fn lambda1_matrix(&self) -> RMatrix {
        diag(&self.lambda1)
    }

    /// Reference vector `w₀`: one for density, `δ_ij/2` for pressure slots.
    pub fn w0(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        w[0] = 1.0;
        for d in 0..self.dim() {
            w[self.basis.pair_pos(d, d)] = 0.5;
        }
        w
    }

    /// `w_eq = Λ₀ w₀`.
    pub fn equilibrium_state(&self) -> MomentState {
        MomentState::equilibrium(self.basis.clone(), self.rho0, &vec![0.0; self.dim()], self.theta0)
            .expect("positive parameters")
    }
}
