//! A linearized moment system `D̄ ∂_t w̄ + Σ_d M̄_d D̄ ∂_{x_d} w̄ = Q̄ w̄` in a
//! form shared by the full and the ordered (projected) systems.

use serde::{Deserialize, Serialize};

use crate::assembly::LinearizedSystem;
use crate::basis::MultiIndex;
use crate::error::{invalid, HmeError, Result};
use crate::linalg::{diag, RMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Hme,
    Ohme,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hme => "hme",
            Self::Ohme => "ohme",
        }
    }
}

/// Conserved rows: density and momentum rows must vanish, the energy rows
/// must sum to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservedRows {
    pub zero: Vec<usize>,
    pub energy: Vec<usize>,
}

impl ConservedRows {
    pub fn count(&self) -> usize {
        self.zero.len() + 1
    }
}

#[derive(Clone, Debug)]
pub struct LinearModel {
    pub kind: SystemKind,
    pub dim: usize,
    pub order: usize,
    /// Multi-index labelling each slot.
    pub labels: Vec<MultiIndex>,
    pub dbar: RMatrix,
    pub dbar_inv: RMatrix,
    pub mbar: Vec<RMatrix>,
    /// `Ā_d = D̄⁻¹ M̄_d D̄`.
    pub abar: Vec<RMatrix>,
    pub qbar: RMatrix,
    /// `D̄⁻¹ Q̄`, the source of `∂_t w̄ + Σ Ā_d ∂_{x_d} w̄ = D̄⁻¹ Q̄ w̄`.
    pub source: RMatrix,
    pub scaling: Scaling,
    pub conserved: ConservedRows,
}

/// The diagonal scalings relating the model to physical variables at the
/// equilibrium `(ρ₀, 0, θ₀)`.
#[derive(Clone, Debug, Serialize)]
pub struct Scaling {
    pub rho0: f64,
    pub theta0: f64,
    /// Diagonal symmetrizer.
    pub t: Vec<f64>,
    pub lambda0: Vec<f64>,
    pub lambda1: Vec<f64>,
}

impl LinearModel {
    pub fn hme(lin: &LinearizedSystem, qbar: RMatrix) -> Result<Self> {
        let n = lin.len();
        if qbar.shape() != (n, n) {
            return Err(invalid(format!(
                "Jacobian shape {:?} does not match N = {n}",
                qbar.shape()
            )));
        }
        let b = &lin.basis;
        let cs = b.conserved_slots();
        let conserved = ConservedRows {
            zero: std::iter::once(cs.density).chain(cs.momentum).collect(),
            energy: cs.energy,
        };
        let scaling = Scaling {
            rho0: lin.rho0,
            theta0: lin.theta0,
            t: lin.t.clone(),
            lambda0: lin.lambda0.clone(),
            lambda1: lin.lambda1.clone(),
        };
        // same arithmetic path as the projected systems, so that identical
        // inputs give identical models
        Self::from_parts(
            SystemKind::Hme,
            b.dim(),
            b.order(),
            b.indices().to_vec(),
            lin.dbar.clone(),
            lin.mbar.clone(),
            qbar,
            scaling,
            conserved,
        )
    }

    /// Assembles a model from projected matrices; `D̄` must be invertible.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: SystemKind,
        dim: usize,
        order: usize,
        labels: Vec<MultiIndex>,
        dbar: RMatrix,
        mbar: Vec<RMatrix>,
        qbar: RMatrix,
        scaling: Scaling,
        conserved: ConservedRows,
    ) -> Result<Self> {
        let n = labels.len();
        let shapes_ok = dbar.shape() == (n, n)
            && qbar.shape() == (n, n)
            && mbar.len() == dim
            && mbar.iter().all(|m| m.shape() == (n, n))
            && [&scaling.t, &scaling.lambda0, &scaling.lambda1]
                .iter()
                .all(|v| v.len() == n);
        if !shapes_ok {
            return Err(invalid(format!("inconsistent shapes for a system of {n} moments")));
        }
        let dbar_inv = dbar
            .clone()
            .try_inverse()
            .ok_or_else(|| HmeError::Numerical("projected D̄ is singular".into()))?;
        let abar = mbar.iter().map(|m| &dbar_inv * m * &dbar).collect();
        let source = &dbar_inv * &qbar;
        Ok(Self {
            kind,
            dim,
            order,
            labels,
            dbar,
            dbar_inv,
            mbar,
            abar,
            qbar,
            source,
            scaling,
            conserved,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn t_matrix(&self) -> RMatrix {
        diag(&self.scaling.t)
    }

    pub fn t_inv_matrix(&self) -> RMatrix {
        diag(&recip(&self.scaling.t))
    }

    /// `D(w_eq) = Λ₁ D̄ Λ₀⁻¹`.
    pub fn equilibrium_d(&self) -> RMatrix {
        let s = &self.scaling;
        diag(&s.lambda1) * &self.dbar * diag(&recip(&s.lambda0))
    }

    /// `A_d(w_eq) = √θ₀ Λ₀ Ā_d Λ₀⁻¹`.
    pub fn equilibrium_a(&self, axis: usize) -> RMatrix {
        let s = &self.scaling;
        diag(&s.lambda0) * &self.abar[axis] * diag(&recip(&s.lambda0)) * s.theta0.sqrt()
    }

    /// `Q(w_eq) = √θ₀ Λ₁ Q̄ Λ₁⁻¹`.
    pub fn equilibrium_q(&self) -> RMatrix {
        let s = &self.scaling;
        diag(&s.lambda1) * &self.qbar * diag(&recip(&s.lambda1)) * s.theta0.sqrt()
    }
}

fn recip(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| 1.0 / x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_a, assemble_d, linearize};
    use crate::basis::MomentBasis;
    use crate::collision::{unscale_q, CollisionModel};
    use crate::linalg::max_abs;

    #[test]
    fn equilibrium_matrices_match_direct_assembly() {
        for (dim, order) in [(1, 4), (2, 3), (3, 3)] {
            let b = MomentBasis::new(dim, order).unwrap();
            let lin = linearize(&b, 1.7, 0.6).unwrap();
            let c = CollisionModel::Shakhov {
                tau: 0.4,
                pr: 2.0 / 3.0,
            };
            let qbar = c.qbar(&b).unwrap();
            let m = LinearModel::hme(&lin, qbar.clone()).unwrap();
            let eq = lin.equilibrium_state();
            let d = assemble_d(&eq);
            assert!(max_abs(&(m.equilibrium_d() - &d)) < 1e-12 * max_abs(&d));
            for axis in 0..dim {
                let a = assemble_a(&eq, axis).unwrap();
                assert!(max_abs(&(m.equilibrium_a(axis) - &a)) < 1e-12 * max_abs(&a));
            }
            let q = unscale_q(&lin, &qbar).unwrap();
            assert!(max_abs(&(m.equilibrium_q() - q)) < 1e-14);
        }
    }

    #[test]
    fn from_parts_rejects_bad_shapes() {
        let b = MomentBasis::new(1, 3).unwrap();
        let lin = linearize(&b, 1.0, 1.0).unwrap();
        let m = LinearModel::hme(&lin, RMatrix::zeros(4, 4)).unwrap();
        let bad = LinearModel::from_parts(
            SystemKind::Ohme,
            1,
            3,
            m.labels.clone(),
            m.dbar.clone(),
            m.mbar.clone(),
            RMatrix::zeros(3, 3),
            m.scaling.clone(),
            m.conserved.clone(),
        );
        assert!(bad.is_err());
        assert!(LinearModel::hme(&lin, RMatrix::zeros(3, 3)).is_err());
    }
}
