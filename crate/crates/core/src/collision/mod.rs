//! Linearized collision Jacobians `Q̄` at the Maxwellian.
//!
//! All Jacobians are dimensionless: they are evaluated at `ρ = θ = 1` and the
//! relaxation time passed in is `τ̄ = τ √θ₀ / L`. [`unscale_q`] maps back to
//! physical variables.

mod binary;
mod relaxation;

pub use binary::{qbar_binary, MAX_ANGLES, MAX_BINARY_ORDER, MIN_QUADRATURE_ORDER};
pub use relaxation::{
    esbgk_source_jacobian, qbar_bgk, qbar_esbgk, qbar_esbgk_closed_form, qbar_shakhov, EsBgkJacobian,
};

use serde::{Deserialize, Serialize};

use crate::assembly::LinearizedSystem;
use crate::basis::MomentBasis;
use crate::error::{invalid, Result};
use crate::linalg::{diag, symmetric_eigen, symmetry_residual, RMatrix};

/// Eigenvalues of `sym(T⁻¹Q̄T)` within this fraction of the largest magnitude count as zero.
pub const KERNEL_REL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CollisionModel {
    /// Collisionless transport, `Q̄ = 0`.
    None,
    Bgk {
        tau: f64,
    },
    Shakhov {
        tau: f64,
        pr: f64,
    },
    EsBgk {
        tau: f64,
        pr: f64,
    },
    /// Constant kernel `B₀` with `nodes` Gauss-Hermite points per velocity
    /// axis and `angles` trapezoidal points on the half circle.
    Binary {
        kernel: f64,
        nodes: usize,
        angles: usize,
    },
}

impl CollisionModel {
    pub const DEFAULT_PRANDTL: f64 = 2.0 / 3.0;

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Bgk { .. } => "bgk",
            Self::Shakhov { .. } => "shakhov",
            Self::EsBgk { .. } => "es-bgk",
            Self::Binary { .. } => "binary",
        }
    }

    pub fn is_quadrature(&self) -> bool {
        matches!(self, Self::Binary { .. })
    }

    /// Relaxation time, if the model has one.
    pub fn tau(&self) -> Option<f64> {
        match self {
            Self::Bgk { tau } | Self::Shakhov { tau, .. } | Self::EsBgk { tau, .. } => Some(*tau),
            _ => None,
        }
    }

    pub fn prandtl(&self) -> Option<f64> {
        match self {
            Self::Shakhov { pr, .. } | Self::EsBgk { pr, .. } => Some(*pr),
            _ => None,
        }
    }

    /// Default symmetry and semi-definiteness tolerance: tight for the
    /// closed forms, looser for quadrature.
    pub fn default_tolerance(&self) -> f64 {
        if self.is_quadrature() {
            1e-6
        } else {
            1e-10
        }
    }

    /// Scale for the semi-definiteness test, `1/τ` where it exists.
    pub fn rate_scale(&self) -> f64 {
        self.tau().map_or(1.0, |t| 1.0 / t)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {x}")))
            }
        };
        match self {
            Self::None => Ok(()),
            Self::Bgk { tau } => positive("tau", *tau),
            Self::Shakhov { tau, pr } | Self::EsBgk { tau, pr } => {
                positive("tau", *tau)?;
                positive("Pr", *pr)
            }
            Self::Binary { kernel, nodes, angles } => {
                positive("kernel magnitude", *kernel)?;
                if *nodes < MIN_QUADRATURE_ORDER || *angles < MIN_QUADRATURE_ORDER {
                    return Err(invalid(format!(
                        "quadrature orders must be at least {MIN_QUADRATURE_ORDER}, got ({nodes}, {angles})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The dimensionless Jacobian `Q̄` for `basis`. ES-BGK uses the recursion path.
    pub fn qbar(&self, basis: &MomentBasis) -> Result<RMatrix> {
        self.validate()?;
        match self {
            Self::None => Ok(RMatrix::zeros(basis.len(), basis.len())),
            Self::Bgk { tau } => qbar_bgk(basis, *tau),
            Self::Shakhov { tau, pr } => qbar_shakhov(basis, *tau, *pr),
            Self::EsBgk { tau, pr } => Ok(qbar_esbgk(basis, *tau, *pr)?.qbar),
            Self::Binary { kernel, nodes, angles } => qbar_binary(basis, *kernel, *nodes, *angles),
        }
    }

    pub fn jacobian(&self, basis: &MomentBasis) -> Result<JacobianResult> {
        let q = self.qbar(basis)?;
        let t: Vec<f64> = basis.indices().iter().map(|a| 1.0 / a.factorial().sqrt()).collect();
        Ok(JacobianResult::analyze(q, &t))
    }
}

/// `Q̄` with the structural diagnostics of its symmetrized form.
#[derive(Clone, Debug, Serialize)]
pub struct JacobianResult {
    #[serde(skip)]
    pub qbar: RMatrix,
    /// `max |S − Sᵀ|` for `S = T⁻¹Q̄T`.
    pub symmetry_residual: f64,
    /// Largest eigenvalue of `(S + Sᵀ)/2`.
    pub max_eig: f64,
    /// Number of eigenvalues with `|λ| ≤ 1e−8 · max|λ|`.
    pub kernel_dim: usize,
}

impl JacobianResult {
    /// Diagnostics for `Q̄` under the diagonal symmetrizer `t`.
    pub fn analyze(qbar: RMatrix, t: &[f64]) -> Self {
        let s = symmetrized(&qbar, t);
        let symmetry_residual = symmetry_residual(&s);
        let (ev, _) = symmetric_eigen(&s);
        let max_eig = ev.last().copied().unwrap_or(0.0);
        let kernel_dim = kernel_count(&ev);
        Self {
            qbar,
            symmetry_residual,
            max_eig,
            kernel_dim,
        }
    }
}

/// `T⁻¹ Q T` for diagonal `T`.
pub fn symmetrized(q: &RMatrix, t: &[f64]) -> RMatrix {
    let inv: Vec<f64> = t.iter().map(|x| 1.0 / x).collect();
    diag(&inv) * q * diag(t)
}

pub(crate) fn kernel_count(ev: &[f64]) -> usize {
    let top = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if top == 0.0 {
        return ev.len();
    }
    ev.iter().filter(|x| x.abs() <= KERNEL_REL_TOL * top).count()
}

/// `Q(w_eq) = (√θ₀/L) Λ₁ Q̄ Λ₁⁻¹` with `L = 1`.
pub fn unscale_q(lin: &LinearizedSystem, qbar: &RMatrix) -> Result<RMatrix> {
    if qbar.shape() != (lin.len(), lin.len()) {
        return Err(invalid(format!(
            "Jacobian shape {:?} does not match N = {}",
            qbar.shape(),
            lin.len()
        )));
    }
    let inv: Vec<f64> = lin.lambda1.iter().map(|x| 1.0 / x).collect();
    Ok(lin.lambda1_matrix() * qbar * diag(&inv) * lin.theta0.sqrt())
}
