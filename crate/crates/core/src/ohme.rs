//! The ordered system: moments up to degree `M − 1` plus, for every
//! `|α| = M − 2`, the contraction `Σ_d f_{α+2e_d}` stored in the slot
//! `α + 2e₁`.
//!
//! With the selector `P_b` and `P_p = T_O² P_b T⁻²` the linearized matrices
//! are `X_O = P_p X P_bᵀ`. The slot order follows the full basis.

use serde::Serialize;

use crate::assembly::LinearizedSystem;
use crate::basis::{MomentBasis, MultiIndex};
use crate::error::{invalid, Result};
use crate::linalg::{max_abs, RMatrix};
use crate::model::{ConservedRows, LinearModel, Scaling, SystemKind};

#[derive(Clone, Debug)]
pub struct OhmeProjection {
    pub basis: MomentBasis,
    pub labels: Vec<MultiIndex>,
    /// `N_O × N` selector and contraction.
    pub pb: RMatrix,
    /// Diagonal of `T_O`.
    pub t_o: Vec<f64>,
    /// `T_O² P_b T⁻²`.
    pub pp: RMatrix,
}

pub fn build_projection(basis: &MomentBasis) -> Result<OhmeProjection> {
    let order = basis.order();
    if order < 3 {
        return Err(invalid(format!("the ordered system needs M ≥ 3, got M = {order}")));
    }
    let dim = basis.dim();
    let twice_first = MultiIndex::pair(dim, 0, 0);
    // each label with the full-basis columns it sums
    let mut rows: Vec<(usize, Vec<usize>)> = basis
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.degree() < order)
        .map(|(pos, _)| (pos, vec![pos]))
        .collect();
    for alpha in basis.indices().iter().filter(|a| a.degree() + 2 == order) {
        let slot = basis
            .position(&alpha.plus(&twice_first))
            .expect("degree M is in the basis");
        let cols = (0..dim)
            .map(|d| {
                basis
                    .position(&alpha.plus(&MultiIndex::pair(dim, d, d)))
                    .expect("degree M")
            })
            .collect();
        rows.push((slot, cols));
    }
    rows.sort_by_key(|(slot, _)| *slot);

    let n = basis.len();
    let n_o = rows.len();
    let fact: Vec<f64> = basis.indices().iter().map(|a| a.factorial()).collect();
    let mut pb = RMatrix::zeros(n_o, n);
    let mut pp = RMatrix::zeros(n_o, n);
    let mut t_o = Vec::with_capacity(n_o);
    for (r, (_, cols)) in rows.iter().enumerate() {
        let total: f64 = cols.iter().map(|&c| fact[c]).sum();
        for &c in cols {
            pb[(r, c)] += 1.0;
            // (T_O²)_rr (T⁻²)_cc = c! / Σ (α+2e_d)!, exactly 1 for single columns
            pp[(r, c)] += fact[c] / total;
        }
        t_o.push(1.0 / total.sqrt());
    }
    let labels = rows.iter().map(|(slot, _)| basis.index(*slot)).collect();
    Ok(OhmeProjection {
        basis: basis.clone(),
        labels,
        pb,
        t_o,
        pp,
    })
}

impl OhmeProjection {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `P_p X P_bᵀ`.
    pub fn project(&self, x: &RMatrix) -> RMatrix {
        &self.pp * x * self.pb.transpose()
    }

    /// Diagonal of `P_p diag(v) P_bᵀ`.
    pub fn project_diagonal(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|r| (0..v.len()).map(|c| self.pp[(r, c)] * v[c] * self.pb[(r, c)]).sum())
            .collect()
    }

    /// Largest off-diagonal entry of `P_p diag(v) P_bᵀ` relative to its
    /// largest entry. Nonzero once contracted slots share columns.
    pub fn off_diagonal_fraction(&self, v: &[f64]) -> f64 {
        let m = self.project(&crate::linalg::diag(v));
        let mut off = m.clone();
        off.fill_diagonal(0.0);
        max_abs(&off) / max_abs(&m)
    }

    fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.labels.iter().position(|l| l == alpha)
    }
}

/// The projected linear model. The scalings `Λ₀`, `Λ₁` are carried over as
/// the diagonals of their projections.
pub fn assemble_ohme_linearized(lin: &LinearizedSystem, qbar: &RMatrix, proj: &OhmeProjection) -> Result<LinearModel> {
    let n = lin.len();
    let same_basis = proj.basis.dim() == lin.basis.dim() && proj.basis.order() == lin.basis.order();
    if !same_basis || qbar.shape() != (n, n) {
        return Err(invalid("projection, linearization and Jacobian must share one basis"));
    }
    let b = &lin.basis;
    let cs = b.conserved_slots();
    let find = |pos: usize| {
        proj.position(&b.index(pos))
            .expect("conserved slots have degree ≤ 2 < M")
    };
    let conserved = ConservedRows {
        zero: std::iter::once(cs.density).chain(cs.momentum).map(find).collect(),
        energy: cs.energy.into_iter().map(find).collect(),
    };
    let scaling = Scaling {
        rho0: lin.rho0,
        theta0: lin.theta0,
        t: proj.t_o.clone(),
        lambda0: proj.project_diagonal(&lin.lambda0),
        lambda1: proj.project_diagonal(&lin.lambda1),
    };
    LinearModel::from_parts(
        SystemKind::Ohme,
        b.dim(),
        b.order(),
        proj.labels.clone(),
        proj.project(&lin.dbar),
        lin.mbar.iter().map(|m| proj.project(m)).collect(),
        proj.project(qbar),
        scaling,
        conserved,
    )
}

/// Residuals of the identities relating `D̄` and `Q̄`.
#[derive(Clone, Debug, Serialize)]
pub struct SourceIdentities {
    /// `max |D̄⁻¹Q̄D̄ − Q̄|`.
    pub dinv_q_d: f64,
    /// `max |Q̄D̄⁻¹ − Q̄|`.
    pub q_dinv: f64,
    /// `max |D̄Q̄ − Q̄|`.
    pub d_q: f64,
    /// `max |D(w_eq)Q(w_eq)D(w_eq) − Q(w_eq)|`, relative to `max |Q(w_eq)|`.
    pub dqd_equilibrium: f64,
}

impl SourceIdentities {
    pub fn of(model: &LinearModel) -> Self {
        let q = &model.qbar;
        let d = &model.dbar;
        let di = &model.dbar_inv;
        let qe = model.equilibrium_q();
        let de = model.equilibrium_d();
        let scale = max_abs(&qe);
        let dqd = max_abs(&(&de * &qe * &de - &qe));
        Self {
            dinv_q_d: max_abs(&(di * q * d - q)),
            q_dinv: max_abs(&(q * di - q)),
            d_q: max_abs(&(d * q - q)),
            dqd_equilibrium: if scale > 0.0 { dqd / scale } else { dqd },
        }
    }

    pub fn max(&self) -> f64 {
        [self.dinv_q_d, self.q_dinv, self.d_q, self.dqd_equilibrium]
            .into_iter()
            .fold(0.0, f64::max)
    }
}
