//! Yong's first stability condition for the moment system at equilibrium.
//!
//! 1. The source has the relaxation structure `PQ = diag(0, Q̂)P` with `Q̂`
//!    invertible, checked through its rank characterization.
//! 2. A symmetric positive definite `A₀` makes every `A₀A_d` symmetric.
//! 3. `A₀Q + QᵀA₀` is negative semi-definite with the same kernel as `Q`.
//!
//! All checks work in the rest frame `u = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::{assemble_a, assemble_d, MomentState};
use crate::basis::MomentBasis;
use crate::collision::{kernel_count, CollisionModel};
use crate::error::{HmeError, Result};
use crate::linalg::{
    diag, max_abs, null_space, numerical_rank, subspace_distance, symmetric_eigen, symmetry_residual, RMatrix,
};
use crate::model::{ConservedRows, LinearModel, SystemKind};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct YongTolerances {
    /// Conserved rows of `Q`, relative to `max |Q|`.
    pub conserved_rows: f64,
    /// `max |A₀A_d − (A₀A_d)ᵀ|`.
    pub condition2: f64,
    /// Positive eigenvalues of `Sym`, relative to its largest magnitude.
    pub nsd: f64,
    /// Sine of the largest principal angle between `ker Sym` and `ker Q`.
    pub kernel_angle: f64,
    /// Reconstruction `Sym = −P₁ᵀ J P₁`, relative to `max |Sym|`.
    pub reconstruction: f64,
}

impl Default for YongTolerances {
    fn default() -> Self {
        Self {
            conserved_rows: 1e-10,
            condition2: 1e-11,
            nsd: 1e-10,
            kernel_angle: 1e-8,
            reconstruction: 1e-10,
        }
    }
}

impl YongTolerances {
    /// Quadrature-based Jacobians are only exact to rounding of the rules.
    pub fn for_model(model: &CollisionModel) -> Self {
        let mut t = Self::default();
        if model.is_quadrature() {
            t.conserved_rows = 1e-6;
            t.nsd = 1e-6;
            t.reconstruction = 1e-5;
        }
        t
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition1 {
    pub conserved_rows_zero: bool,
    pub conserved_row_residual: f64,
    pub rank_q: usize,
    pub rank_q2: usize,
    pub expected_rank: usize,
    pub pass: bool,
}

/// Rows `{0, e_i}` vanish, the energy rows sum to zero, and
/// `rank Q = rank Q² = N − D − 2`.
pub fn check_condition1(q: &RMatrix, conserved: &ConservedRows, tol: f64) -> Condition1 {
    let n = q.nrows();
    let scale = max_abs(q);
    let mut residual: f64 = conserved
        .zero
        .iter()
        .map(|&r| q.row(r).iter().fold(0.0f64, |a, x| a.max(x.abs())))
        .fold(0.0, f64::max);
    if !conserved.energy.is_empty() {
        let mut sum = q.row(conserved.energy[0]).into_owned();
        for &r in &conserved.energy[1..] {
            sum += q.row(r);
        }
        residual = residual.max(sum.iter().fold(0.0f64, |a, x| a.max(x.abs())));
    }
    let residual = if scale > 0.0 { residual / scale } else { 0.0 };
    let rank_q = numerical_rank(q, RANK_REL_TOL);
    let rank_q2 = numerical_rank(&(q * q), RANK_REL_TOL);
    let expected_rank = n.saturating_sub(conserved.count());
    let conserved_rows_zero = residual <= tol;
    Condition1 {
        conserved_rows_zero,
        conserved_row_residual: residual,
        rank_q,
        rank_q2,
        expected_rank,
        pass: conserved_rows_zero && rank_q == expected_rank && rank_q2 == rank_q,
    }
}

/// `A₀ = ((Λ₁T)⁻¹D(w))ᵀ (Λ₁T)⁻¹D(w)` with `Λ₁` from the state's own density
/// and temperature.
pub fn build_a0(state: &MomentState) -> Result<RMatrix> {
    require_rest_frame(state)?;
    let d = assemble_d(state);
    let (rho, theta) = (state.rho(), state.theta());
    let scale: Vec<f64> = state
        .basis()
        .indices()
        .iter()
        .map(|a| a.factorial().sqrt() / (rho * theta.powf(a.degree() as f64 / 2.0)))
        .collect();
    let f = diag(&scale) * d;
    Ok(f.transpose() * f)
}

fn require_rest_frame(state: &MomentState) -> Result<()> {
    let u = state.velocity();
    if u.iter().any(|x| *x != 0.0) {
        return Err(HmeError::Unsupported(format!(
            "the symmetrizer is built in the rest frame u = 0, got u = {u:?}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition2 {
    pub states: usize,
    /// Worst `max |A₀A_d − (A₀A_d)ᵀ|` for each direction.
    pub max_sym_residual: Vec<f64>,
    pub min_a0_eig: f64,
    pub pass: bool,
}

impl Condition2 {
    fn empty(dim: usize) -> Self {
        Self {
            states: 0,
            max_sym_residual: vec![0.0; dim],
            min_a0_eig: f64::INFINITY,
            pass: true,
        }
    }

    fn record(&mut self, a0: &RMatrix, a: &[RMatrix], tol: f64) {
        self.states += 1;
        for (worst, ad) in self.max_sym_residual.iter_mut().zip(a) {
            *worst = worst.max(symmetry_residual(&(a0 * ad)));
        }
        let (ev, _) = symmetric_eigen(a0);
        self.min_a0_eig = self.min_a0_eig.min(ev[0]);
        self.pass = self.min_a0_eig > 0.0 && self.max_sym_residual.iter().all(|r| *r <= tol);
    }

    fn merge(&mut self, other: &Self, tol: f64) {
        self.states += other.states;
        for (a, b) in self.max_sym_residual.iter_mut().zip(&other.max_sym_residual) {
            *a = a.max(*b);
        }
        self.min_a0_eig = self.min_a0_eig.min(other.min_a0_eig);
        self.pass = self.min_a0_eig > 0.0 && self.max_sym_residual.iter().all(|r| *r <= tol);
    }
}

/// Condition 2 at rest-frame states away from equilibrium.
pub fn check_condition2(states: &[MomentState], tol: f64) -> Result<Condition2> {
    let dim = states.first().map_or(0, |s| s.basis().dim());
    let mut report = Condition2::empty(dim);
    for s in states {
        let a0 = build_a0(s)?;
        let a: Vec<RMatrix> = (0..dim).map(|d| assemble_a(s, d)).collect::<Result<_>>()?;
        report.record(&a0, &a, tol);
    }
    Ok(report)
}

/// `A₀` of a linear model at its equilibrium.
pub fn equilibrium_a0(model: &LinearModel) -> RMatrix {
    let s = &model.scaling;
    let scale: Vec<f64> = s.lambda1.iter().zip(&s.t).map(|(l, t)| 1.0 / (l * t)).collect();
    let f = diag(&scale) * model.equilibrium_d();
    f.transpose() * f
}

/// Condition 2 for a linear model at its equilibrium.
pub fn check_condition2_equilibrium(model: &LinearModel, tol: f64) -> Condition2 {
    let a0 = equilibrium_a0(model);
    let a: Vec<RMatrix> = (0..model.dim).map(|d| model.equilibrium_a(d)).collect();
    let mut report = Condition2::empty(model.dim);
    report.record(&a0, &a, tol);
    report
}

/// Rest-frame states with `ρ, θ ∈ [0.5, 2)` and every non-equilibrium
/// coefficient `|f_α| ≤ 0.1`.
pub fn random_rest_states(basis: &MomentBasis, count: usize, seed: u64) -> Result<Vec<MomentState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = basis.dim();
    (0..count)
        .map(|_| {
            let rho = rng.random_range(0.5..2.0);
            let theta = rng.random_range(0.5..2.0);
            let mut w = vec![0.0; basis.len()];
            w[basis.zero_pos()] = rho;
            // trace-free diagonal stress keeps θ unchanged
            let diag_f: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.05..0.05)).collect();
            let mean = diag_f.iter().sum::<f64>() / dim as f64;
            for (pos, alpha) in basis.indices().iter().enumerate() {
                match alpha.degree() {
                    0 | 1 => {}
                    2 => {
                        let axes: Vec<usize> = (0..dim).filter(|&d| alpha.get(d) > 0).collect();
                        w[pos] = if axes.len() == 1 {
                            0.5 * rho * theta + diag_f[axes[0]] - mean
                        } else {
                            rng.random_range(-0.1..0.1)
                        };
                    }
                    _ => w[pos] = rng.random_range(-0.1..0.1),
                }
            }
            MomentState::new(basis.clone(), w)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition3 {
    pub sym_residual: f64,
    /// Largest eigenvalue of `Sym`, relative to its largest magnitude.
    pub max_eig: f64,
    pub kernel_dim: usize,
    pub expected_kernel_dim: usize,
    pub kernel_angle: f64,
    pub ker_match: bool,
    /// `Sym` against `2√θ₀ (Λ₁T)⁻ᵀ (T⁻¹Q̄T) (Λ₁T)⁻¹`, relative to `max |Sym|`.
    pub identity_residual: f64,
    pub p_reconstruction_residual: f64,
    /// Whether the `P₁` built here also block-diagonalizes `Q`. Informational.
    pub joint_p_residual: f64,
    pub pass: bool,
}

/// `Sym = A₀Q + QᵀA₀` at equilibrium.
pub fn check_condition3(model: &LinearModel, tol: &YongTolerances) -> Condition3 {
    let q = model.equilibrium_q();
    let a0 = equilibrium_a0(model);
    let sym = &a0 * &q + q.transpose() * &a0;
    let scale = max_abs(&sym);
    let rel = |x: f64| if scale > 0.0 { x / scale } else { x };

    let s = &model.scaling;
    let lt_inv = diag(
        &s.lambda1
            .iter()
            .zip(&s.t)
            .map(|(l, t)| 1.0 / (l * t))
            .collect::<Vec<_>>(),
    );
    let expected =
        &lt_inv * (model.t_inv_matrix() * &model.qbar * model.t_matrix()) * &lt_inv * (2.0 * s.theta0.sqrt());
    let identity_residual = rel(max_abs(&(&sym - expected)));

    let (ev, vecs) = symmetric_eigen(&sym);
    let top = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let max_eig = if top > 0.0 {
        ev.last().copied().unwrap_or(0.0) / top
    } else {
        0.0
    };
    let kernel_dim = kernel_count(&ev);
    let n = model.len();
    let expected_kernel_dim = model.conserved.count();

    // kernel eigenvalues are the ones closest to zero
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ev[a].abs().total_cmp(&ev[b].abs()));
    let ker_sym = RMatrix::from_fn(n, kernel_dim, |r, c| vecs[(r, order[c])]);
    let ker_q = null_space(&q, RANK_REL_TOL);
    let kernel_angle = subspace_distance(&ker_sym, &ker_q);
    let ker_match = kernel_angle <= tol.kernel_angle;

    // Sym = −P₁ᵀ J P₁, kernel rows first
    let mut p1 = RMatrix::zeros(n, n);
    for (row, &j) in order.iter().enumerate() {
        let w = if row < kernel_dim { 1.0 } else { ev[j].abs().sqrt() };
        for c in 0..n {
            p1[(row, c)] = w * vecs[(c, j)];
        }
    }
    let mut j_diag = vec![1.0; n];
    j_diag[..kernel_dim].iter_mut().for_each(|x| *x = 0.0);
    let recon = &sym + p1.transpose() * diag(&j_diag) * &p1;
    let p_reconstruction_residual = rel(max_abs(&recon));

    let joint_p_residual = match p1.clone().try_inverse() {
        Some(inv) => {
            let x = &p1 * &q * inv;
            let xs = max_abs(&x);
            let mut worst: f64 = 0.0;
            for r in 0..n {
                for c in 0..n {
                    if r < kernel_dim || c < kernel_dim {
                        worst = worst.max(x[(r, c)].abs());
                    }
                }
            }
            if xs > 0.0 {
                worst / xs
            } else {
                0.0
            }
        }
        None => f64::INFINITY,
    };

    let sym_residual = rel(symmetry_residual(&sym));
    let pass = max_eig <= tol.nsd
        && kernel_dim == expected_kernel_dim
        && ker_match
        && p_reconstruction_residual <= tol.reconstruction;
    Condition3 {
        sym_residual,
        max_eig,
        kernel_dim,
        expected_kernel_dim,
        kernel_angle,
        ker_match,
        identity_residual,
        p_reconstruction_residual,
        joint_p_residual,
        pass,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct YongReport {
    pub system: SystemKind,
    pub condition1: Condition1,
    pub condition2: Condition2,
    pub condition3: Condition3,
    pub pass: bool,
}

/// All three conditions. Condition 2 is checked at the model's equilibrium
/// and at each of `rest_states`, which must share the model's basis.
pub fn check_yong(model: &LinearModel, rest_states: &[MomentState], tol: &YongTolerances) -> Result<YongReport> {
    let condition1 = check_condition1(&model.equilibrium_q(), &model.conserved, tol.conserved_rows);
    let mut condition2 = check_condition2_equilibrium(model, tol.condition2);
    if !rest_states.is_empty() {
        if model.kind != SystemKind::Hme {
            return Err(HmeError::Unsupported(
                "non-equilibrium states are only supported for the full system".into(),
            ));
        }
        condition2.merge(&check_condition2(rest_states, tol.condition2)?, tol.condition2);
    }
    let condition3 = check_condition3(model, tol);
    let pass = condition1.pass && condition2.pass && condition3.pass;
    Ok(YongReport {
        system: model.kind,
        condition1,
        condition2,
        condition3,
        pass,
    })
}
