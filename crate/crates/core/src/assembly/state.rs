use serde::Serialize;

use crate::basis::{MomentBasis, MultiIndex};
use crate::error::{HmeError, Result};

/// The unknown vector `w`: density, velocity, `p_ij/(1+δ_ij)` and the
/// expansion coefficients `f_α` for `3 ≤ |α| ≤ M`.
#[derive(Clone, Debug)]
pub struct MomentState {
    basis: MomentBasis,
    w: Vec<f64>,
}

/// Physical quantities recovered from a state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments {
    /// Expansion coefficients `f_α` for every basis index.
    pub f: Vec<f64>,
    pub rho: f64,
    pub u: Vec<f64>,
    pub theta: f64,
    pub p: f64,
    /// Full pressure tensor `p_ij`.
    pub pressure: Vec<Vec<f64>>,
    /// Deviatoric stress `σ_ij = p_ij − p δ_ij`.
    pub stress: Vec<Vec<f64>>,
    /// `q_i = 2 f_{3e_i} + Σ_d f_{e_i+2e_d}`.
    pub heat_flux: Vec<f64>,
}

impl MomentState {
    pub fn new(basis: MomentBasis, w: Vec<f64>) -> Result<Self> {
        if w.len() != basis.len() {
            return Err(HmeError::InvalidState(format!(
                "state has {} entries, basis needs {}",
                w.len(),
                basis.len()
            )));
        }
        if let Some(i) = w.iter().position(|x| !x.is_finite()) {
            return Err(HmeError::InvalidState(format!(
                "entry {} is not finite",
                basis.index(i)
            )));
        }
        let s = Self { basis, w };
        if s.rho() <= 0.0 {
            return Err(HmeError::InvalidState(format!(
                "density must be positive, got {}",
                s.rho()
            )));
        }
        if s.theta() <= 0.0 {
            return Err(HmeError::InvalidState(format!(
                "temperature must be positive, got {}",
                s.theta()
            )));
        }
        Ok(s)
    }

    /// Maxwellian state: all `f_α` with `|α| ≥ 2` vanish and `p_ij = ρθ δ_ij`.
    pub fn equilibrium(basis: MomentBasis, rho: f64, u: &[f64], theta: f64) -> Result<Self> {
        if u.len() != basis.dim() {
            return Err(HmeError::InvalidState(format!(
                "velocity has {} components, expected {}",
                u.len(),
                basis.dim()
            )));
        }
        let mut w = vec![0.0; basis.len()];
        w[basis.zero_pos()] = rho;
        for (d, ud) in u.iter().enumerate() {
            w[basis.unit_pos(d)] = *ud;
            w[basis.pair_pos(d, d)] = 0.5 * rho * theta;
        }
        Self::new(basis, w)
    }

    /// Copy with `w_α` replaced.
    pub fn with_entry(&self, alpha: &MultiIndex, value: f64) -> Result<Self> {
        let pos = self
            .basis
            .position(alpha)
            .ok_or_else(|| HmeError::InvalidState(format!("index {alpha} is outside the basis")))?;
        let mut w = self.w.clone();
        w[pos] = value;
        Self::new(self.basis.clone(), w)
    }

    pub fn basis(&self) -> &MomentBasis {
        &self.basis
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn rho(&self) -> f64 {
        self.w[0]
    }

    pub fn velocity(&self) -> Vec<f64> {
        (0..self.basis.dim()).map(|d| self.w[self.basis.unit_pos(d)]).collect()
    }

    /// Scalar pressure `p = (1/D) Σ_d p_dd`.
    pub fn pressure(&self) -> f64 {
        let dim = self.basis.dim();
        (0..dim).map(|d| 2.0 * self.w[self.basis.pair_pos(d, d)]).sum::<f64>() / dim as f64
    }

    pub fn theta(&self) -> f64 {
        self.pressure() / self.rho()
    }

    /// `f_α` for every index of the basis.
    pub fn coefficients(&self) -> Vec<f64> {
        let b = &self.basis;
        let dim = b.dim();
        let mut f = self.w.clone();
        let p = self.pressure();
        for d in 0..dim {
            f[b.unit_pos(d)] = 0.0;
        }
        for i in 0..dim {
            // diagonal: σ_ii/2 = w_{2e_i} − p/2
            f[b.pair_pos(i, i)] = self.w[b.pair_pos(i, i)] - 0.5 * p;
        }
        f
    }

    pub fn moments(&self) -> Moments {
        let b = &self.basis;
        let dim = b.dim();
        let f = self.coefficients();
        let rho = self.rho();
        let p = self.pressure();
        let mut pressure = vec![vec![0.0; dim]; dim];
        let mut stress = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let scale = if i == j { 2.0 } else { 1.0 };
                pressure[i][j] = scale * self.w[b.pair_pos(i, j)];
                stress[i][j] = scale * f[b.pair_pos(i, j)];
            }
        }
        let heat_flux = (0..dim)
            .map(|i| {
                let e = MultiIndex::unit(dim, i);
                let three = MultiIndex::new(&{
                    let mut v = vec![0; dim];
                    v[i] = 3;
                    v
                })
                .expect("valid index");
                let mut q = b.position(&three).map_or(0.0, |k| 2.0 * f[k]);
                for d in 0..dim {
                    let a = e.plus(&MultiIndex::pair(dim, d, d));
                    q += b.position(&a).map_or(0.0, |k| f[k]);
                }
                q
            })
            .collect();
        Moments {
            f,
            rho,
            u: self.velocity(),
            theta: p / rho,
            p,
            pressure,
            stress,
            heat_flux,
        }
    }
}
