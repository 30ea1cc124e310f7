use std::ops::{Add, Mul, Sub};

use crate::assembly::MomentState;
use crate::basis::{MomentBasis, MultiIndex};
use crate::error::{invalid, Result};
use crate::linalg::{max_abs, RMatrix};

fn check_rate(tau: f64, pr: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("relaxation time must be positive, got {tau}")));
    }
    if !(pr > 0.0 && pr.is_finite()) {
        return Err(invalid(format!("Prandtl number must be positive, got {pr}")));
    }
    Ok(())
}

/// `I − Σ_{|α|≤1} E_{α,α} − (1/D) Σ_{ij} E_{2e_i,2e_j}`.
fn bgk_bracket(basis: &MomentBasis) -> RMatrix {
    let n = basis.len();
    let dim = basis.dim();
    let mut m = RMatrix::identity(n, n);
    for (k, a) in basis.indices().iter().enumerate() {
        if a.degree() <= 1 {
            m[(k, k)] -= 1.0;
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            m[(basis.pair_pos(i, i), basis.pair_pos(j, j))] -= 1.0 / dim as f64;
        }
    }
    m
}

/// BGK Jacobian `−(1/τ)(I − Σ_{|α|≤1} E_{α,α} − (1/D) Σ_{ij} E_{2e_i,2e_j})`.
pub fn qbar_bgk(basis: &MomentBasis, tau: f64) -> Result<RMatrix> {
    check_rate(tau, 1.0)?;
    Ok(bgk_bracket(basis) * (-1.0 / tau))
}

/// Shakhov Jacobian: the BGK bracket minus the heat-flux block
/// `(1−Pr)/(D+2) Σ_{ijk} (1 + 2δ_ij) E_{e_i+2e_k, e_i+2e_j}`.
pub fn qbar_shakhov(basis: &MomentBasis, tau: f64, pr: f64) -> Result<RMatrix> {
    check_rate(tau, pr)?;
    let dim = basis.dim();
    let mut m = bgk_bracket(basis);
    let c = (1.0 - pr) / (dim + 2) as f64;
    for i in 0..dim {
        let e = MultiIndex::unit(dim, i);
        for j in 0..dim {
            let col = basis.position(&e.plus(&MultiIndex::pair(dim, j, j)));
            for k in 0..dim {
                let row = basis.position(&e.plus(&MultiIndex::pair(dim, k, k)));
                if let (Some(r), Some(c2)) = (row, col) {
                    let w = if i == j { 3.0 } else { 1.0 };
                    m[(r, c2)] -= c * w;
                }
            }
        }
    }
    Ok(m * (-1.0 / tau))
}

/// The displayed ES-BGK closed form
/// `−(Pr/τ)(I − Σ_{|α|≤2} E_{α,α}) − (1/τ)(Σ_d E_{2e_d,2e_d} − (1/D) Σ_{ij} E_{2e_i,2e_j})`.
pub fn qbar_esbgk_closed_form(basis: &MomentBasis, tau: f64, pr: f64) -> Result<RMatrix> {
    check_rate(tau, pr)?;
    let n = basis.len();
    let dim = basis.dim();
    let mut m = RMatrix::zeros(n, n);
    for (k, a) in basis.indices().iter().enumerate() {
        if a.degree() > 2 {
            m[(k, k)] = -pr / tau;
        }
    }
    for i in 0..dim {
        m[(basis.pair_pos(i, i), basis.pair_pos(i, i))] -= 1.0 / tau;
        for j in 0..dim {
            m[(basis.pair_pos(i, i), basis.pair_pos(j, j))] += 1.0 / (dim as f64 * tau);
        }
    }
    Ok(m)
}

/// ES-BGK Jacobian by exact differentiation of `S_α = (Pr/τ)(G_α − f_α)`,
/// evaluated at the unit Maxwellian. Also reports the displayed closed form.
#[derive(Clone, Debug)]
pub struct EsBgkJacobian {
    pub qbar: RMatrix,
    pub closed_form: RMatrix,
    /// `max |Q̄_recursion − Q̄_closed|`.
    pub discrepancy: f64,
}

pub fn qbar_esbgk(basis: &MomentBasis, tau: f64, pr: f64) -> Result<EsBgkJacobian> {
    check_rate(tau, pr)?;
    let eq = MomentState::equilibrium(basis.clone(), 1.0, &vec![0.0; basis.dim()], 1.0)?;
    let qbar = esbgk_source_jacobian(&eq, tau, pr)?;
    let closed_form = qbar_esbgk_closed_form(basis, tau, pr)?;
    let discrepancy = max_abs(&(&qbar - &closed_form));
    Ok(EsBgkJacobian {
        qbar,
        closed_form,
        discrepancy,
    })
}

/// Forward-mode value with a dense gradient over the state entries.
#[derive(Clone, Debug)]
struct Dual {
    v: f64,
    g: Vec<f64>,
}

impl Dual {
    fn constant(v: f64, n: usize) -> Self {
        Self { v, g: vec![0.0; n] }
    }

    fn var(v: f64, k: usize, n: usize) -> Self {
        let mut g = vec![0.0; n];
        g[k] = 1.0;
        Self { v, g }
    }

    fn scale(&self, c: f64) -> Self {
        Self {
            v: self.v * c,
            g: self.g.iter().map(|x| x * c).collect(),
        }
    }

    fn recip(&self) -> Self {
        let inv = 1.0 / self.v;
        Self {
            v: inv,
            g: self.g.iter().map(|x| -x * inv * inv).collect(),
        }
    }
}

impl Add for &Dual {
    type Output = Dual;
    fn add(self, o: &Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Dual {
    type Output = Dual;
    fn sub(self, o: &Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Dual {
    type Output = Dual;
    // product rule
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, o: &Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a * o.v + self.v * b).collect(),
        }
    }
}

/// Which axis the recursion peels off first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Peel {
    First,
    #[cfg(test)]
    Last,
}

/// `Q = ∂S/∂w` of the ES-BGK source at an arbitrary state, in physical units.
pub fn esbgk_source_jacobian(state: &MomentState, tau: f64, pr: f64) -> Result<RMatrix> {
    check_rate(tau, pr)?;
    Ok(esbgk_source(state, tau, pr, Peel::First).1)
}

pub(crate) fn esbgk_source(state: &MomentState, tau: f64, pr: f64, peel: Peel) -> (Vec<f64>, RMatrix) {
    let b = state.basis();
    let n = b.len();
    let dim = b.dim();
    let w: Vec<Dual> = state.w().iter().enumerate().map(|(k, x)| Dual::var(*x, k, n)).collect();
    let rho = w[0].clone();
    let inv_rho = rho.recip();

    // f from w: f_{e_i} = 0, f_{2e_i} = w_{2e_i} − p/2 with p = (2/D) Σ_d w_{2e_d}
    let mut half_p = Dual::constant(0.0, n);
    for d in 0..dim {
        half_p = &half_p + &w[b.pair_pos(d, d)];
    }
    let half_p = half_p.scale(1.0 / dim as f64);
    let mut f = w.clone();
    for d in 0..dim {
        f[b.unit_pos(d)] = Dual::constant(0.0, n);
        f[b.pair_pos(d, d)] = &w[b.pair_pos(d, d)] - &half_p;
    }
    let sigma = |i: usize, j: usize| -> Dual {
        let v = &f[b.pair_pos(i, j)];
        if i == j {
            v.scale(2.0)
        } else {
            v.clone()
        }
    };

    let c = 1.0 - 1.0 / pr;
    let mut g: Vec<Dual> = Vec::with_capacity(n);
    for a in b.indices() {
        let value = if a.degree() == 0 {
            rho.clone()
        } else if a.degree() % 2 == 1 {
            Dual::constant(0.0, n)
        } else {
            let axes: Vec<usize> = (0..dim).filter(|&d| a.get(d) > 0).collect();
            let i = match peel {
                Peel::First => axes[0],
                #[cfg(test)]
                Peel::Last => *axes.last().expect("nonzero index"),
            };
            let mut acc = Dual::constant(0.0, n);
            for d in 0..dim {
                let lower = a.shifted(i, -1).and_then(|x| x.shifted(d, -1));
                if let Some(k) = lower.and_then(|x| b.position(&x)) {
                    acc = &acc + &(&sigma(i, d) * &g[k]);
                }
            }
            (&acc * &inv_rho).scale(c / a.get(i) as f64)
        };
        g.push(value);
    }

    let rate = pr / tau;
    let mut values = vec![0.0; n];
    let mut jac = RMatrix::zeros(n, n);
    for k in 0..n {
        let s = (&g[k] - &f[k]).scale(rate);
        values[k] = s.v;
        for (col, x) in s.g.iter().enumerate() {
            jac[(k, col)] = *x;
        }
    }
    (values, jac)
}
