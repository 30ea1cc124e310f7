//! Multi-indices, the graded reverse lexicographic ordering and the moment basis.
//!
//! Moments are addressed by multi-indices `α ∈ ℕ^D`. Vectors and matrices in
//! the rest of the crate are laid out in the order produced by
//! [`MomentBasis::new`], and lookups that fall outside the basis (a negative
//! component or `|α| > M`) come back as `None`. Assembly code treats such
//! entries as zero.

pub(crate) mod hermite;
mod quadrature;

pub use hermite::{hermite_eval, hermite_function, hermite_table_1d, HermiteWeight};
pub use quadrature::{gauss_hermite, GaussHermite, MAX_NODES};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HmeError, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// A multi-index `(α₁, …, α_D)` with `1 ≤ D ≤ 3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: [usize; MAX_DIM],
    dim: usize,
}

impl MultiIndex {
    pub fn new(entries: &[usize]) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_DIM {
            return Err(invalid(format!(
                "multi-index length must be in 1..={MAX_DIM}, got {}",
                entries.len()
            )));
        }
        let mut e = [0; MAX_DIM];
        e[..entries.len()].copy_from_slice(entries);
        Ok(Self {
            entries: e,
            dim: entries.len(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim));
        Self {
            entries: [0; MAX_DIM],
            dim,
        }
    }

    /// The unit multi-index `e_i` (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut a = Self::zero(dim);
        a.entries[axis] = 1;
        a
    }

    /// `e_i + e_j` (0-based axes); `2e_i` when `i == j`.
    pub fn pair(dim: usize, i: usize, j: usize) -> Self {
        let mut a = Self::zero(dim);
        a.entries[i] += 1;
        a.entries[j] += 1;
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries[..self.dim]
    }

    pub fn get(&self, axis: usize) -> usize {
        self.entries[axis]
    }

    /// `|α| = Σ α_d`.
    pub fn degree(&self) -> usize {
        self.entries().iter().sum()
    }

    /// `α! = Π α_d!` as a float.
    pub fn factorial(&self) -> f64 {
        self.entries()
            .iter()
            .map(|&k| (1..=k).map(|j| j as f64).product::<f64>())
            .product()
    }

    /// Adds `delta` to component `axis`; `None` if the result would be negative.
    pub fn shifted(&self, axis: usize, delta: isize) -> Option<Self> {
        let v = self.entries[axis] as isize + delta;
        if v < 0 {
            return None;
        }
        let mut a = *self;
        a.entries[axis] = v as usize;
        Some(a)
    }

    pub fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut a = *self;
        for d in 0..self.dim {
            a.entries[d] += other.entries[d];
        }
        a
    }

    /// `self − other`, or `None` if any component would go negative.
    pub fn minus(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.dim, other.dim);
        let mut a = *self;
        for d in 0..self.dim {
            a.entries[d] = self.entries[d].checked_sub(other.entries[d])?;
        }
        Some(a)
    }

    /// The relation `α ≺ β`: `|α| < |β|`, or equal degree and there is an
    /// axis `i` with `α_i > β_i` while all later axes agree.
    pub fn precedes(&self, other: &Self) -> bool {
        let (da, db) = (self.degree(), other.degree());
        if da != db {
            return da < db;
        }
        for i in (0..self.dim).rev() {
            match self.entries[i].cmp(&other.entries[i]) {
                Ordering::Equal => continue,
                Ordering::Greater => return true,
                Ordering::Less => return false,
            }
        }
        false
    }

    /// Total order induced by [`precedes`](Self::precedes).
    pub fn grevlex_cmp(&self, other: &Self) -> Ordering {
        if self.precedes(other) {
            Ordering::Less
        } else if other.precedes(self) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α({self})")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = HmeError;

    /// Parses `"a1,a2,a3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| invalid(format!("bad multi-index component {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&parts)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All multi-indices with `|α| ≤ M`, sorted by `≺`, with a reverse lookup.
#[derive(Clone, Debug)]
pub struct MomentBasis {
    dim: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl MomentBasis {
    /// Builds the basis for spatial dimension `dim` and moment order `order`.
    ///
    /// `order ≥ 2` is accepted here; the moment systems themselves need `order ≥ 3`.
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(invalid(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if order < 2 {
            return Err(invalid(format!("moment order must be at least 2, got {order}")));
        }
        let indices = enumerate_indices(dim, order);
        let positions = indices.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        Ok(Self {
            dim,
            order,
            indices,
            positions,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of moments `N = C(M + D, D)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, pos: usize) -> MultiIndex {
        self.indices[pos]
    }

    /// Position of `α`, or `None` when `α` lies outside the basis.
    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.positions.get(alpha).copied()
    }

    /// Position of `α + delta·e_axis`, `None` if negative or beyond order `M`.
    pub fn position_shifted(&self, alpha: &MultiIndex, axis: usize, delta: isize) -> Option<usize> {
        alpha.shifted(axis, delta).and_then(|b| self.position(&b))
    }

    pub fn zero_pos(&self) -> usize {
        0
    }

    /// Position of the velocity slot `e_axis`.
    pub fn unit_pos(&self, axis: usize) -> usize {
        self.positions[&MultiIndex::unit(self.dim, axis)]
    }

    /// Position of the pressure slot `e_i + e_j`.
    pub fn pair_pos(&self, i: usize, j: usize) -> usize {
        self.positions[&MultiIndex::pair(self.dim, i, j)]
    }

    /// Slots of the conserved quantities: density, momentum and the
    /// diagonal pressure slots whose sum carries the energy.
    pub fn conserved_slots(&self) -> ConservedSlots {
        ConservedSlots {
            density: self.zero_pos(),
            momentum: (0..self.dim).map(|d| self.unit_pos(d)).collect(),
            energy: (0..self.dim).map(|d| self.pair_pos(d, d)).collect(),
        }
    }
}

/// Row/column positions of the `D + 2` collision invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservedSlots {
    pub density: usize,
    pub momentum: Vec<usize>,
    /// The energy row is the sum of these rows.
    pub energy: Vec<usize>,
}

/// All `α` with `|α| ≤ order`, sorted by the `≺` relation.
pub fn enumerate_indices(dim: usize, order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = [0usize; MAX_DIM];
    fn rec(dim: usize, axis: usize, budget: usize, cur: &mut [usize; MAX_DIM], out: &mut Vec<MultiIndex>) {
        if axis == dim {
            out.push(MultiIndex::new(&cur[..dim]).expect("dim checked"));
            return;
        }
        for v in 0..=budget {
            cur[axis] = v;
            rec(dim, axis + 1, budget - v, cur, out);
        }
        cur[axis] = 0;
    }
    rec(dim, 0, order, &mut cur, &mut out);
    out.sort_by(MultiIndex::grevlex_cmp);
    out
}

/// Checked wrapper around [`enumerate_indices`].
pub fn try_enumerate_indices(dim: usize, order: usize) -> Result<Vec<MultiIndex>> {
    MomentBasis::new(dim, order).map(|b| b.indices)
}

/// `C(n, k)` for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
