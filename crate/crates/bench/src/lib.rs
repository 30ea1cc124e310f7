//! Fixtures shared by the benchmarks.

use hme_core::{MomentBasis, MomentState, MultiIndex};

/// A moving, non-Maxwellian state: every `f_α` with `|α| ≥ 3` set to a small
/// value that varies with the index.
pub fn perturbed_state(dim: usize, order: usize) -> MomentState {
    let basis = MomentBasis::new(dim, order).expect("valid basis");
    let u: Vec<f64> = (0..dim).map(|d| 0.1 * (d + 1) as f64).collect();
    let mut s = MomentState::equilibrium(basis.clone(), 1.2, &u, 0.9).expect("valid state");
    let high: Vec<MultiIndex> = basis.indices().iter().filter(|a| a.degree() >= 3).cloned().collect();
    for (k, a) in high.iter().enumerate() {
        s = s.with_entry(a, 0.01 * ((k % 7) as f64 - 3.0)).expect("in basis");
    }
    s
}
