use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::assembly::MomentState;
use crate::basis::MomentBasis;

/// Random state near equilibrium with `|f_α| ≤ 0.1` for `|α| ≥ 3`.
pub(crate) fn random_state(b: &MomentBasis, rng: &mut ChaCha8Rng, zero_velocity: bool) -> MomentState {
    let mut w = vec![0.0; b.len()];
    w[0] = rng.random_range(0.5..2.0);
    let theta = rng.random_range(0.5..2.0);
    for (k, a) in b.indices().iter().enumerate() {
        match a.degree() {
            1 if !zero_velocity => w[k] = rng.random_range(-0.5..0.5),
            2 => {
                let diag = a.entries().contains(&2);
                w[k] = if diag {
                    0.5 * w[0] * theta * (1.0 + rng.random_range(-0.2..0.2))
                } else {
                    rng.random_range(-0.1..0.1)
                };
            }
            d if d >= 3 => w[k] = rng.random_range(-0.1..0.1),
            _ => {}
        }
    }
    MomentState::new(b.clone(), w).unwrap()
}
