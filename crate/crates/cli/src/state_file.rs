use std::collections::BTreeMap;
use std::path::Path;

use hme_core::{MomentBasis, MomentState, MultiIndex};

use crate::Failure;

/// Reads `{"a1,a2": value, ...}` over the equilibrium at `(rho0, 0, theta0)`.
/// Values are entries of the state vector: `ρ`, `u`, `p_ij/(1+δ_ij)` and `f_α`.
pub fn load(path: &Path, basis: &MomentBasis, rho0: f64, theta0: f64) -> Result<MomentState, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let entries: BTreeMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse(&entries, basis, rho0, theta0)
}

pub fn parse(
    entries: &BTreeMap<String, f64>,
    basis: &MomentBasis,
    rho0: f64,
    theta0: f64,
) -> Result<MomentState, Failure> {
    let mut s = MomentState::equilibrium(basis.clone(), rho0, &vec![0.0; basis.dim()], theta0)?;
    let mut w = s.w().to_vec();
    for (key, value) in entries {
        let alpha: MultiIndex = key.parse()?;
        if alpha.dim() != basis.dim() {
            return Err(Failure::Config(format!(
                "state key {key:?} has {} components, expected {}",
                alpha.dim(),
                basis.dim()
            )));
        }
        let pos = basis
            .position(&alpha)
            .ok_or_else(|| Failure::Config(format!("state key {key:?} is above order {}", basis.order())))?;
        w[pos] = *value;
    }
    s = MomentState::new(basis.clone(), w)?;
    Ok(s)
}
