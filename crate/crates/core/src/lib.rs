pub mod assembly;
pub mod basis;
pub mod collision;
pub mod error;
pub mod linalg;
pub mod model;
pub mod ohme;
pub mod stability;
pub mod verify;
pub mod yong;

#[cfg(test)]
mod test_support;

pub use assembly::{LinearizedSystem, MomentState, SystemMatrices};
pub use basis::{MomentBasis, MultiIndex};
pub use collision::CollisionModel;
pub use error::{HmeError, Result};
pub use model::{LinearModel, SystemKind};
