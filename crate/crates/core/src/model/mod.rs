//! Domain types and estimation primitives shared by every design.

mod estimate;
mod level;
pub mod pava;
mod scenario;
mod state;

pub use estimate::{fhat, monotonize, EstimateVector};
pub use level::Level;
pub use scenario::{mtd_index, ToxScenario};
pub use state::{Observation, TrialState};
