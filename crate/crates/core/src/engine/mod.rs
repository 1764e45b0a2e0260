//! Explicit finite-difference engine.

mod boundary;
mod field;
mod solver;
mod stability;

pub use boundary::{
    apply_boundaries, discrete_mass, BottomCondition, BoundaryConditionSet, SideCondition, TopCondition,
};
pub use field::{init_field, ConcentrationField};
pub use solver::{run, step, NegativeEvent, NegativeEvents, SimulationResult};
pub use stability::{stability_diagnostics, StabilityDiagnostics};
