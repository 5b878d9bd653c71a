//! Bipartite squash channels built from Z rotations, and the single-party
//! feasibility check.

mod choi;
mod construction;
mod feasibility;

pub use choi::ChoiMatrix;
pub use construction::{
    build_squash, flip_amplitude, quarter_z_rotation, verify_squash_conditions, SquashChannel,
    SquashConditionReport,
};
pub use feasibility::{
    onepartite_squash_feasibility, onepartite_squash_feasibility_with, FeasibilityReport,
    FeasibilityStatus, SolverConfig,
};
