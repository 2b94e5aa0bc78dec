//! Dense linear algebra and a two-phase simplex LP solver; the only
//! numerics substrate used by the rest of the crate.

mod lp;
mod matrix;

pub use lp::{lp_solve, LinearProgram, LpOutcome, LpStatus, Relation, FEAS_TOL};
pub use matrix::{Matrix, SINGULARITY_TOL};
