//! Gradient-based solvers for unconstrained quadratic programs, in
//! plaintext, in exact simulation of the level budget, and under
//! encryption.

mod backend;
mod depth;
mod encrypted;
mod instance;
mod plain;
mod run;
mod trace;

pub use backend::{CkksBackend, LevelledBackend, SimMatrix, SimVector, SimulatedBackend};
pub use depth::{depth_cost, max_iterations, per_iteration_cost, Algorithm, MatMulScheme};
pub use encrypted::{he_agd, he_gd, run_levelled, LevelledSolver};
pub use instance::{QpInstance, QpMeta};
pub use plain::{agd_plain, agd_step_size, closed_form, gd_plain, gd_plain_with_step, gd_step_size, momentum};
pub use run::{solve, BackendKind, CkksSession, IterationRecord, SolveResult, SolverConfig};
pub use trace::Trace;
