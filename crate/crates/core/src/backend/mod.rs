//! Optimization model representation, file emission and solver driving.

mod model;
mod solver;
mod writer;

pub use model::{Constraint, LinExpr, ModelInstance, Sense, VarId, VarKind, Variable, OBJ_CONSTANT_VAR};
pub use solver::{
    discover_solver, parse_cbc_solution, parse_highs_solution, solve, Solution, SolveOptions, SolveStatus,
    SolverFlavor, OPTIMAL_GAP, SOLVER_ENV,
};
pub use writer::{emit, fixed_mps_column_names, ModelFormat};
