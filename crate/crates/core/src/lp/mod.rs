//! Embedded LP and small MILP engine.

mod milp;
mod simplex;

pub use milp::{solve_milp, MilpLimits, MilpSolution};
pub use simplex::{Basis, LinearProgram, LpSolution, LpStatus, Sense, FEAS_TOL, INT_TOL, OPT_TOL};
