//! A self-contained MILP primal-heuristic toolkit built around
//! relaxation-enforced neighborhood search with multiple reference solutions.
//!
//! The pipeline: solve the LP relaxation with a bounded-variable primal
//! simplex ([`simplex`]), separate Gomory mixed-integer cuts at fractional
//! optima ([`gmi`]), price the cuts into the objective via Lagrangian
//! multipliers and re-solve over the unchanged feasible region to collect
//! fractional reference solutions ([`refgen`]), derive RENS or MRENS
//! sub-MILP bounds from the references ([`neighborhood`]), and solve the
//! sub-MILP with presolve plus branch and bound under working limits
//! ([`subsolver`]). [`harness`] orchestrates instance batches over MPS
//! files ([`mps`]) and aggregates call records into reports ([`metrics`]).
//!
//! See the `examples/` directory for one runnable example per capability;
//! the `mrens` binary exposes the batch harness.

pub mod gmi;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod mps;
pub mod neighborhood;
pub mod refgen;
pub mod simplex;
pub mod subsolver;

use thiserror::Error as ThisError;

/// Primal feasibility tolerance for rows and bounds.
pub const FEAS_TOL: f64 = 1e-6;
/// Integrality tolerance.
pub const INT_TOL: f64 = 1e-6;
/// Objective-consistency tolerance.
pub const OBJ_TOL: f64 = 1e-9;
/// Reduced-cost (dual) tolerance.
pub const RC_TOL: f64 = 1e-9;
/// Minimum violation for a cut to count as separating.
pub const SEP_TOL: f64 = 1e-6;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use model::{MilpModel, Solution, SolutionKind, SparseRow};
pub use simplex::{Basis, LpSolution, LpStatus, SimplexSolver, VarStatus};
