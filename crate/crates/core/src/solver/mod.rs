//! Satisfiability decision procedures and the exhaustive MAX-SAT oracle.

mod brute;
mod dpll;
mod twosat;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, CnfFormula};
use crate::error::Result;

pub use brute::{max_sat_bruteforce, max_sat_bruteforce_with_limit, DEFAULT_EXHAUSTIVE_LIMIT};
pub use dpll::solve_dpll;
pub use twosat::solve_2sat;

/// Deterministic effort counters. `wall_time` is informational only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub wall_time: Duration,
}

impl WorkStats {
    /// The run-time proxy reported by sweeps: decisions + propagations.
    pub fn work(&self) -> u64 {
        self.decisions + self.propagations
    }

    /// Counter equality, ignoring wall time.
    pub fn same_counters(&self, other: &WorkStats) -> bool {
        self.decisions == other.decisions
            && self.propagations == other.propagations
            && self.conflicts == other.conflicts
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub satisfiable: bool,
    /// Present iff `satisfiable`.
    pub witness: Option<Assignment>,
    pub work: WorkStats,
}

impl SatResult {
    pub(crate) fn sat(witness: Assignment, work: WorkStats) -> Self {
        SatResult {
            satisfiable: true,
            witness: Some(witness),
            work,
        }
    }

    pub(crate) fn unsat(work: WorkStats) -> Self {
        SatResult {
            satisfiable: false,
            witness: None,
            work,
        }
    }
}

/// Which decision procedure to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Implication graph for width 2, DPLL otherwise.
    #[default]
    Auto,
    TwoSat,
    Dpll,
}

pub fn solve(formula: &CnfFormula, kind: SolverKind) -> Result<SatResult> {
    match kind {
        SolverKind::Auto if formula.k() == 2 => solve_2sat(formula),
        SolverKind::Auto | SolverKind::Dpll => Ok(solve_dpll(formula)),
        SolverKind::TwoSat => solve_2sat(formula),
    }
}
