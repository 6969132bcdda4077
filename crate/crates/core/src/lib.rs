//! Random k-SAT phase transitions, seen both through solver statistics and
//! through the exact Gibbs distribution of the clause-penalty Hamiltonian.
//!
//! - [`cnf`]: formulas, random instances, DIMACS.
//! - [`solver`]: implication-graph 2-SAT, DPLL, exhaustive MAX-SAT.
//! - [`ising`]: projector embedding into σ^z polynomials.
//! - [`gibbs`]: exact energy histograms, ground-state occupancy, minimal β.
//! - [`experiments`]: density sweeps, scaling windows, CSV and gnuplot output.

pub mod cnf;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod ising;
pub mod solver;

pub use cnf::{Assignment, Clause, CnfFormula, Literal};
pub use error::{Error, Result};
