//! CNF data model: literals, fixed-width clauses, formulas and assignments.
//!
//! Variables are 0-indexed in memory and 1-indexed whenever they cross the
//! DIMACS boundary.

mod dimacs;
mod random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dimacs::{parse_dimacs, parse_dimacs_with, write_dimacs, ParseOptions};
pub use random::{derive_seed, generate_instance};

/// A possibly negated occurrence of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: usize, negated: bool) -> Self {
        Literal {
            var: var as u32,
            negated,
        }
    }

    pub fn positive(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn negative(var: usize) -> Self {
        Self::new(var, true)
    }

    /// 0-based variable index.
    #[inline]
    pub fn var(self) -> usize {
        self.var as usize
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Dense code `2 * var + negated`, used to index per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        2 * self.var as usize + self.negated as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Self::new(code / 2, code % 2 == 1)
    }

    #[inline]
    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }

    /// Signed 1-based DIMACS integer.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Inverse of [`Literal::to_dimacs`]; `None` for 0.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        Some(Self::new(value.unsigned_abs() as usize - 1, value < 0))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var + 1)
        } else {
            write!(f, "x{}", self.var + 1)
        }
    }
}

/// A disjunction of literals over pairwise distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, rejecting repeated variables.
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        for (i, a) in literals.iter().enumerate() {
            if literals[..i].iter().any(|b| b.var() == a.var()) {
                return Err(Error::RepeatedVariable {
                    clause: 0,
                    var: a.var() + 1,
                });
            }
        }
        Ok(Clause { literals })
    }

    pub(crate) fn new_unchecked(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }

    /// Convenience constructor from signed 1-based DIMACS integers.
    pub fn from_dimacs(lits: &[i64]) -> Result<Self> {
        let literals = lits
            .iter()
            .map(|&l| {
                Literal::from_dimacs(l).ok_or_else(|| {
                    Error::InvalidParameter("0 is not a literal".to_string())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(literals)
    }

    #[inline]
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.literals
            .iter()
            .any(|l| l.eval(assignment.get(l.var())))
    }

    /// Variable mask and the unique violating bit pattern of the clause over
    /// configuration indices (bit `j` = value of variable `j`).
    pub(crate) fn violation_mask(&self) -> (u64, u64) {
        let mut mask = 0u64;
        let mut violating = 0u64;
        for l in &self.literals {
            mask |= 1 << l.var();
            // x_j is false at bit 0, ¬x_j is false at bit 1.
            if l.is_negated() {
                violating |= 1 << l.var();
            }
        }
        (mask, violating)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A uniform-width CNF formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n_vars: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Validates widths, variable ranges and distinctness.
    pub fn new(n_vars: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidParameter(
                "a formula needs at least one variable".into(),
            ));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("clause width must be positive".into()));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.width() != k {
                return Err(Error::WrongClauseWidth {
                    clause: i,
                    expected: k,
                    found: c.width(),
                });
            }
            for (j, l) in c.literals().iter().enumerate() {
                if l.var() >= n_vars {
                    return Err(Error::LiteralOutOfRange {
                        literal: l.to_dimacs(),
                        n_vars,
                    });
                }
                if c.literals()[..j].iter().any(|o| o.var() == l.var()) {
                    return Err(Error::RepeatedVariable {
                        clause: i,
                        var: l.var() + 1,
                    });
                }
            }
        }
        Ok(CnfFormula { n_vars, k, clauses })
    }

    /// Builds a formula from signed DIMACS clause lists.
    pub fn from_dimacs_clauses(n_vars: usize, k: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_vars, k, clauses)
    }

    pub fn empty(n_vars: usize, k: usize) -> Result<Self> {
        Self::new(n_vars, k, Vec::new())
    }

    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// α = M / N.
    pub fn clause_density(&self) -> f64 {
        self.clauses.len() as f64 / self.n_vars as f64
    }

    /// Concatenation of two formulas over the same variables and width.
    pub fn conjoin(&self, other: &CnfFormula) -> Result<CnfFormula> {
        if self.n_vars != other.n_vars || self.k != other.k {
            return Err(Error::InvalidParameter(format!(
                "cannot conjoin {}-variable width-{} and {}-variable width-{} formulas",
                self.n_vars, self.k, other.n_vars, other.k
            )));
        }
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        Ok(CnfFormula {
            n_vars: self.n_vars,
            k: self.k,
            clauses,
        })
    }

    /// Number of violated clauses, counted with multiplicity.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<usize> {
        if assignment.len() != self.n_vars {
            return Err(Error::LengthMismatch {
                expected: self.n_vars,
                found: assignment.len(),
            });
        }
        Ok(self
            .clauses
            .iter()
            .filter(|c| !c.is_satisfied_by(assignment))
            .count())
    }

    /// Per-clause `(mask, violating pattern)` pairs for bit-parallel
    /// evaluation over configuration indices. Requires `n_vars <= 64`.
    pub(crate) fn violation_masks(&self) -> Vec<(u64, u64)> {
        debug_assert!(self.n_vars <= 64);
        self.clauses.iter().map(Clause::violation_mask).collect()
    }
}

/// Free-function form of [`CnfFormula::evaluate`].
pub fn evaluate(formula: &CnfFormula, assignment: &Assignment) -> Result<usize> {
    formula.evaluate(assignment)
}

/// Truth values for `x_1..x_N`. Bit `j` doubles as the spin of site `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn all_false(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// Configuration `index` over `n` variables; bit `j` of the index is `x_{j+1}`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment((0..n).map(|j| (index >> j) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
    }

    #[inline]
    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var] = value;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Signed 1-based literals, DIMACS `v`-line style.
    pub fn to_dimacs_literals(&self) -> Vec<i64> {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &b)| if b { j as i64 + 1 } else { -(j as i64 + 1) })
            .collect()
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }
}
