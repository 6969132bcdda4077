//! DIMACS CNF reading and writing.
//!
//! The writer adds a `c k <width>` comment so that empty formulas keep their
//! width across a round trip; other tools treat it as an ordinary comment.

use std::fmt::Write as _;

use super::{Clause, CnfFormula, Literal};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Reject any clause whose width differs from this value.
    pub strict_k: Option<usize>,
}

pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula> {
    parse_dimacs_with(input, ParseOptions::default())
}

pub fn parse_dimacs_with(input: &[u8], opts: ParseOptions) -> Result<CnfFormula> {
    let text = std::str::from_utf8(input).map_err(|e| Error::MalformedBody {
        line: 0,
        reason: format!("not UTF-8: {e}"),
    })?;

    let mut header: Option<(usize, usize)> = None;
    let mut width_hint: Option<usize> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut k: Option<usize> = opts.strict_k;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if let Some(w) = rest.trim().strip_prefix("k ") {
                width_hint = w.trim().parse().ok();
            }
            continue;
        }
        if line.starts_with('%') {
            // SATLIB trailer
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::MalformedHeader {
                    line: lineno,
                    reason: "duplicate problem line".into(),
                });
            }
            header = Some(parse_header(rest, lineno)?);
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(Error::MalformedHeader {
                line: lineno,
                reason: "clause data before the problem line".into(),
            });
        };
        for tok in line.split_whitespace() {
            let value: i64 = tok.parse().map_err(|_| Error::MalformedBody {
                line: lineno,
                reason: format!("unexpected token {tok:?}"),
            })?;
            match Literal::from_dimacs(value) {
                None => {
                    let lits = std::mem::take(&mut current);
                    let idx = clauses.len();
                    let width = *k.get_or_insert(lits.len());
                    if lits.len() != width {
                        return Err(Error::WrongClauseWidth {
                            clause: idx,
                            expected: width,
                            found: lits.len(),
                        });
                    }
                    let clause = Clause::new(lits).map_err(|e| match e {
                        Error::RepeatedVariable { var, .. } => {
                            Error::RepeatedVariable { clause: idx, var }
                        }
                        other => other,
                    })?;
                    clauses.push(clause);
                }
                Some(lit) => {
                    if lit.var() >= n_vars {
                        return Err(Error::LiteralOutOfRange {
                            literal: value,
                            n_vars,
                        });
                    }
                    current.push(lit);
                }
            }
        }
    }

    let Some((n_vars, declared)) = header else {
        return Err(Error::MalformedHeader {
            line: 0,
            reason: "missing problem line".into(),
        });
    };
    if !current.is_empty() {
        return Err(Error::MalformedBody {
            line: text.lines().count(),
            reason: "last clause is not terminated by 0".into(),
        });
    }
    if clauses.len() != declared {
        return Err(Error::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    let k = k.or(width_hint).unwrap_or(2);
    CnfFormula::new(n_vars, k, clauses)
}

fn parse_header(rest: &str, line: usize) -> Result<(usize, usize)> {
    let bad = |reason: &str| Error::MalformedHeader {
        line,
        reason: reason.to_string(),
    };
    let mut it = rest.split_whitespace();
    if it.next() != Some("cnf") {
        return Err(bad("expected `p cnf <vars> <clauses>`"));
    }
    let n_vars: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("variable count is not a non-negative integer"))?;
    let n_clauses: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("clause count is not a non-negative integer"))?;
    if it.next().is_some() {
        return Err(bad("trailing tokens after clause count"));
    }
    if n_vars == 0 {
        return Err(bad("variable count must be positive"));
    }
    Ok((n_vars, n_clauses))
}

pub fn write_dimacs(formula: &CnfFormula) -> Vec<u8> {
    let mut out = String::with_capacity(16 + formula.n_clauses() * 4 * (formula.k() + 1));
    let _ = writeln!(out, "c k {}", formula.k());
    let _ = writeln!(out, "p cnf {} {}", formula.n_vars(), formula.n_clauses());
    for clause in formula.clauses() {
        for lit in clause.literals() {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out.into_bytes()
}
