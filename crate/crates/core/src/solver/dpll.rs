//! Complete DPLL search: unit propagation, pure-literal elimination and
//! chronological backtracking, with no clause learning.
//!
//! Branching rule: among the unresolved clauses of minimal current length, take
//! the unassigned variable occurring in the most of them (lowest index on
//! ties) and try `true` first.
//!
//! A decision level whose assignments satisfy every clause they touch is an
//! autarky: the residual formula is a subset of the formula before the
//! decision, so if the subtree fails the opposite branch cannot succeed and is
//! skipped. Pure literals are the one-variable case of this rule. On width-2
//! formulas every conflict-free level is an autarky, which keeps the search
//! polynomial there.
//!
//! Counters: `decisions` counts branching decisions (including the flipped
//! second branch), `propagations` counts literals fixed by unit propagation or
//! pure-literal elimination, and `conflicts` counts falsified clauses reached.

use std::collections::VecDeque;
use std::time::Instant;

use super::{SatResult, WorkStats};
use crate::cnf::{Assignment, CnfFormula, Literal};

const UNASSIGNED: u8 = 2;

pub fn solve_dpll(formula: &CnfFormula) -> SatResult {
    let start = Instant::now();
    let mut search = Search::new(formula);
    let satisfiable = search.run();
    let mut work = search.work;
    work.wall_time = start.elapsed();
    if satisfiable {
        let bits = search.value.iter().map(|&v| v == 1).collect();
        SatResult::sat(Assignment::new(bits), work)
    } else {
        SatResult::unsat(work)
    }
}

struct Frame {
    trail_start: usize,
    lit: Literal,
    flipped: bool,
    autarky: bool,
}

struct Search {
    n_vars: usize,
    k: usize,
    /// Flattened clause literals, `k` per clause.
    lits: Vec<Literal>,
    occ_offsets: Vec<u32>,
    occ: Vec<u32>,

    value: Vec<u8>,
    n_true: Vec<u16>,
    n_false: Vec<u16>,

    unresolved: usize,
    /// Unresolved clauses by current length.
    len_count: Vec<u32>,
    /// `var_len[v * (k + 1) + l]`: unresolved clauses of length `l` mentioning `v`.
    var_len: Vec<u32>,
    /// Unresolved clauses containing each literal code.
    lit_occ: Vec<u32>,

    trail: Vec<Literal>,
    frames: Vec<Frame>,
    units: VecDeque<Literal>,
    pure: Vec<usize>,
    conflict: bool,

    work: WorkStats,
}

impl Search {
    fn new(formula: &CnfFormula) -> Self {
        let n_vars = formula.n_vars();
        let k = formula.k();
        let m = formula.n_clauses();
        let lits: Vec<Literal> = formula
            .clauses()
            .iter()
            .flat_map(|c| c.literals().iter().copied())
            .collect();

        let n_codes = 2 * n_vars;
        let mut occ_offsets = vec![0u32; n_codes + 1];
        for l in &lits {
            occ_offsets[l.code() + 1] += 1;
        }
        for i in 0..n_codes {
            occ_offsets[i + 1] += occ_offsets[i];
        }
        let mut fill = occ_offsets.clone();
        let mut occ = vec![0u32; lits.len()];
        for (i, l) in lits.iter().enumerate() {
            occ[fill[l.code()] as usize] = (i / k.max(1)) as u32;
            fill[l.code()] += 1;
        }

        let mut s = Search {
            n_vars,
            k,
            lits,
            occ_offsets,
            occ,
            value: vec![UNASSIGNED; n_vars],
            n_true: vec![0; m],
            n_false: vec![0; m],
            unresolved: 0,
            len_count: vec![0; k + 1],
            var_len: vec![0; n_vars * (k + 1)],
            lit_occ: vec![0; n_codes],
            trail: Vec::with_capacity(n_vars),
            frames: Vec::new(),
            units: VecDeque::new(),
            pure: (0..n_vars).rev().collect(),
            conflict: false,
            work: WorkStats::default(),
        };
        for c in 0..m {
            s.add_contribution(c, 1);
            if k == 1 {
                s.units.push_back(s.lits[c]);
            }
        }
        s
    }

    #[inline]
    fn clause(&self, c: usize) -> &[Literal] {
        &self.lits[c * self.k..(c + 1) * self.k]
    }

    #[inline]
    fn occurrences(&self, lit: Literal) -> std::ops::Range<usize> {
        self.occ_offsets[lit.code()] as usize..self.occ_offsets[lit.code() + 1] as usize
    }

    #[inline]
    fn lit_value(&self, lit: Literal) -> u8 {
        match self.value[lit.var()] {
            UNASSIGNED => UNASSIGNED,
            v => (v == 1) as u8 ^ lit.is_negated() as u8,
        }
    }

    /// Adds (`sign = 1`) or removes (`sign = -1`) clause `c`'s contribution to
    /// the unresolved-clause tables, given its current counts.
    fn add_contribution(&mut self, c: usize, sign: i32) {
        if self.n_true[c] != 0 {
            return;
        }
        let len = self.k - self.n_false[c] as usize;
        let k1 = self.k + 1;
        let apply = |x: &mut u32| *x = (*x as i32 + sign) as u32;
        if sign > 0 {
            self.unresolved += 1;
        } else {
            self.unresolved -= 1;
        }
        apply(&mut self.len_count[len]);
        for i in 0..self.k {
            let l = self.lits[c * self.k + i];
            apply(&mut self.var_len[l.var() * k1 + len]);
            apply(&mut self.lit_occ[l.code()]);
        }
    }

    fn assign(&mut self, lit: Literal) {
        debug_assert_eq!(self.value[lit.var()], UNASSIGNED);
        self.value[lit.var()] = !lit.is_negated() as u8;
        self.trail.push(lit);

        for i in self.occurrences(lit) {
            let c = self.occ[i] as usize;
            if self.n_true[c] == 0 {
                self.add_contribution(c, -1);
                for j in 0..self.k {
                    let other = self.lits[c * self.k + j];
                    if self.lit_occ[other.code()] == 0 && self.value[other.var()] == UNASSIGNED {
                        self.pure.push(other.var());
                    }
                }
            }
            self.n_true[c] += 1;
        }
        for i in self.occurrences(lit.negate()) {
            let c = self.occ[i] as usize;
            if self.n_true[c] != 0 {
                self.n_false[c] += 1;
                continue;
            }
            self.add_contribution(c, -1);
            self.n_false[c] += 1;
            self.add_contribution(c, 1);
            match self.k - self.n_false[c] as usize {
                0 => self.conflict = true,
                1 => {
                    let unit = *self
                        .clause(c)
                        .iter()
                        .find(|l| self.value[l.var()] == UNASSIGNED)
                        .expect("unit clause has an unassigned literal");
                    self.units.push_back(unit);
                }
                _ => {}
            }
        }
    }

    fn unassign(&mut self, lit: Literal) {
        for i in self.occurrences(lit.negate()) {
            let c = self.occ[i] as usize;
            if self.n_true[c] != 0 {
                self.n_false[c] -= 1;
                continue;
            }
            self.add_contribution(c, -1);
            self.n_false[c] -= 1;
            self.add_contribution(c, 1);
        }
        for i in self.occurrences(lit) {
            let c = self.occ[i] as usize;
            self.n_true[c] -= 1;
            self.add_contribution(c, 1);
        }
        self.value[lit.var()] = UNASSIGNED;
    }

    fn backtrack_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let lit = self.trail.pop().expect("trail underflow");
            self.unassign(lit);
        }
        self.units.clear();
        self.pure.clear();
        self.conflict = false;
    }

    /// Unit propagation then pure-literal elimination, to fixpoint.
    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            if self.conflict {
                return false;
            }
            if let Some(lit) = self.units.pop_front() {
                // An assigned unit is either already true, or false, in which
                // case the clause that produced it was falsified and flagged.
                if self.lit_value(lit) == UNASSIGNED {
                    self.work.propagations += 1;
                    self.assign(lit);
                }
                continue;
            }
            if let Some(var) = self.pure.pop() {
                if self.value[var] != UNASSIGNED {
                    continue;
                }
                let pos = self.lit_occ[Literal::positive(var).code()];
                let neg = self.lit_occ[Literal::negative(var).code()];
                let lit = match (pos, neg) {
                    (p, 0) if p > 0 => Literal::positive(var),
                    (0, n) if n > 0 => Literal::negative(var),
                    _ => continue,
                };
                self.work.propagations += 1;
                self.assign(lit);
                continue;
            }
            return true;
        }
    }

    /// Every clause containing the negation of a literal fixed at this level
    /// is already satisfied.
    fn level_is_autarky(&self, trail_start: usize) -> bool {
        self.trail[trail_start..].iter().all(|&lit| {
            self.occurrences(lit.negate())
                .all(|i| self.n_true[self.occ[i] as usize] != 0)
        })
    }

    fn pick_branch(&self) -> Literal {
        let len = (1..=self.k)
            .find(|&l| self.len_count[l] > 0)
            .expect("unresolved clause exists");
        let k1 = self.k + 1;
        let mut best = (0u32, usize::MAX);
        for v in 0..self.n_vars {
            let score = self.var_len[v * k1 + len];
            if self.value[v] == UNASSIGNED && score > best.0 {
                best = (score, v);
            }
        }
        let var = best.1;
        assert!(var != usize::MAX, "shortest clause has an unassigned variable");
        Literal::positive(var)
    }

    fn run(&mut self) -> bool {
        loop {
            if self.propagate() {
                if let Some(top) = self.frames.last() {
                    if !top.flipped && !top.autarky && self.level_is_autarky(top.trail_start) {
                        self.frames.last_mut().expect("frame").autarky = true;
                    }
                }
                if self.unresolved == 0 {
                    return true;
                }
                let lit = self.pick_branch();
                self.work.decisions += 1;
                self.frames.push(Frame {
                    trail_start: self.trail.len(),
                    lit,
                    flipped: false,
                    autarky: false,
                });
                self.assign(lit);
                continue;
            }

            self.work.conflicts += 1;
            loop {
                let Some(frame) = self.frames.pop() else {
                    return false;
                };
                self.backtrack_to(frame.trail_start);
                if frame.flipped || frame.autarky {
                    continue;
                }
                let lit = frame.lit.negate();
                self.work.decisions += 1;
                self.frames.push(Frame {
                    trail_start: frame.trail_start,
                    lit,
                    flipped: true,
                    autarky: false,
                });
                self.assign(lit);
                break;
            }
        }
    }
}
