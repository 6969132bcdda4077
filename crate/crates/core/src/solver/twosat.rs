//! Linear-time 2-SAT via strongly connected components of the implication
//! graph. Literal `l` is node `l.code()`; clause `(a ∨ b)` adds `¬a → b` and
//! `¬b → a`.

use std::time::Instant;

use super::{SatResult, WorkStats};
use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::error::{Error, Result};

/// Decides a width-2 formula.
///
/// Work counters: `propagations` counts implication edges examined by the
/// component search, `conflicts` is 1 when some `x` and `¬x` share a
/// component, and `decisions` is always 0.
pub fn solve_2sat(formula: &CnfFormula) -> Result<SatResult> {
    if formula.k() != 2 {
        return Err(Error::WrongWidth {
            expected: "2",
            found: formula.k(),
        });
    }
    let start = Instant::now();
    let n_nodes = 2 * formula.n_vars();
    let graph = ImplicationGraph::build(formula);
    let (comp, edges_seen) = tarjan(&graph, n_nodes);

    let mut work = WorkStats {
        propagations: edges_seen,
        ..WorkStats::default()
    };
    let mut bits = Vec::with_capacity(formula.n_vars());
    for v in 0..formula.n_vars() {
        let pos = comp[Literal::positive(v).code()];
        let neg = comp[Literal::negative(v).code()];
        if pos == neg {
            work.conflicts = 1;
            work.wall_time = start.elapsed();
            return Ok(SatResult::unsat(work));
        }
        // Components are numbered in reverse topological order, so the
        // literal whose component comes first is implied last: make it true.
        bits.push(pos < neg);
    }
    work.wall_time = start.elapsed();
    Ok(SatResult::sat(Assignment::new(bits), work))
}

/// Compressed adjacency lists.
struct ImplicationGraph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ImplicationGraph {
    fn build(formula: &CnfFormula) -> Self {
        let n_nodes = 2 * formula.n_vars();
        let edges = || {
            formula.clauses().iter().flat_map(|c| {
                let (a, b) = (c.literals()[0], c.literals()[1]);
                [(a.negate().code(), b.code()), (b.negate().code(), a.code())]
            })
        };
        let mut offsets = vec![0u32; n_nodes + 1];
        for (from, _) in edges() {
            offsets[from + 1] += 1;
        }
        for i in 0..n_nodes {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n_nodes] as usize];
        for (from, to) in edges() {
            targets[fill[from] as usize] = to as u32;
            fill[from] += 1;
        }
        ImplicationGraph { offsets, targets }
    }

    #[inline]
    fn range(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u] as usize..self.offsets[u + 1] as usize
    }
}

/// Iterative Tarjan. Returns the component id of every node and the number of
/// edges examined.
fn tarjan(g: &ImplicationGraph, n: usize) -> (Vec<u32>, u64) {
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut comp = vec![UNSET; n];
    let mut next_edge: Vec<usize> = (0..n).map(|u| g.offsets[u] as usize).collect();
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<u32> = Vec::new();
    let mut timer = 0u32;
    let mut n_comp = 0u32;
    let mut edges_seen = 0u64;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push(root as u32);
        call.push(root as u32);

        while let Some(&top) = call.last() {
            let u = top as usize;
            let end = g.range(u).end;
            if next_edge[u] < end {
                let v = g.targets[next_edge[u]] as usize;
                next_edge[u] += 1;
                edges_seen += 1;
                if index[v] == UNSET {
                    index[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push(v as u32);
                    call.push(v as u32);
                } else if comp[v] == UNSET {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow") as usize;
                    comp[w] = n_comp;
                    if w == u {
                        break;
                    }
                }
                n_comp += 1;
            }
            if let Some(&parent) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[u]);
            }
        }
    }
    (comp, edges_seen)
}
