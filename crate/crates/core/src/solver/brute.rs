use crate::cnf::CnfFormula;
use crate::error::{Error, Result};

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 30;

/// Scans all `2^N` assignments and returns `(λ_min, d)`: the fewest violated
/// clauses and how many assignments attain it.
pub fn max_sat_bruteforce(formula: &CnfFormula) -> Result<(usize, u64)> {
    max_sat_bruteforce_with_limit(formula, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn max_sat_bruteforce_with_limit(formula: &CnfFormula, limit: usize) -> Result<(usize, u64)> {
    let n = formula.n_vars();
    if n > limit.min(63) {
        return Err(Error::TooLarge { n_vars: n, limit });
    }
    let masks = formula.violation_masks();
    let mut best = usize::MAX;
    let mut count = 0u64;
    for s in 0..(1u64 << n) {
        let e = masks.iter().filter(|&&(m, v)| s & m == v).count();
        if e < best {
            best = e;
            count = 1;
        } else if e == best {
            count += 1;
        }
    }
    Ok((best, count))
}
