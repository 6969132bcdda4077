use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Clause, CnfFormula, Literal};
use crate::error::{Error, Result};

/// Random k-SAT instance: each clause takes `k` distinct variables uniformly
/// without replacement and negates each independently with probability 1/2.
/// Clauses are drawn independently, so repeats across the formula can occur.
///
/// The output is a pure function of the arguments.
pub fn generate_instance(n_vars: usize, n_clauses: usize, k: usize, seed: u64) -> Result<CnfFormula> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "clause width must be at least 2, got {k}"
        )));
    }
    if n_vars <= k {
        return Err(Error::InvalidParameter(format!(
            "need more variables than the clause width (n_vars = {n_vars}, k = {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..n_clauses)
        .map(|_| {
            let vars = sample(&mut rng, n_vars, k);
            let literals = vars
                .iter()
                .map(|v| Literal::new(v, rng.gen::<bool>()))
                .collect();
            Clause::new_unchecked(literals)
        })
        .collect();
    Ok(CnfFormula {
        n_vars,
        k,
        clauses,
    })
}

/// Mixes a master seed with a (group, member) coordinate into an independent
/// 64-bit seed, so any ensemble member can be regenerated in isolation.
pub fn derive_seed(master: u64, group: u64, member: u64) -> u64 {
    let mut h = splitmix64(master ^ 0x6a09_e667_f3bc_c908);
    h = splitmix64(h ^ group);
    splitmix64(h ^ member.rotate_left(32))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance() {
        let f = generate_instance(5, 0, 3, 99).unwrap();
        assert_eq!(f.n_vars(), 5);
        assert_eq!(f.n_clauses(), 0);
        assert_eq!(f.clause_density(), 0.0);
    }

    #[test]
    fn density_is_exact_and_clauses_are_valid() {
        let f = generate_instance(1000, 1000, 2, 17).unwrap();
        assert_eq!(f.clause_density(), 1.0);
        for c in f.clauses() {
            assert_eq!(c.width(), 2);
            assert_ne!(c.literals()[0].var(), c.literals()[1].var());
        }
    }

    #[test]
    fn rejects_too_few_variables() {
        assert!(matches!(
            generate_instance(3, 4, 3, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(generate_instance(2, 1, 2, 0).is_err());
    }

    #[test]
    fn generation_is_pure() {
        let a = generate_instance(40, 170, 3, 12345).unwrap();
        let b = generate_instance(40, 170, 3, 12345).unwrap();
        let c = generate_instance(40, 170, 3, 12346).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn every_clause_valid_across_an_ensemble() {
        for seed in 0..200u64 {
            let k = 2 + (seed % 2) as usize;
            let n = k + 1 + (seed % 17) as usize;
            let f = generate_instance(n, 3 * n, k, derive_seed(7, 0, seed)).unwrap();
            // Re-validating through the checked constructor covers range and distinctness.
            CnfFormula::new(f.n_vars(), f.k(), f.clauses().to_vec()).unwrap();
        }
    }

    // Pearson statistic against a uniform distribution over `counts.len()` cells.
    fn chi_square(counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let expected = total as f64 / counts.len() as f64;
        counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    #[test]
    fn polarity_patterns_are_uniform() {
        let f = generate_instance(100, 10_000, 2, 2024).unwrap();
        let mut counts = [0u64; 4];
        for c in f.clauses() {
            let l = c.literals();
            counts[(l[0].is_negated() as usize) << 1 | l[1].is_negated() as usize] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 0.25).abs() <= 0.02, "pattern frequency {freq}");
        }
        // 3 degrees of freedom, 99.9% quantile.
        assert!(chi_square(&counts) < 16.27, "{counts:?}");
    }

    #[test]
    fn variables_are_uniform() {
        let f = generate_instance(50, 20_000, 3, 77).unwrap();
        let mut counts = vec![0u64; 50];
        for c in f.clauses() {
            for l in c.literals() {
                counts[l.var()] += 1;
            }
        }
        // 49 degrees of freedom, 99.9% quantile is about 85.4.
        assert!(chi_square(&counts) < 85.4);
    }

    #[test]
    fn derived_seeds_differ() {
        let mut seen = std::collections::HashSet::new();
        for g in 0..20 {
            for m in 0..200 {
                assert!(seen.insert(derive_seed(1, g, m)));
            }
        }
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    }
}
