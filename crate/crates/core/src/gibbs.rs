//! Exact thermal quantities from the density of states.
//!
//! The whole spectrum of a penalty Hamiltonian is compressed into an integer
//! histogram over violated-clause counts. Everything that depends on β then
//! costs O(M) per evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cnf::CnfFormula;
use crate::error::{Error, Result};

/// Enumeration limit used when none is given.
pub const DEFAULT_SPECTRUM_LIMIT: usize = 24;

/// Configurations per parallel block.
const BLOCK_BITS: u32 = 14;

/// Number of configurations at each integer energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyHistogram {
    n_spins: usize,
    /// `counts[e]` configurations violate exactly `e` clauses. No trailing zeros.
    counts: Vec<u64>,
}

impl EnergyHistogram {
    /// Builds a histogram from `(energy, count)` pairs. The counts must sum
    /// to `2^n_spins`.
    pub fn from_levels(n_spins: usize, levels: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        if n_spins > 63 {
            return Err(Error::TooLarge {
                n_vars: n_spins,
                limit: 63,
            });
        }
        let mut counts = Vec::new();
        for (e, c) in levels {
            if counts.len() <= e {
                counts.resize(e + 1, 0);
            }
            counts[e] += c;
        }
        Self::from_counts(n_spins, counts)
    }

    fn from_counts(n_spins: usize, mut counts: Vec<u64>) -> Result<Self> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        let total: u128 = counts.iter().map(|&c| c as u128).sum();
        if total != 1u128 << n_spins {
            return Err(Error::InvalidParameter(format!(
                "histogram counts sum to {total}, expected 2^{n_spins}"
            )));
        }
        Ok(EnergyHistogram { n_spins, counts })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Σ counts, always `2^N`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, energy: usize) -> u64 {
        self.counts.get(energy).copied().unwrap_or(0)
    }

    /// Ground energy λ_min.
    pub fn lambda_min(&self) -> usize {
        self.counts
            .iter()
            .position(|&c| c > 0)
            .expect("histogram is never empty")
    }

    /// Ground-state degeneracy d.
    pub fn degeneracy(&self) -> u64 {
        self.counts[self.lambda_min()]
    }

    pub fn max_energy(&self) -> usize {
        self.counts.len() - 1
    }

    /// Occupied `(energy, count)` levels in increasing energy.
    pub fn levels(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| (e, c))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("histogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// JSON form: `{"n_spins": N, "counts": {"<energy>": <count>, ...}}` with
/// only occupied levels listed, counts as exact integers.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistogramDocument {
    n_spins: usize,
    counts: BTreeMap<usize, u64>,
}

impl Serialize for EnergyHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HistogramDocument {
            n_spins: self.n_spins,
            counts: self.levels().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EnergyHistogram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = HistogramDocument::deserialize(deserializer)?;
        EnergyHistogram::from_levels(doc.n_spins, doc.counts).map_err(serde::de::Error::custom)
    }
}

/// Exact histogram of violated-clause counts over all `2^N` configurations,
/// using [`DEFAULT_SPECTRUM_LIMIT`].
pub fn enumerate_spectrum(formula: &CnfFormula) -> Result<EnergyHistogram> {
    enumerate_spectrum_with_limit(formula, DEFAULT_SPECTRUM_LIMIT)
}

/// The configuration range is split into contiguous blocks of Gray-code
/// indices. Each block walks its range flipping one variable per step and
/// updating only the clauses that mention it, into a private histogram.
/// Blocks are merged by integer addition, so the result does not depend on
/// scheduling.
pub fn enumerate_spectrum_with_limit(formula: &CnfFormula, limit: usize) -> Result<EnergyHistogram> {
    let n = formula.n_vars();
    if n > limit.min(40) {
        return Err(Error::TooLarge { n_vars: n, limit });
    }
    let walker = GrayWalker::new(formula);
    let total = 1u64 << n;
    let block = 1u64 << BLOCK_BITS.min(n as u32);
    let n_blocks = total / block;
    let buckets = formula.n_clauses() + 1;

    let counts = (0..n_blocks)
        .into_par_iter()
        .map(|b| walker.walk(b * block, (b + 1) * block, buckets))
        .reduce(
            || vec![0u64; buckets],
            |mut acc, part| {
                for (a, p) in acc.iter_mut().zip(part) {
                    *a += p;
                }
                acc
            },
        );
    EnergyHistogram::from_counts(n, counts)
}

struct GrayWalker<'a> {
    formula: &'a CnfFormula,
    /// Per variable: `(clause, literal is negated)` occurrences.
    occ: Vec<Vec<(u32, bool)>>,
}

impl<'a> GrayWalker<'a> {
    fn new(formula: &'a CnfFormula) -> Self {
        let mut occ = vec![Vec::new(); formula.n_vars()];
        for (c, clause) in formula.clauses().iter().enumerate() {
            for l in clause.literals() {
                occ[l.var()].push((c as u32, l.is_negated()));
            }
        }
        GrayWalker { formula, occ }
    }

    fn walk(&self, start: u64, end: u64, buckets: usize) -> Vec<u64> {
        let mut hist = vec![0u64; buckets];
        let mut config = start ^ (start >> 1);
        let mut n_true: Vec<u8> = self
            .formula
            .clauses()
            .iter()
            .map(|c| {
                c.literals()
                    .iter()
                    .filter(|l| l.eval((config >> l.var()) & 1 == 1))
                    .count() as u8
            })
            .collect();
        let mut energy = n_true.iter().filter(|&&t| t == 0).count();
        hist[energy] += 1;

        for i in start + 1..end {
            let var = i.trailing_zeros() as usize;
            config ^= 1 << var;
            let value = (config >> var) & 1 == 1;
            for &(c, negated) in &self.occ[var] {
                let t = &mut n_true[c as usize];
                if value != negated {
                    *t += 1;
                    if *t == 1 {
                        energy -= 1;
                    }
                } else {
                    *t -= 1;
                    if *t == 0 {
                        energy += 1;
                    }
                }
            }
            hist[energy] += 1;
        }
        hist
    }
}

/// `p(λ_min, β) = d e^{−β λ_min} / Z`, evaluated in the shifted form
/// `d / Σ_e counts(e) e^{−β (e − λ_min)}` so no exponent is positive.
pub fn ground_occupancy(hist: &EnergyHistogram, beta: f64) -> f64 {
    let ground = hist.lambda_min();
    let d = hist.degeneracy() as f64;
    let z: f64 = hist
        .levels()
        .map(|(e, c)| {
            if e == ground {
                c as f64
            } else {
                c as f64 * (-beta * (e - ground) as f64).exp()
            }
        })
        .sum();
    d / z
}

/// Default target occupancy for [`min_beta_for_occupancy`].
pub const DEFAULT_THRESHOLD: f64 = 0.9;
/// Default absolute bisection tolerance on β.
pub const DEFAULT_BETA_TOL: f64 = 1e-3;

/// Smallest β (to within `tol`, from above) with `p(λ_min, β) ≥ threshold`.
///
/// Returns 0 if the infinite-temperature occupancy already reaches the
/// threshold. Otherwise bisects on `[0, β_max]` with
/// `β_max = N ln 2 + max(10, ln(t / (1 − t)) + 1)`: every excited level sits
/// at least one unit above the ground, so `p(β) ≥ 1 / (1 + 2^N e^{−β})`,
/// which exceeds the threshold at `β_max`. The returned value always satisfies
/// the threshold.
pub fn min_beta_for_occupancy(hist: &EnergyHistogram, threshold: f64, tol: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if ground_occupancy(hist, 0.0) >= threshold {
        return Ok(0.0);
    }
    let margin = (threshold / (1.0 - threshold)).ln() + 1.0;
    let mut hi = hist.n_spins() as f64 * std::f64::consts::LN_2 + margin.max(10.0);
    let mut lo = 0.0;
    debug_assert!(ground_occupancy(hist, hi) >= threshold);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ground_occupancy(hist, mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Occupancy sampled on a grid of inverse temperatures.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyCurve {
    pub histogram: EnergyHistogram,
    pub betas: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl OccupancyCurve {
    pub fn new(histogram: EnergyHistogram, betas: Vec<f64>) -> Result<Self> {
        if let Some(&b) = betas.iter().find(|&&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be finite and non-negative, got {b}"
            )));
        }
        let p_values = betas.iter().map(|&b| ground_occupancy(&histogram, b)).collect();
        Ok(OccupancyCurve {
            histogram,
            betas,
            p_values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{generate_instance, Assignment};
    use crate::solver::max_sat_bruteforce;

    fn two_level() -> EnergyHistogram {
        EnergyHistogram::from_levels(1, [(0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn empty_formula_spectrum() {
        let f = CnfFormula::empty(4, 2).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        assert_eq!(h.levels().collect::<Vec<_>>(), vec![(0, 16)]);
        assert_eq!(ground_occupancy(&h, 1.0), 1.0);
        assert_eq!(min_beta_for_occupancy(&h, 0.9, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn single_clause_spectrum() {
        let f = CnfFormula::from_dimacs_clauses(2, 2, &[&[1, 2]]).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        assert_eq!(h.levels().collect::<Vec<_>>(), vec![(0, 3), (1, 1)]);
    }

    #[test]
    fn spectrum_matches_direct_evaluation() {
        let f = generate_instance(12, 50, 3, 8).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        let mut direct = vec![0u64; 51];
        for s in 0..4096 {
            direct[f.evaluate(&Assignment::from_index(s, 12)).unwrap()] += 1;
        }
        for (e, &c) in direct.iter().enumerate() {
            assert_eq!(h.count(e), c, "energy {e}");
        }
        assert_eq!(h.total(), 4096);
        let (lambda, d) = max_sat_bruteforce(&f).unwrap();
        assert_eq!((h.lambda_min(), h.degeneracy()), (lambda, d));
    }

    #[test]
    fn tiny_formulas_smaller_than_a_block() {
        let f = CnfFormula::from_dimacs_clauses(3, 2, &[&[1, 2], &[-1, 3]]).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        assert_eq!(h.total(), 8);
        assert_eq!(h.count(0), 4);
    }

    #[test]
    fn too_large_is_rejected() {
        let f = CnfFormula::empty(25, 2).unwrap();
        assert!(matches!(
            enumerate_spectrum(&f),
            Err(Error::TooLarge { n_vars: 25, limit: 24 })
        ));
    }

    #[test]
    fn occupancy_at_zero_beta_is_d_over_2n() {
        let f = generate_instance(10, 30, 2, 3).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        assert_eq!(ground_occupancy(&h, 0.0), h.degeneracy() as f64 / 1024.0);
    }

    #[test]
    fn two_level_closed_form() {
        let h = two_level();
        let p = ground_occupancy(&h, 9f64.ln());
        assert!((p - 0.9).abs() < 1e-15);
        let b = min_beta_for_occupancy(&h, 0.9, 1e-3).unwrap();
        assert!((b - 9f64.ln()).abs() <= 1e-3);
        assert!(ground_occupancy(&h, b) >= 0.9);
    }

    #[test]
    fn invalid_threshold() {
        for t in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                min_beta_for_occupancy(&two_level(), t, 1e-3),
                Err(Error::InvalidThreshold(_))
            ));
        }
    }

    #[test]
    fn high_threshold_still_bracketed() {
        let f = generate_instance(12, 60, 2, 21).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        let b = min_beta_for_occupancy(&h, 0.999999, 1e-4).unwrap();
        assert!(ground_occupancy(&h, b) >= 0.999999);
    }

    #[test]
    fn histogram_json_round_trip() {
        let f = generate_instance(9, 30, 3, 5).unwrap();
        let h = enumerate_spectrum(&f).unwrap();
        let json = h.to_json();
        assert!(json.starts_with("{\"n_spins\":9,\"counts\":{"));
        assert_eq!(EnergyHistogram::from_json(&json).unwrap(), h);
        assert!(EnergyHistogram::from_json("{\"n_spins\":2,\"counts\":{\"0\":3}}").is_err());
    }

    #[test]
    fn curve_is_monotone() {
        let f = generate_instance(10, 40, 3, 2).unwrap();
        let betas: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let curve = OccupancyCurve::new(enumerate_spectrum(&f).unwrap(), betas).unwrap();
        assert!(curve.p_values.windows(2).all(|w| w[0] <= w[1]));
        assert!(curve.p_values.iter().all(|&p| p > 0.0 && p <= 1.0));
        assert!(OccupancyCurve::new(curve.histogram.clone(), vec![-1.0]).is_err());
    }
}
