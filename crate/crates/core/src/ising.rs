//! Penalty-Hamiltonian embedding of CNF formulas as generalized Ising models.
//!
//! Each clause becomes the projector onto its unique violating assignment:
//! a positive literal `x_j` maps to `P_j^0`, a negative literal `¬x_j` to
//! `P_j^1`, disjunction to the tensor product and conjunction to the sum.
//! With `P_j^α = (1 + (−1)^α σ_j^z) / 2` the projector expands into a
//! polynomial in the `σ^z` eigenvalues.
//!
//! Spin convention, used everywhere in this crate: the eigenvalue of spin `j`
//! is `z_j = (−1)^{bit_j}`, so logical 0 is `z = +1` and logical 1 is `z = −1`.
//! Under it the diagonal of the Hamiltonian equals the violated-clause count.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, CnfFormula};
use crate::error::{Error, Result};
use crate::solver::DEFAULT_EXHAUSTIVE_LIMIT;

/// Every coefficient is an integer multiple of 1/8.
pub const DENOMINATOR: i64 = 8;

/// Exact dyadic rational stored as a numerator over [`DENOMINATOR`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyadic(i64);

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic(0);

    pub const fn from_eighths(n: i64) -> Self {
        Dyadic(n)
    }

    pub const fn from_integer(n: i64) -> Self {
        Dyadic(n * DENOMINATOR)
    }

    pub const fn eighths(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Whether the value is an integer multiple of `1/q` (`q` dividing 8).
    pub fn is_multiple_of_inverse(self, q: i64) -> bool {
        self.0 % (DENOMINATOR / q) == 0
    }

    /// `(p, q)` in lowest terms with `q > 0`.
    pub fn reduced(self) -> (i64, i64) {
        let mut p = self.0;
        let mut q = DENOMINATOR;
        while q > 1 && p % 2 == 0 {
            p /= 2;
            q /= 2;
        }
        (p, q)
    }

    /// Exact integer value, if there is one.
    pub fn to_integer(self) -> Option<i64> {
        (self.0 % DENOMINATOR == 0).then_some(self.0 / DENOMINATOR)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / DENOMINATOR as f64
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        Dyadic(self.0 + rhs.0)
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        self.0 += rhs.0;
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        Dyadic(self.0 - rhs.0)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic(-self.0)
    }
}

/// Always `p/q`, e.g. `1/4`, `-3/8`, `2/1`, `0/1`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.reduced();
        write!(f, "{p}/{q}")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("{s:?} is not a dyadic fraction p/q"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (
                p.trim().parse::<i64>().map_err(|_| bad())?,
                q.trim().parse::<i64>().map_err(|_| bad())?,
            ),
            None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
        };
        if q <= 0 || DENOMINATOR % q != 0 {
            return Err(bad());
        }
        Ok(Dyadic(p * (DENOMINATOR / q)))
    }
}

/// `constant + Σ h_i z_i + Σ J_ij z_i z_j + Σ K_ijl z_i z_j z_l`.
///
/// Spin indices are 0-based in memory; zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingHamiltonian {
    n_spins: usize,
    pub constant: Dyadic,
    pub fields: Vec<Dyadic>,
    pub pair_couplings: BTreeMap<(usize, usize), Dyadic>,
    pub triple_couplings: BTreeMap<(usize, usize, usize), Dyadic>,
}

impl IsingHamiltonian {
    pub fn zero(n_spins: usize) -> Self {
        IsingHamiltonian {
            n_spins,
            constant: Dyadic::ZERO,
            fields: vec![Dyadic::ZERO; n_spins],
            pair_couplings: BTreeMap::new(),
            triple_couplings: BTreeMap::new(),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn field(&self, i: usize) -> Dyadic {
        self.fields[i]
    }

    /// `J_ij`, order-insensitive.
    pub fn pair(&self, i: usize, j: usize) -> Dyadic {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pair_couplings.get(&key).copied().unwrap_or_default()
    }

    pub fn triple(&self, i: usize, j: usize, l: usize) -> Dyadic {
        let mut key = [i, j, l];
        key.sort_unstable();
        self.triple_couplings
            .get(&(key[0], key[1], key[2]))
            .copied()
            .unwrap_or_default()
    }

    /// Iterator over every stored coefficient.
    pub fn coefficients(&self) -> impl Iterator<Item = Dyadic> + '_ {
        std::iter::once(self.constant)
            .chain(self.fields.iter().copied())
            .chain(self.pair_couplings.values().copied())
            .chain(self.triple_couplings.values().copied())
    }

    /// Coefficient-wise sum; both operands must have the same spin count.
    pub fn sum(&self, other: &IsingHamiltonian) -> Result<IsingHamiltonian> {
        if self.n_spins != other.n_spins {
            return Err(Error::LengthMismatch {
                expected: self.n_spins,
                found: other.n_spins,
            });
        }
        let mut out = self.clone();
        out.constant += other.constant;
        for (a, &b) in out.fields.iter_mut().zip(&other.fields) {
            *a += b;
        }
        for (&key, &v) in &other.pair_couplings {
            *out.pair_couplings.entry(key).or_default() += v;
        }
        for (&key, &v) in &other.triple_couplings {
            *out.triple_couplings.entry(key).or_default() += v;
        }
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.pair_couplings.retain(|_, v| !v.is_zero());
        self.triple_couplings.retain(|_, v| !v.is_zero());
    }

    /// Exact diagonal entry at configuration `s`.
    pub fn energy(&self, s: &Assignment) -> Result<Dyadic> {
        if s.len() != self.n_spins {
            return Err(Error::LengthMismatch {
                expected: self.n_spins,
                found: s.len(),
            });
        }
        Ok(self.energy_of(|j| spin(s.get(j))))
    }

    fn energy_of(&self, z: impl Fn(usize) -> i64) -> Dyadic {
        let mut e = self.constant.0;
        for (i, h) in self.fields.iter().enumerate() {
            e += h.0 * z(i);
        }
        for (&(i, j), v) in &self.pair_couplings {
            e += v.0 * z(i) * z(j);
        }
        for (&(i, j, l), v) in &self.triple_couplings {
            e += v.0 * z(i) * z(j) * z(l);
        }
        Dyadic(e)
    }

    pub fn to_document(&self) -> IsingDocument {
        IsingDocument {
            n_spins: self.n_spins,
            constant: self.constant.to_string(),
            fields: self.fields.iter().map(Dyadic::to_string).collect(),
            pair_couplings: self
                .pair_couplings
                .iter()
                .map(|(&(i, j), v)| PairTerm {
                    i: i + 1,
                    j: j + 1,
                    value: v.to_string(),
                })
                .collect(),
            triple_couplings: self
                .triple_couplings
                .iter()
                .map(|(&(i, j, l), v)| TripleTerm {
                    i: i + 1,
                    j: j + 1,
                    l: l + 1,
                    value: v.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &IsingDocument) -> Result<Self> {
        let n = doc.n_spins;
        if doc.fields.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: doc.fields.len(),
            });
        }
        let check = |idx: &[usize]| -> Result<()> {
            let ok = idx.iter().all(|&x| (1..=n).contains(&x)) && idx.windows(2).all(|w| w[0] < w[1]);
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "coupling indices {idx:?} must be strictly increasing within 1..={n}"
                )))
            }
        };
        let mut h = IsingHamiltonian::zero(n);
        h.constant = doc.constant.parse()?;
        for (slot, v) in h.fields.iter_mut().zip(&doc.fields) {
            *slot = v.parse()?;
        }
        for t in &doc.pair_couplings {
            check(&[t.i, t.j])?;
            *h.pair_couplings.entry((t.i - 1, t.j - 1)).or_default() += t.value.parse()?;
        }
        for t in &doc.triple_couplings {
            check(&[t.i, t.j, t.l])?;
            *h.triple_couplings.entry((t.i - 1, t.j - 1, t.l - 1)).or_default() += t.value.parse()?;
        }
        h.prune();
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

#[inline]
fn spin(bit: bool) -> i64 {
    if bit {
        -1
    } else {
        1
    }
}

/// JSON form of an [`IsingHamiltonian`].
///
/// Spins are numbered from 1 like DIMACS variables. `fields[p]` belongs to
/// spin `p + 1`. Couplings are listed with strictly increasing indices in
/// lexicographic order, zero terms omitted. Values are exact fractions `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingDocument {
    pub n_spins: usize,
    pub constant: String,
    pub fields: Vec<String>,
    pub pair_couplings: Vec<PairTerm>,
    pub triple_couplings: Vec<TripleTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleTerm {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub value: String,
}

/// Sum of clause projectors, expanded into `σ^z` monomials.
pub fn embed(formula: &CnfFormula) -> Result<IsingHamiltonian> {
    let k = formula.k();
    if k > 3 {
        return Err(Error::UnsupportedWidth(k));
    }
    let mut h = IsingHamiltonian::zero(formula.n_vars());
    // Each monomial of Π (1 + s_a z_a)/2 carries 1/2^k = (8 >> k)/8.
    let unit = DENOMINATOR >> k;
    for clause in formula.clauses() {
        let lits = clause.literals();
        // s_a = (−1)^α with α = 0 for x_j and α = 1 for ¬x_j.
        let sign: Vec<i64> = lits.iter().map(|l| if l.is_negated() { -1 } else { 1 }).collect();
        for subset in 0u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|&a| subset >> a & 1 == 1).collect();
            let coeff = Dyadic(unit * members.iter().map(|&a| sign[a]).product::<i64>());
            let mut vars: Vec<usize> = members.iter().map(|&a| lits[a].var()).collect();
            vars.sort_unstable();
            match vars.as_slice() {
                [] => h.constant += coeff,
                [i] => h.fields[*i] += coeff,
                [i, j] => *h.pair_couplings.entry((*i, *j)).or_default() += coeff,
                [i, j, l] => *h.triple_couplings.entry((*i, *j, *l)).or_default() += coeff,
                _ => unreachable!("width checked above"),
            }
        }
    }
    h.prune();
    Ok(h)
}

/// Free-function form of [`IsingHamiltonian::energy`].
pub fn energy(h: &IsingHamiltonian, s: &Assignment) -> Result<Dyadic> {
    h.energy(s)
}

/// Exhaustively checks that `h` reproduces the violated-clause count of
/// `formula` on every configuration.
pub fn verify_embedding(formula: &CnfFormula, h: &IsingHamiltonian) -> Result<bool> {
    verify_embedding_with_limit(formula, h, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn verify_embedding_with_limit(
    formula: &CnfFormula,
    h: &IsingHamiltonian,
    limit: usize,
) -> Result<bool> {
    let n = formula.n_vars();
    if n > limit.min(63) {
        return Err(Error::TooLarge { n_vars: n, limit });
    }
    if h.n_spins() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: h.n_spins(),
        });
    }
    let masks = formula.violation_masks();
    for s in 0..(1u64 << n) {
        let violated = masks.iter().filter(|&&(m, v)| s & m == v).count() as i64;
        let e = h.energy_of(|j| spin((s >> j) & 1 == 1));
        if e != Dyadic::from_integer(violated) {
            return Ok(false);
        }
    }
    Ok(true)
}
