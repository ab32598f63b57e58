//! Exact equilibrium payoff sets for discrete laws with small support, by
//! set-valued backward induction in rational arithmetic.
//!
//! At every node the continuation set is the set of expectations of all
//! per-arrival choices of continuation payoff, and each continuation is pushed
//! through the stage game. Sets are deduplicated with exact equality.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::distributions::{float_to_rational, ValueDistribution};
use crate::error::{Error, Result};
use crate::stage_games::{solve_fr_stage, solve_nr_stage, BidPassMatrix, CaseTag, StageGameOutcome};

pub const MAX_SUPPORT: usize = 4;
pub const MAX_HORIZON: usize = 6;
pub const MAX_SET_SIZE: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[serde(alias = "full_recall", alias = "fr")]
    FullRecall,
    #[serde(alias = "no_recall", alias = "nr")]
    NoRecall,
}

pub type Pair = (BigRational, BigRational);

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpepSet {
    pub variant: Variant,
    pub n: usize,
    /// Equilibrium payoff pairs, sorted.
    pub payoffs: Vec<Pair>,
    /// For each payoff, the stage-game case met at the first arrival, one
    /// entry per support point.
    pub provenance: Vec<Vec<CaseTag>>,
    /// Some stage game along the way had a segment of equilibrium payoffs of
    /// which only the endpoints were kept.
    pub endpoints_only: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSummaries {
    pub best_sum: BigRational,
    pub worst_sum: BigRational,
    pub worst_single: BigRational,
    pub best_single: BigRational,
}

type Atoms = [(BigRational, BigRational)];
type Tagged = BTreeMap<Pair, Vec<CaseTag>>;

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn validate(atoms: &Atoms, n: usize) -> Result<()> {
    if atoms.is_empty() || n == 0 {
        return Err(Error::Validation("oracle needs at least one atom and one arrival".into()));
    }
    // Size limits keep the set-valued induction tractable.
    if atoms.len() > MAX_SUPPORT {
        return Err(Error::Resource(format!("oracle support limited to {MAX_SUPPORT} points, got {}", atoms.len())));
    }
    if n > MAX_HORIZON {
        return Err(Error::Resource(format!("oracle horizon limited to {MAX_HORIZON}, got {n}")));
    }
    let total = atoms.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
    if total != BigRational::one() {
        return Err(Error::Validation(format!("atom masses sum to {total}, not 1")));
    }
    let unit = BigRational::zero()..=BigRational::one();
    if atoms.iter().any(|(x, p)| !unit.contains(x) || *p <= BigRational::zero()) {
        return Err(Error::Validation("atoms need values in [0,1] and positive masses".into()));
    }
    Ok(())
}

fn sorted(atoms: &Atoms) -> Vec<(BigRational, BigRational)> {
    let mut v = atoms.to_vec();
    v.sort();
    v
}

/// E[max(X_1..X_k) ∨ b], exactly.
pub fn exact_order_max_with(atoms: &Atoms, k: usize, b: &BigRational) -> BigRational {
    let atoms = sorted(atoms);
    let pow = |x: &BigRational| num_traits::pow(x.clone(), k);
    let mut cdf = atoms.iter().filter(|(x, _)| x <= b).fold(BigRational::zero(), |a, (_, p)| a + p);
    let mut prev = pow(&cdf);
    let mut out = b.clone() * prev.clone();
    for (x, p) in atoms.iter().filter(|(x, _)| x > b) {
        cdf += p;
        let cur = pow(&cdf);
        out += x.clone() * (cur.clone() - prev);
        prev = cur;
    }
    out
}

/// Minkowski sum Σ_i m_i · S_i of per-arrival sets, keeping the provenance
/// of the first combination that produced each point.
fn expectation_sets(masses: &[BigRational], sets: &[Tagged]) -> Result<Tagged> {
    let mut acc: Tagged = BTreeMap::new();
    acc.insert((BigRational::zero(), BigRational::zero()), vec![]);
    for (m, set) in masses.iter().zip(sets) {
        let mut next: Tagged = BTreeMap::new();
        for (p, tags) in &acc {
            for (q, qt) in set {
                let point = (p.0.clone() + m.clone() * q.0.clone(), p.1.clone() + m.clone() * q.1.clone());
                next.entry(point).or_insert_with(|| {
                    let mut t = tags.clone();
                    t.extend(qt.iter().take(1).copied());
                    t
                });
            }
        }
        if next.len() > MAX_SET_SIZE {
            return Err(Error::Resource(format!("continuation set exceeds {MAX_SET_SIZE} points")));
        }
        acc = next;
    }
    Ok(acc)
}

fn check(out: &StageGameOutcome<BigRational>, m: &BidPassMatrix<BigRational>) -> Result<()> {
    for e in &out.equilibria {
        if !m.is_equilibrium(&e.bid.0, &e.bid.1) || m.payoff(&e.bid.0, &e.bid.1) != e.payoff {
            return Err(Error::Inconsistent(format!("stage equilibrium {:?} failed re-check", e.payoff)));
        }
    }
    Ok(())
}

struct FrOracle {
    atoms: Vec<(BigRational, BigRational)>,
    memo: HashMap<(usize, BigRational, BigRational), Tagged>,
}

impl FrOracle {
    fn set(&mut self, k: usize, a: &BigRational, b: &BigRational) -> Result<Tagged> {
        if k == 0 {
            let v = (a.clone() + b.clone()) * half();
            return Ok(BTreeMap::from([((v.clone(), v), vec![])]));
        }
        let key = (k, a.clone(), b.clone());
        if let Some(s) = self.memo.get(&key) {
            return Ok(s.clone());
        }
        let atoms = self.atoms.clone();
        let mut per_arrival = Vec::with_capacity(atoms.len());
        for (x, _) in &atoms {
            let (na, nb) = if x <= b {
                (a.clone(), b.clone())
            } else if x <= a {
                (a.clone(), x.clone())
            } else {
                (x.clone(), a.clone())
            };
            per_arrival.push(self.set(k - 1, &na, &nb)?);
        }
        let masses: Vec<_> = atoms.iter().map(|(_, p)| p.clone()).collect();
        let conts = expectation_sets(&masses, &per_arrival)?;
        let c = exact_order_max_with(&atoms, k, b);
        let mut out: Tagged = BTreeMap::new();
        for ((d, _), _) in conts {
            let stage = solve_fr_stage(a, &c, &d)?;
            check(&stage, &BidPassMatrix { a: a.clone(), c: c.clone(), d: d.clone(), e: d.clone() })?;
            for e in stage.equilibria {
                out.entry(e.payoff).or_insert_with(|| vec![stage.case]);
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

fn finish(variant: Variant, n: usize, set: Tagged, endpoints_only: bool) -> DiscreteSpepSet {
    let (payoffs, provenance) = set.into_iter().unzip();
    DiscreteSpepSet { variant, n, payoffs, provenance, endpoints_only }
}

fn full_recall(atoms: &Atoms, n: usize) -> Result<DiscreteSpepSet> {
    let mut oracle = FrOracle { atoms: sorted(atoms), memo: HashMap::new() };
    let zero = BigRational::zero();
    // The game starts with nothing available: the state (n, 0, 0) always
    // passes into the first arrival, so its set is the continuation set.
    let atoms = oracle.atoms.clone();
    let mut per_arrival = Vec::new();
    for (x, _) in &atoms {
        per_arrival.push(oracle.set(n - 1, x, &zero)?);
    }
    let masses: Vec<_> = atoms.iter().map(|(_, p)| p.clone()).collect();
    let set = expectation_sets(&masses, &per_arrival)?;
    Ok(finish(Variant::FullRecall, n, set, false))
}

fn no_recall(atoms: &Atoms, n: usize) -> Result<DiscreteSpepSet> {
    let atoms = sorted(atoms);
    let masses: Vec<_> = atoms.iter().map(|(_, p)| p.clone()).collect();
    let mut game: Tagged = BTreeMap::from([((BigRational::zero(), BigRational::zero()), vec![])]);
    let mut c = BigRational::zero();
    let mut endpoints_only = false;
    for _ in 1..=n {
        let mut per_arrival = Vec::with_capacity(atoms.len());
        for (a, _) in &atoms {
            let mut here: Tagged = BTreeMap::new();
            for (d, e) in game.keys() {
                let stage = solve_nr_stage(a, &c, d, e)?;
                check(&stage, &BidPassMatrix { a: a.clone(), c: c.clone(), d: d.clone(), e: e.clone() })?;
                endpoints_only |= stage.case.is_continuum();
                for eq in stage.equilibria {
                    here.entry(eq.payoff).or_insert_with(|| vec![stage.case]);
                }
            }
            per_arrival.push(here);
        }
        game = expectation_sets(&masses, &per_arrival)?;
        // lone value for one more arrival: E(X ∨ c)
        c = exact_order_max_with(&atoms, 1, &c);
    }
    Ok(finish(Variant::NoRecall, n, game, endpoints_only))
}

/// Equilibrium payoff set of the n-arrival game with the given exact atoms.
pub fn oracle_spep(atoms: &Atoms, n: usize, variant: Variant) -> Result<DiscreteSpepSet> {
    validate(atoms, n)?;
    match variant {
        Variant::FullRecall => full_recall(atoms, n),
        Variant::NoRecall => no_recall(atoms, n),
    }
}

/// Same, for a discrete [`ValueDistribution`]; floats are read as the
/// simplest nearby fraction.
pub fn oracle_spep_for(d: &ValueDistribution, n: usize, variant: Variant) -> Result<DiscreteSpepSet> {
    if !d.is_discrete() {
        return Err(Error::Unsupported("the exact oracle needs a discrete distribution".into()));
    }
    let atoms: Vec<_> = d
        .atoms()
        .iter()
        .map(|&(x, p)| Ok((float_to_rational(x)?, float_to_rational(p)?)))
        .collect::<Result<_>>()?;
    oracle_spep(&atoms, n, variant)
}

pub fn oracle_summaries(set: &DiscreteSpepSet) -> Result<OracleSummaries> {
    let first = set.payoffs.first().ok_or_else(|| Error::Validation("empty payoff set".into()))?;
    let sum = |p: &Pair| p.0.clone() + p.1.clone();
    let lo = |p: &Pair| p.0.clone().min(p.1.clone());
    let hi = |p: &Pair| p.0.clone().max(p.1.clone());
    let mut s = OracleSummaries {
        best_sum: sum(first),
        worst_sum: sum(first),
        worst_single: lo(first),
        best_single: hi(first),
    };
    for p in &set.payoffs[1..] {
        s.best_sum = s.best_sum.max(sum(p));
        s.worst_sum = s.worst_sum.min(sum(p));
        s.worst_single = s.worst_single.min(lo(p));
        s.best_single = s.best_single.max(hi(p));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn two_point() -> Vec<(BigRational, BigRational)> {
        vec![(q(1, 3), q(1, 2)), (q(2, 3), q(1, 2))]
    }

    #[test]
    fn two_point_no_recall_n2() {
        let set = oracle_spep(&two_point(), 2, Variant::NoRecall).unwrap();
        let mut want = vec![(q(11, 24), q(13, 24)), (q(13, 24), q(11, 24)), (q(23, 48), q(23, 48))];
        want.sort();
        assert_eq!(set.payoffs, want);
        assert!(!set.endpoints_only);
        assert_eq!(oracle_summaries(&set).unwrap().best_single, q(13, 24));
    }

    #[test]
    fn no_recall_n1_is_half_the_mean() {
        let set = oracle_spep(&two_point(), 1, Variant::NoRecall).unwrap();
        assert_eq!(set.payoffs, vec![(q(1, 4), q(1, 4))]);
    }

    #[test]
    fn example_with_low_atom() {
        let atoms = vec![(q(1, 10), q(1, 2)), (q(1, 2), q(1, 2))];
        let fr = oracle_spep(&atoms, 2, Variant::FullRecall).unwrap();
        assert_eq!(fr.payoffs, vec![(q(3, 10), q(3, 10))]);
        let nr = oracle_spep(&atoms, 2, Variant::NoRecall).unwrap();
        assert_eq!(oracle_summaries(&nr).unwrap().best_single, q(11, 40));
    }

    #[test]
    fn singleton_summaries_coincide() {
        let set = oracle_spep(&[(q(1, 2), q(1, 1))], 3, Variant::FullRecall).unwrap();
        let s = oracle_summaries(&set).unwrap();
        assert_eq!(s.worst_single, q(1, 2));
        assert_eq!(s.best_single, q(1, 2));
        assert_eq!(s.best_sum, q(1, 1));
    }

    #[test]
    fn exact_order_statistic() {
        assert_eq!(exact_order_max_with(&two_point(), 2, &q(0, 1)), q(7, 12));
        assert_eq!(exact_order_max_with(&two_point(), 1, &q(1, 2)), q(7, 12));
    }

    #[test]
    fn guards() {
        assert!(oracle_spep(&two_point(), 7, Variant::NoRecall).is_err());
        assert!(oracle_spep(&[(q(1, 2), q(1, 3))], 2, Variant::NoRecall).is_err());
    }
}
