//! One-shot bid/pass games solved at every node of the backward induction.
//!
//! Both variants share the matrix
//!
//! ```text
//!              bid                 pass
//!   bid   ((a+c)/2, (a+c)/2)      (a, c)
//!   pass       (c, a)             (d, e)
//! ```
//!
//! where `a` is the contested value, `c` what a player gets by continuing
//! alone and `(d, e)` the continuation when both pass. With full recall the
//! continuation is symmetric (`d = e`). Bidding for a value other than the
//! best available one is dominated and is not part of the matrix.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Arithmetic used by the solvers: `f64` compares with a 1e-12 tolerance,
/// rationals compare exactly.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Signed {
    fn from_f64_lossy(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn tol_cmp(&self, other: &Self) -> Ordering;
    fn slack() -> Self;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
    fn two() -> Self {
        Self::one() + Self::one()
    }
    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

pub const EQ_TOL: f64 = 1e-12;

impl Scalar for f64 {
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tol_cmp(&self, other: &Self) -> Ordering {
        if (self - other).abs() <= EQ_TOL {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn slack() -> Self {
        EQ_TOL
    }
}

impl Scalar for BigRational {
    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).expect("finite")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn tol_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn slack() -> Self {
        BigRational::from_integer(0.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FrCase {
    /// a > c ∨ d: both bid.
    A,
    /// d > a > c: two pure equilibria and a symmetric mixed one.
    B,
    /// a < c: both pass.
    C,
    /// d = a > c or d > a = c.
    D,
    /// a = c = d: every profile pays (d, d).
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NrCase {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    FullRecall(FrCase),
    NoRecall(NrCase),
}

impl CaseTag {
    /// Cases whose equilibrium payoffs form a segment; only the endpoints are listed.
    pub fn is_continuum(&self) -> bool {
        matches!(
            self,
            CaseTag::NoRecall(NrCase::D | NrCase::E | NrCase::F | NrCase::J | NrCase::K)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageEquilibrium<S> {
    pub payoff: (S, S),
    /// Bid probabilities (player 1, player 2) of a profile supporting `payoff`.
    pub bid: (S, S),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageGameOutcome<S> {
    pub case: CaseTag,
    pub equilibria: Vec<StageEquilibrium<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffExtremes<S> {
    pub min_sum: S,
    pub max_sum: S,
    pub min_single: S,
    pub max_single: S,
}

impl<S: Scalar> StageGameOutcome<S> {
    pub fn payoff_extremes(&self) -> PayoffExtremes<S> {
        let mut it = self.equilibria.iter();
        let first = it.next().expect("at least one equilibrium");
        let sum = |e: &StageEquilibrium<S>| e.payoff.0.clone() + e.payoff.1.clone();
        let mut ex = PayoffExtremes {
            min_sum: sum(first),
            max_sum: sum(first),
            min_single: S::min_of(&first.payoff.0, &first.payoff.1),
            max_single: S::max_of(&first.payoff.0, &first.payoff.1),
        };
        for e in it {
            let s = sum(e);
            ex.min_sum = S::min_of(&ex.min_sum, &s);
            ex.max_sum = S::max_of(&ex.max_sum, &s);
            ex.min_single = S::min_of(&ex.min_single, &S::min_of(&e.payoff.0, &e.payoff.1));
            ex.max_single = S::max_of(&ex.max_single, &S::max_of(&e.payoff.0, &e.payoff.1));
        }
        ex
    }
}

/// The bid/pass matrix, used to verify equilibria independently of the case analysis.
#[derive(Debug, Clone)]
pub struct BidPassMatrix<S> {
    pub a: S,
    pub c: S,
    pub d: S,
    pub e: S,
}

impl<S: Scalar> BidPassMatrix<S> {
    /// Expected payoffs when player 1 bids with probability p and player 2 with q.
    pub fn payoff(&self, p: &S, q: &S) -> (S, S) {
        let one = S::one();
        let both = (self.a.clone() + self.c.clone()) * S::half();
        let np = one.clone() - p.clone();
        let nq = one - q.clone();
        let u1 = p.clone() * q.clone() * both.clone()
            + p.clone() * nq.clone() * self.a.clone()
            + np.clone() * q.clone() * self.c.clone()
            + np.clone() * nq.clone() * self.d.clone();
        let u2 = p.clone() * q.clone() * both
            + p.clone() * nq.clone() * self.c.clone()
            + np.clone() * q.clone() * self.a.clone()
            + np * nq * self.e.clone();
        (u1, u2)
    }

    /// Largest gain either player gets by switching to a pure action.
    pub fn deviation_gain(&self, p: &S, q: &S) -> S {
        let (u1, u2) = self.payoff(p, q);
        let one = S::one();
        let zero = S::zero();
        let g1 = S::max_of(&(self.payoff(&one, q).0 - u1.clone()), &(self.payoff(&zero, q).0 - u1));
        let g2 = S::max_of(&(self.payoff(p, &one).1 - u2.clone()), &(self.payoff(p, &zero).1 - u2));
        S::max_of(&g1, &g2)
    }

    pub fn is_equilibrium(&self, p: &S, q: &S) -> bool {
        self.deviation_gain(p, q) <= S::slack()
    }
}

fn eq<S: Scalar>(payoff: (S, S), bid: (S, S)) -> StageEquilibrium<S> {
    StageEquilibrium { payoff, bid }
}

/// Bid probability that makes the opponent (continuation `cont` when both
/// pass) indifferent between bidding and passing.
fn indifference_prob<S: Scalar>(a: &S, c: &S, cont: &S) -> S {
    S::two() * (a.clone() - cont.clone()) / (c.clone() + a.clone() - S::two() * cont.clone())
}

/// Payoff of the player whose opponent mixes with `indifference_prob`.
fn mixed_payoff<S: Scalar>(a: &S, c: &S, cont: &S) -> S {
    (S::two() * a.clone() * c.clone() - cont.clone() * (c.clone() + a.clone()))
        / (c.clone() + a.clone() - S::two() * cont.clone())
}

pub fn solve_fr_stage<S: Scalar>(a: &S, c: &S, d: &S) -> Result<StageGameOutcome<S>> {
    use Ordering::*;
    let one = S::one();
    let zero = S::zero();
    let ac = a.tol_cmp(c);
    let ad = a.tol_cmp(d);
    if ac != Greater && ad == Greater {
        return Err(Error::Inconsistent(format!(
            "continuation d={d:?} below a={a:?} although c={c:?} >= a"
        )));
    }
    let both_bid = (a.clone() + c.clone()) * S::half();
    let pass = eq((d.clone(), d.clone()), (zero.clone(), zero.clone()));
    let bid = eq((both_bid.clone(), both_bid.clone()), (one.clone(), one.clone()));
    let out = match (ac, ad) {
        (Greater, Greater) => StageGameOutcome { case: CaseTag::FullRecall(FrCase::A), equilibria: vec![bid] },
        (Greater, Less) => {
            let p = S::two() * (d.clone() - a.clone()) / (S::two() * d.clone() - a.clone() - c.clone());
            let v = (d.clone() * c.clone() - S::two() * a.clone() * c.clone() + a.clone() * d.clone())
                / (S::two() * d.clone() - a.clone() - c.clone());
            StageGameOutcome {
                case: CaseTag::FullRecall(FrCase::B),
                equilibria: vec![bid, pass, eq((v.clone(), v), (p.clone(), p))],
            }
        }
        (Less, _) => StageGameOutcome { case: CaseTag::FullRecall(FrCase::C), equilibria: vec![pass] },
        (Greater, Equal) | (Equal, Less) => {
            StageGameOutcome { case: CaseTag::FullRecall(FrCase::D), equilibria: vec![bid, pass] }
        }
        (Equal, Equal) => StageGameOutcome { case: CaseTag::FullRecall(FrCase::E), equilibria: vec![pass] },
        (Equal, Greater) => unreachable!("rejected above"),
    };
    Ok(out)
}

/// Worst and best symmetric equilibrium payoff of the full-recall stage game.
pub fn psi_extremes<S: Scalar>(a: &S, c: &S, d: &S) -> Result<(S, S)> {
    let out = solve_fr_stage(a, c, d)?;
    let ex = out.payoff_extremes();
    Ok((ex.min_single, ex.max_single))
}

pub fn selector_l(x: f64, y: f64, z: f64) -> f64 {
    if x <= y {
        z
    } else {
        (x + y) / 2.0
    }
}

pub fn selector_h(x: f64, y: f64, z: f64) -> f64 {
    if x > y.max(z) {
        (x + y) / 2.0
    } else {
        z
    }
}

pub fn solve_nr_stage<S: Scalar>(a: &S, c: &S, d: &S, e: &S) -> Result<StageGameOutcome<S>> {
    use Ordering::*;
    if d.tol_cmp(c) == Greater || e.tol_cmp(c) == Greater {
        return Err(Error::Inconsistent(format!(
            "continuation ({d:?}, {e:?}) exceeds the lone value c={c:?}"
        )));
    }
    let one = S::one();
    let zero = S::zero();
    let tag = |k| CaseTag::NoRecall(k);
    let take1 = || eq((a.clone(), c.clone()), (one.clone(), zero.clone()));
    let take2 = || eq((c.clone(), a.clone()), (zero.clone(), one.clone()));
    let both_pass = || eq((d.clone(), e.clone()), (zero.clone(), zero.clone()));

    match a.tol_cmp(c) {
        Greater => {
            let v = (a.clone() + c.clone()) * S::half();
            return Ok(StageGameOutcome {
                case: tag(NrCase::A),
                equilibria: vec![eq((v.clone(), v), (one.clone(), one))],
            });
        }
        Equal => {
            return Ok(StageGameOutcome {
                case: tag(NrCase::B),
                equilibria: vec![eq((c.clone(), c.clone()), (one.clone(), one))],
            });
        }
        Less => {}
    }
    let out = match (a.tol_cmp(d), a.tol_cmp(e)) {
        (Greater, Greater) => {
            let p = indifference_prob(a, c, e);
            let q = indifference_prob(a, c, d);
            let mixed = eq((mixed_payoff(a, c, d), mixed_payoff(a, c, e)), (p, q));
            StageGameOutcome { case: tag(NrCase::C), equilibria: vec![take1(), take2(), mixed] }
        }
        (Equal, Greater) => {
            // Player 2 passes; player 1 mixes anywhere from the indifference point to a sure bid.
            let p = indifference_prob(a, c, e);
            let low = eq((a.clone(), mixed_payoff(a, c, e)), (p, zero.clone()));
            StageGameOutcome { case: tag(NrCase::D), equilibria: vec![take2(), low, take1()] }
        }
        (Greater, Equal) => {
            let q = indifference_prob(a, c, d);
            let low = eq((mixed_payoff(a, c, d), a.clone()), (zero.clone(), q));
            StageGameOutcome { case: tag(NrCase::E), equilibria: vec![take1(), low, take2()] }
        }
        (Equal, Equal) => StageGameOutcome {
            case: tag(NrCase::F),
            equilibria: vec![both_pass(), take1(), take2()],
        },
        (Less, Less) => StageGameOutcome { case: tag(NrCase::G), equilibria: vec![both_pass()] },
        (Less, Greater) => StageGameOutcome { case: tag(NrCase::H), equilibria: vec![take2()] },
        (Greater, Less) => StageGameOutcome { case: tag(NrCase::I), equilibria: vec![take1()] },
        (Less, Equal) => StageGameOutcome { case: tag(NrCase::J), equilibria: vec![both_pass(), take2()] },
        (Equal, Less) => StageGameOutcome { case: tag(NrCase::K), equilibria: vec![both_pass(), take1()] },
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn payoffs(out: &StageGameOutcome<BigRational>) -> Vec<(BigRational, BigRational)> {
        out.equilibria.iter().map(|e| e.payoff.clone()).collect()
    }

    #[test]
    fn nr_mixed_case_matches_two_point_values() {
        let out = solve_nr_stage(&q(1, 3), &q(1, 2), &q(1, 4), &q(1, 4)).unwrap();
        assert_eq!(out.case, CaseTag::NoRecall(NrCase::C));
        let got = payoffs(&out);
        assert!(got.contains(&(q(1, 3), q(1, 2))));
        assert!(got.contains(&(q(1, 2), q(1, 3))));
        assert!(got.contains(&(q(3, 8), q(3, 8))));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn nr_high_value_is_contested() {
        let out = solve_nr_stage(&q(2, 3), &q(1, 2), &q(1, 4), &q(1, 4)).unwrap();
        assert_eq!(payoffs(&out), vec![(q(7, 12), q(7, 12))]);
    }

    #[test]
    fn nr_low_value_passes() {
        let out = solve_nr_stage(&0.1, &0.5, &0.3, &0.2).unwrap();
        assert_eq!(out.case, CaseTag::NoRecall(NrCase::G));
        assert_eq!(out.equilibria[0].payoff, (0.3, 0.2));
    }

    #[test]
    fn nr_rejects_continuation_above_lone_value() {
        assert!(solve_nr_stage(&0.1, &0.5, &0.6, &0.2).is_err());
    }

    #[test]
    fn fr_cases() {
        let out = solve_fr_stage(&0.8, &0.5, &0.6).unwrap();
        assert_eq!(out.case, CaseTag::FullRecall(FrCase::A));
        assert_eq!(out.equilibria[0].payoff, (0.65, 0.65));

        let a = 2.0 / 3.0;
        let c = 7.0 / 12.0;
        let out = solve_fr_stage(&a, &c, &0.6).unwrap();
        assert!((out.equilibria[0].payoff.0 - 0.625).abs() < 1e-15);

        let out = solve_fr_stage(&0.3, &0.5, &0.4).unwrap();
        assert_eq!(out.case, CaseTag::FullRecall(FrCase::C));
        assert_eq!(out.equilibria[0].payoff, (0.4, 0.4));

        assert!(solve_fr_stage(&0.5, &0.6, &0.4).is_err());
    }

    #[test]
    fn fr_mixed_case_exact() {
        let (a, c, d) = (q(1, 2), q(1, 4), q(3, 4));
        let out = solve_fr_stage(&a, &c, &d).unwrap();
        assert_eq!(out.case, CaseTag::FullRecall(FrCase::B));
        let mixed = &out.equilibria[2];
        let expected = (d.clone() * c.clone() - q(2, 1) * a.clone() * c.clone() + a.clone() * d.clone())
            / (q(2, 1) * d.clone() - a.clone() - c.clone());
        assert_eq!(mixed.payoff.0, expected);
        assert_eq!(mixed.bid.0, q(2, 1) * (d.clone() - a.clone()) / (q(2, 1) * d - a - c));
    }

    #[test]
    fn psi_branches() {
        assert_eq!(psi_extremes(&0.2, &0.5, &0.6).unwrap(), (0.6, 0.6));
        assert_eq!(psi_extremes(&0.5, &0.3, &0.7).unwrap(), (0.4, 0.7));
        let (lo, hi) = psi_extremes(&0.8, &0.4, &0.5).unwrap();
        assert!((lo - 0.6).abs() < 1e-15 && (hi - 0.6).abs() < 1e-15);
    }

    #[test]
    fn selectors() {
        assert_eq!(selector_l(0.5, 0.6, 0.3), 0.3);
        assert!((selector_h(0.7, 0.6, 0.65) - 0.65).abs() < 1e-15);
        assert_eq!(selector_h(0.5, 0.6, 0.9), 0.9);
        assert!((selector_l(0.7, 0.6, 0.9) - 0.65).abs() < 1e-15);
    }

    #[test]
    fn every_listed_equilibrium_is_verified_exactly() {
        let vals: Vec<BigRational> = (0..=6).map(|i| q(i, 6)).collect();
        for a in &vals {
            for c in &vals {
                for d in vals.iter().filter(|d| *d <= c) {
                    for e in vals.iter().filter(|e| *e <= c) {
                        let out = solve_nr_stage(a, c, d, e).unwrap();
                        let m = BidPassMatrix { a: a.clone(), c: c.clone(), d: d.clone(), e: e.clone() };
                        for eqm in &out.equilibria {
                            assert!(m.is_equilibrium(&eqm.bid.0, &eqm.bid.1), "{a} {c} {d} {e} {:?}", out.case);
                            assert_eq!(m.payoff(&eqm.bid.0, &eqm.bid.1), eqm.payoff);
                        }
                    }
                    if solve_fr_stage(a, c, d).is_ok() {
                        let out = solve_fr_stage(a, c, d).unwrap();
                        let m = BidPassMatrix { a: a.clone(), c: c.clone(), d: d.clone(), e: d.clone() };
                        for eqm in &out.equilibria {
                            assert!(m.is_equilibrium(&eqm.bid.0, &eqm.bid.1));
                            assert_eq!(m.payoff(&eqm.bid.0, &eqm.bid.1), eqm.payoff);
                        }
                    }
                }
            }
        }
    }
}
