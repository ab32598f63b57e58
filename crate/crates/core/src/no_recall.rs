//! Extremal equilibrium payoffs of the no-recall game for atomless value
//! distributions.
//!
//! For the game with k arrivals the module tracks three numbers: the worst
//! payoff a single player can be held to (`alpha_prime`), half the worst
//! equilibrium payoff sum (`alpha`) and half the best one (`beta`). Each is
//! obtained from the (k-1)-arrival values by integrating a piecewise selector
//! over the first arrival.

use serde::Serialize;

use crate::distributions::ValueDistribution;
use crate::error::{Error, Result};
use crate::prophet::{prophet_values, ProphetSequence};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoRecallSummary {
    pub n: usize,
    pub alpha_prime: f64,
    pub alpha: f64,
    pub beta: f64,
    pub prophet: ProphetSequence,
}

/// Values of the game with k arrivals; the continuation of a stage with k
/// arrivals still to come.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageValues {
    pub alpha_prime: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

impl StageValues {
    pub const TERMINAL: StageValues = StageValues { alpha_prime: 0.0, alpha: 0.0, beta: 0.0, c: 0.0 };
}

/// All stage values for k = 0..=n (k = 0 is the empty game).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoRecallTables {
    pub stages: Vec<StageValues>,
}

impl NoRecallTables {
    pub fn n(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, k: usize) -> StageValues {
        self.stages[k]
    }

    pub fn summary(&self) -> NoRecallSummary {
        let n = self.n();
        let top = self.stages[n];
        NoRecallSummary {
            n,
            alpha_prime: top.alpha_prime,
            alpha: top.alpha,
            beta: top.beta,
            prophet: ProphetSequence { c: self.stages[1..].iter().map(|s| s.c).collect() },
        }
    }
}

/// Per-arrival integrands `(α'(a), 2β(a), 2α(a))` for a stage whose
/// continuation game has values `s`.
pub fn per_value_selectors(s: &StageValues, a: f64) -> (f64, f64, f64) {
    let StageValues { alpha_prime: ap, alpha: al, beta: be, c } = *s;
    let single = if a < ap {
        ap
    } else if a < c {
        a
    } else {
        (a + c) / 2.0
    };
    let best = if a < ap {
        2.0 * be
    } else if a < be {
        (a + c).max(2.0 * be)
    } else {
        a + c
    };
    let worst = if a < ap {
        2.0 * al
    } else if a < al {
        (2.0 * al).min(a + c)
    } else if a < be {
        2.0 * a
    } else if a < c {
        mixed_sum(a, c, be)
    } else {
        a + c
    };
    (single, best, worst)
}

/// Payoff sum of the symmetric mixed equilibrium when both would pass into
/// the best continuation `(beta, beta)`.
pub fn mixed_sum(a: f64, c: f64, beta: f64) -> f64 {
    let den = c + a - 2.0 * beta;
    debug_assert!(den > 0.0);
    (4.0 * a * c - 2.0 * beta * (a + c)) / den
}

/// Break points of the selectors, sorted and clamped to [0,1].
fn breakpoints(s: &StageValues) -> Vec<f64> {
    let mut pts = vec![
        0.0,
        1.0,
        s.alpha_prime,
        s.alpha,
        s.beta,
        s.c,
        2.0 * s.beta - s.c,
        2.0 * s.alpha - s.c,
    ];
    for p in pts.iter_mut() {
        *p = p.clamp(0.0, 1.0);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn next_stage(d: &ValueDistribution, s: &StageValues, c_next: f64) -> Result<StageValues> {
    if s.c - s.beta < 0.0 {
        return Err(Error::Integration(format!("beta {} above lone value {}", s.beta, s.c)));
    }
    let pts = breakpoints(s);
    let (mut single, mut best, mut worst) = (0.0, 0.0, 0.0);
    for w in pts.windows(2) {
        single += d.partial_expectation(w[0], w[1], |a| per_value_selectors(s, a).0)?;
        best += d.partial_expectation(w[0], w[1], |a| per_value_selectors(s, a).1)?;
        worst += d.partial_expectation(w[0], w[1], |a| per_value_selectors(s, a).2)?;
    }
    Ok(StageValues { alpha_prime: single, alpha: worst / 2.0, beta: best / 2.0, c: c_next })
}

pub fn no_recall_tables(d: &ValueDistribution, n: usize) -> Result<NoRecallTables> {
    if !d.is_continuous() {
        return Err(Error::Unsupported(
            "no-recall recursions need an atomless distribution; use the exact oracle for discrete ones".into(),
        ));
    }
    let c = prophet_values(d, n);
    let mut stages = vec![StageValues::TERMINAL];
    for k in 1..=n {
        let prev = stages[k - 1];
        stages.push(next_stage(d, &prev, c.get(k))?);
    }
    Ok(NoRecallTables { stages })
}

pub fn no_recall_summary(d: &ValueDistribution, n: usize) -> Result<NoRecallSummary> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    Ok(no_recall_tables(d, n)?.summary())
}

/// Closed-form recursions for Uniform[0,1].
pub fn uniform_no_recall_tables(n: usize) -> NoRecallTables {
    let mut stages = vec![StageValues::TERMINAL];
    if n >= 1 {
        stages.push(StageValues { alpha_prime: 0.25, alpha: 0.25, beta: 0.25, c: 0.5 });
    }
    for _ in 2..=n {
        let StageValues { alpha_prime: ap, alpha: al, beta: be, c } = *stages.last().unwrap();
        let next_ap = 0.5 * ap * ap + 0.5 * c - 0.25 * c * c + 0.25;
        let two_beta = 2.0 * be * ap + c * (1.0 - ap) + (1.0 - ap * ap) / 2.0;
        let two_alpha = 0.5 + 2.5 * c * c + 3.0 * be * be + c - 6.0 * c * be + al * al
            - 4.0 * (c - be) * (c - be) * std::f64::consts::LN_2;
        stages.push(StageValues {
            alpha_prime: next_ap,
            alpha: two_alpha / 2.0,
            beta: two_beta / 2.0,
            c: (1.0 + c * c) / 2.0,
        });
    }
    NoRecallTables { stages }
}

pub fn uniform_no_recall_closed(n: usize) -> NoRecallSummary {
    uniform_no_recall_tables(n).summary()
}
