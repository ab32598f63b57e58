//! Subgame-perfect equilibrium payoffs and efficiency ratios for the
//! two-player competitive selection game.
//!
//! Two players watch n i.i.d. values arrive one at a time and each wants to
//! keep exactly one of them. In the *full recall* variant any value seen so
//! far and not yet taken can be claimed; in the *no recall* variant only the
//! value that just arrived can. When both players claim the same value a fair
//! coin decides who gets it.
//!
//! The crate computes the extremal equilibrium payoffs of both variants
//! ([`full_recall`], [`no_recall`]), exact equilibrium payoff sets for small
//! discrete instances ([`oracle`]), the resulting efficiency ratios
//! ([`efficiency`]) and a Monte Carlo simulator with a best-response checker
//! ([`simulate`]).
//!
//! The `examples/` directory is the best place to start:
//!
//! ```text
//! cargo run --example distributions      # building laws, JSON specs, sampling
//! cargo run --example prophet            # lone stopping values and two-pick sums
//! cargo run --example stage_games        # one-shot bid/pass games in rationals
//! cargo run --example no_recall_tables   # worst/best payoffs without recall
//! cargo run --example full_recall_band   # worst/best payoffs with recall
//! cargo run --example oracle_two_point   # exact payoff sets for two-point laws
//! cargo run --example efficiency         # anarchy, stability and prophet ratios
//! cargo run --example simulate           # Monte Carlo play and deviation checks
//! ```

pub mod cli;
pub mod distributions;
pub mod efficiency;
pub mod error;
pub mod full_recall;
pub mod no_recall;
pub mod numerics;
pub mod oracle;
pub mod prophet;
pub mod simulate;
pub mod stage_games;
pub mod testkit;

pub use distributions::{DistributionSpec, ValueDistribution};
pub use error::{Error, Result};
