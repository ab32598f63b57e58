//! Monte Carlo play, equilibrium strategies built from the recursions, and a
//! best-response dynamic program that certifies them.
//!
//! Play uses the "first selection ends the game" reduction: as soon as one
//! player takes a value, the other is alone and receives the single-agent
//! value of the rest of the game analytically (full recall: the expected best
//! of the remaining arrivals and the best leftover value; no recall: `c_k`).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ValueDistribution;
use crate::error::{Error, Result};
use crate::full_recall::{band, FullRecallBand, GridConfig, TriangleGrid};
use crate::no_recall::{no_recall_tables, per_value_selectors, NoRecallTables, StageValues};
use crate::oracle::Variant;
use crate::prophet::{prophet_values, ProphetSequence};

/// What a player sees when deciding at one stage.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub variant: Variant,
    /// 1-based index of the arrival just observed.
    pub stage: usize,
    pub horizon: usize,
    /// Arrivals still to come after this one.
    pub remaining: usize,
    /// Every value observed so far, the current one last.
    pub samples: &'a [f64],
    /// Full recall: best available value. No recall: the current value.
    pub best: f64,
    /// Full recall: second best available value (0 if none). No recall: 0.
    pub second: f64,
    pub player: usize,
}

/// A behaviour strategy: the probability of bidding for `best`. Claiming a
/// value other than the best available one is dominated and not modelled.
pub trait Strategy: Send + Sync {
    fn bid_probability(&self, obs: &Observation) -> f64;

    /// Mode structure of a no-recall equilibrium strategy, for the
    /// best-response solver.
    fn no_recall_spe(&self) -> Option<&NoRecallSpe> {
        None
    }
}

pub struct AlwaysBid;
pub struct NeverBid;

impl Strategy for AlwaysBid {
    fn bid_probability(&self, _: &Observation) -> f64 {
        1.0
    }
}

impl Strategy for NeverBid {
    fn bid_probability(&self, _: &Observation) -> f64 {
        0.0
    }
}

/// Bid iff the best available value is at least `thresholds[remaining]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStrategy {
    pub thresholds: Vec<f64>,
}

impl Strategy for ThresholdStrategy {
    fn bid_probability(&self, obs: &Observation) -> f64 {
        match self.thresholds.get(obs.remaining) {
            Some(&t) if obs.best >= t => 1.0,
            Some(_) => 0.0,
            None => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Best,
    Worst,
}

const LONE_TABLE: usize = 1 << 14;

/// Symmetric Markov equilibrium of the full-recall game: in the worst one a
/// player bids iff `a > c_k(b)`, in the best one iff `a > max(c_k(b), d⁺_k(a,b))`.
pub struct FullRecallSpe {
    band: Arc<FullRecallBand>,
    which: Which,
    lone: Vec<Vec<f64>>,
}

impl FullRecallSpe {
    pub fn new(band: Arc<FullRecallBand>, which: Which) -> Self {
        let lone = (0..=band.n)
            .map(|k| (0..=LONE_TABLE).map(|i| band.lone_value(k, i as f64 / LONE_TABLE as f64)).collect())
            .collect();
        FullRecallSpe { band, which, lone }
    }

    fn lone_value(&self, k: usize, b: f64) -> f64 {
        let t = &self.lone[k];
        let s = b.clamp(0.0, 1.0) * LONE_TABLE as f64;
        let i = (s.floor() as usize).min(LONE_TABLE - 1);
        let w = s - i as f64;
        (1.0 - w) * t[i] + w * t[i + 1]
    }

    pub fn bids(&self, k: usize, a: f64, b: f64) -> bool {
        if k == 0 {
            return true;
        }
        let c = self.lone_value(k, b);
        match self.which {
            Which::Worst => a > c,
            Which::Best => a > c && a > self.band.continuation(k, a, b).1,
        }
    }

    /// Smallest best-available value at which the strategy bids, given
    /// `remaining` arrivals to come and second value `b`.
    pub fn threshold(&self, remaining: usize, b: f64) -> f64 {
        if self.bids(remaining, b, b) {
            return b;
        }
        let (mut lo, mut hi) = (b, 1.0);
        if !self.bids(remaining, hi, b) {
            return 1.0;
        }
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if self.bids(remaining, m, b) {
                hi = m;
            } else {
                lo = m;
            }
        }
        hi
    }
}

impl Strategy for FullRecallSpe {
    fn bid_probability(&self, obs: &Observation) -> f64 {
        if self.bids(obs.remaining, obs.best, obs.second) {
            1.0
        } else {
            0.0
        }
    }
}

/// Which equilibrium the players are following at the start of a (sub)game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Best,
    Worst,
    /// Hold the given player to the worst single payoff.
    Punish(usize),
    /// Start like `Worst` on arrivals below the cut-off and like `Best` above
    /// it; the cut-off is tuned so each player expects a given target.
    Mix(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prescription {
    pub bids: [f64; 2],
    /// Mode of the continuation game if both pass.
    pub next: Mode,
}

/// `W(u)` on a uniform grid of cut-offs for one continuation length: the
/// equilibrium payoff sum when arrivals below u start the worst equilibrium
/// and the rest start the best one.
#[derive(Debug, Clone)]
struct MixTable {
    sums: Vec<f64>,
}

impl MixTable {
    fn build(d: &ValueDistribution, s: &StageValues, points: usize) -> Result<Self> {
        let h = 1.0 / (points - 1) as f64;
        let mut sums = vec![0.0; points];
        let total_best: f64 = {
            let mut t = 0.0;
            for i in 0..points - 1 {
                t += d.partial_expectation(i as f64 * h, (i + 1) as f64 * h, |a| per_value_selectors(s, a).1)?;
            }
            t
        };
        sums[0] = total_best;
        for i in 0..points - 1 {
            let gap = d.partial_expectation(i as f64 * h, (i + 1) as f64 * h, |a| {
                let (_, best, worst) = per_value_selectors(s, a);
                best - worst
            })?;
            sums[i + 1] = sums[i] - gap;
        }
        Ok(MixTable { sums })
    }

    /// Cut-off u with W(u) = target (W is nonincreasing).
    fn cutoff(&self, target: f64) -> f64 {
        let n = self.sums.len();
        let h = 1.0 / (n - 1) as f64;
        if target >= self.sums[0] {
            return 0.0;
        }
        if target <= self.sums[n - 1] {
            return 1.0;
        }
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.sums[mid] >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (wl, wh) = (self.sums[lo], self.sums[hi]);
        let frac = if wl > wh { (wl - target) / (wl - wh) } else { 0.0 };
        (lo as f64 + frac) * h
    }
}

/// Designated taker of a value when the equilibrium calls for exactly one
/// bidder. Both players compute it from public information; over an atomless
/// law it behaves like a fair public coin.
pub fn designated_taker(a: f64) -> usize {
    let mut z = a.to_bits().wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ((z ^ (z >> 31)) & 1) as usize
}

/// No-recall equilibrium strategy following the case analysis behind the
/// worst/best payoff recursions. History dependent through a mode automaton.
pub struct NoRecallSpe {
    tables: NoRecallTables,
    mix: Vec<Option<MixTable>>,
    which: Which,
}

impl NoRecallSpe {
    pub fn new(d: &ValueDistribution, n: usize, which: Which) -> Result<Self> {
        let tables = no_recall_tables(d, n)?;
        let mut mix = vec![None];
        for k in 1..=n {
            mix.push(Some(MixTable::build(d, &tables.stage(k - 1), 2001)?));
        }
        Ok(NoRecallSpe { tables, mix, which })
    }

    pub fn tables(&self) -> &NoRecallTables {
        &self.tables
    }

    pub fn start_mode(&self) -> Mode {
        match self.which {
            Which::Best => Mode::Best,
            Which::Worst => Mode::Worst,
        }
    }

    /// Play at a stage with `k` arrivals to come, current value `a`.
    pub fn prescribe(&self, mode: Mode, k: usize, a: f64, taker: usize) -> Prescription {
        let s = self.tables.stage(k);
        let both = Prescription { bids: [1.0, 1.0], next: mode };
        let pass = |next| Prescription { bids: [0.0, 0.0], next };
        let take = |j: usize| {
            let mut bids = [0.0, 0.0];
            bids[j] = 1.0;
            Prescription { bids, next: Mode::Punish(j) }
        };
        if k == 0 || a >= s.c {
            return both;
        }
        match mode {
            Mode::Mix(u) => {
                let m = if a < u { Mode::Worst } else { Mode::Best };
                self.prescribe(m, k, a, taker)
            }
            Mode::Punish(j) => {
                if a < s.alpha_prime {
                    pass(mode)
                } else {
                    take(j)
                }
            }
            Mode::Best => {
                if a >= s.alpha_prime && a + s.c >= 2.0 * s.beta {
                    take(taker)
                } else {
                    pass(Mode::Best)
                }
            }
            Mode::Worst => {
                if a < s.alpha_prime {
                    pass(Mode::Worst)
                } else if a < s.alpha {
                    if a + s.c <= 2.0 * s.alpha {
                        take(taker)
                    } else {
                        pass(Mode::Worst)
                    }
                } else if a < s.beta {
                    let table = self.mix[k].as_ref().expect("mix tables for k >= 1");
                    pass(Mode::Mix(table.cutoff(2.0 * a)))
                } else {
                    let p = 2.0 * (a - s.beta) / (s.c + a - 2.0 * s.beta);
                    Prescription { bids: [p, p], next: Mode::Best }
                }
            }
        }
    }

    fn mode_after(&self, horizon: usize, history: &[f64]) -> Mode {
        let mut mode = self.start_mode();
        for (t, &a) in history.iter().enumerate() {
            let k = horizon - (t + 1);
            mode = self.prescribe(mode, k, a, designated_taker(a)).next;
        }
        mode
    }
}

impl Strategy for NoRecallSpe {
    fn bid_probability(&self, obs: &Observation) -> f64 {
        let (past, _) = obs.samples.split_at(obs.samples.len() - 1);
        let mode = self.mode_after(obs.horizon, past);
        self.prescribe(mode, obs.remaining, obs.best, designated_taker(obs.best)).bids[obs.player]
    }

    fn no_recall_spe(&self) -> Option<&NoRecallSpe> {
        Some(self)
    }
}

pub enum SpeStrategy {
    FullRecall(FullRecallSpe),
    NoRecall(NoRecallSpe),
}

impl Strategy for SpeStrategy {
    fn bid_probability(&self, obs: &Observation) -> f64 {
        match self {
            SpeStrategy::FullRecall(s) => s.bid_probability(obs),
            SpeStrategy::NoRecall(s) => s.bid_probability(obs),
        }
    }

    fn no_recall_spe(&self) -> Option<&NoRecallSpe> {
        match self {
            SpeStrategy::FullRecall(_) => None,
            SpeStrategy::NoRecall(s) => Some(s),
        }
    }
}

pub fn spe_strategy(d: &ValueDistribution, n: usize, variant: Variant, which: Which, grid: GridConfig) -> Result<SpeStrategy> {
    match variant {
        Variant::FullRecall => {
            let b = Arc::new(band(d, n, grid)?);
            Ok(SpeStrategy::FullRecall(FullRecallSpe::new(b, which)))
        }
        Variant::NoRecall => Ok(SpeStrategy::NoRecall(NoRecallSpe::new(d, n, which)?)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub runs: usize,
    pub seed: u64,
    pub mean: (f64, f64),
    pub std_err: (f64, f64),
    /// Mean and standard error of the per-run average payoff `(x + y) / 2`.
    pub mean_average: f64,
    pub std_err_average: f64,
}

struct LoneValues<'a> {
    d: &'a ValueDistribution,
    prophet: ProphetSequence,
    variant: Variant,
}

impl LoneValues<'_> {
    fn get(&self, k: usize, b: f64) -> f64 {
        match self.variant {
            Variant::FullRecall => self.d.expect_order_max_with(k as u32, b),
            Variant::NoRecall => self.prophet.get(k),
        }
    }
}

fn play_once<R: Rng>(
    d: &ValueDistribution,
    n: usize,
    variant: Variant,
    strategies: [&dyn Strategy; 2],
    lone: &LoneValues,
    rng: &mut R,
    samples: &mut Vec<f64>,
) -> (f64, f64) {
    samples.clear();
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for t in 1..=n {
        let x = d.sample(rng);
        samples.push(x);
        let k = n - t;
        match variant {
            Variant::FullRecall => {
                if x > a {
                    b = a;
                    a = x;
                } else if x > b {
                    b = x;
                }
            }
            Variant::NoRecall => {
                a = x;
                b = 0.0;
            }
        }
        let mut bids = [false; 2];
        for (p, s) in strategies.iter().enumerate() {
            let prob = if k == 0 {
                1.0
            } else {
                s.bid_probability(&Observation {
                    variant,
                    stage: t,
                    horizon: n,
                    remaining: k,
                    samples,
                    best: a,
                    second: b,
                    player: p,
                })
            };
            bids[p] = prob >= 1.0 || (prob > 0.0 && rng.gen::<f64>() < prob);
        }
        match bids {
            [true, true] => {
                let alone = lone.get(k, b);
                return if rng.gen::<bool>() { (a, alone) } else { (alone, a) };
            }
            [true, false] => return (a, lone.get(k, b)),
            [false, true] => return (lone.get(k, b), a),
            [false, false] => {}
        }
    }
    unreachable!("the last stage always ends the game")
}

const CHUNK: usize = 4096;

/// Empirical payoffs of `(s1, s2)` over `runs` independent plays. Run i uses
/// the ChaCha stream i of `seed`, so results do not depend on scheduling.
pub fn play(
    d: &ValueDistribution,
    n: usize,
    variant: Variant,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    runs: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if runs == 0 || n == 0 {
        return Err(Error::Validation("need runs >= 1 and n >= 1".into()));
    }
    let lone = LoneValues { d, prophet: prophet_values(d, n), variant };
    let chunks: Vec<[f64; 6]> = (0..runs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0; 6];
            let mut samples = Vec::with_capacity(n);
            for i in c * CHUNK..((c + 1) * CHUNK).min(runs) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let (x, y) = play_once(d, n, variant, [s1, s2], &lone, &mut rng, &mut samples);
                let m = 0.5 * (x + y);
                acc[0] += x;
                acc[1] += x * x;
                acc[2] += y;
                acc[3] += y * y;
                acc[4] += m;
                acc[5] += m * m;
            }
            acc
        })
        .collect();
    let mut tot = [0.0; 6];
    for c in chunks {
        for (t, v) in tot.iter_mut().zip(c) {
            *t += v;
        }
    }
    let r = runs as f64;
    let stats = |s: f64, s2: f64| {
        let mean = s / r;
        let var = if runs > 1 { ((s2 - r * mean * mean) / (r - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / r).sqrt())
    };
    let (m1, e1) = stats(tot[0], tot[1]);
    let (m2, e2) = stats(tot[2], tot[3]);
    let (ma, ea) = stats(tot[4], tot[5]);
    Ok(SimulationReport { runs, seed, mean: (m1, m2), std_err: (e1, e2), mean_average: ma, std_err_average: ea })
}

/// Settings of the best-response solver.
#[derive(Debug, Clone, Copy)]
pub struct BestResponseConfig {
    /// Points per axis of the discretised state space.
    pub points: usize,
}

impl Default for BestResponseConfig {
    fn default() -> Self {
        BestResponseConfig { points: 2001 }
    }
}

/// Player 1's best-response value minus the value of playing the fixed
/// strategy too, against an opponent fixed to `fixed`, for every horizon
/// 1..=n (entry `n-1` is the horizon-n game).
pub fn best_response_gaps(
    d: &ValueDistribution,
    n: usize,
    variant: Variant,
    fixed: &dyn Strategy,
    cfg: BestResponseConfig,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    if cfg.points < 3 || cfg.points > 4001 {
        return Err(Error::Resource(format!("best-response grid of {} points not supported", cfg.points)));
    }
    match (variant, fixed.no_recall_spe()) {
        (Variant::FullRecall, _) => full_recall_gaps(d, n, fixed, cfg),
        (Variant::NoRecall, Some(spe)) => no_recall_mode_gaps(d, n, spe, cfg),
        (Variant::NoRecall, None) => no_recall_markov_gaps(d, n, fixed, cfg),
    }
}

pub fn best_response_gap(
    d: &ValueDistribution,
    n: usize,
    variant: Variant,
    fixed: &dyn Strategy,
    cfg: BestResponseConfig,
) -> Result<f64> {
    Ok(*best_response_gaps(d, n, variant, fixed, cfg)?.last().expect("n >= 1"))
}

/// Full recall: the fixed strategy is queried as a Markov rule of
/// `(remaining, best, second)` at every grid node.
fn full_recall_gaps(d: &ValueDistribution, n: usize, fixed: &dyn Strategy, cfg: BestResponseConfig) -> Result<Vec<f64>> {
    let grid = TriangleGrid::new(d, GridConfig::new(cfg.points)?);
    let g = cfg.points;
    let size = g * (g + 1) / 2;
    // Remaining 0: both take, the coin splits the top two.
    let mut br: Vec<f64> = Vec::with_capacity(size);
    for i in 0..g {
        for j in 0..=i {
            br.push(0.5 * (grid.x(i) + grid.x(j)));
        }
    }
    let mut pol = br.clone();
    let mut gaps = vec![0.0];
    for k in 1..n {
        let br_cont = grid.continuation_table(&br);
        let pol_cont = grid.continuation_table(&pol);
        let c: Vec<f64> = (0..g).map(|j| d.expect_order_max_with(k as u32, grid.x(j))).collect();
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..g)
            .into_par_iter()
            .map(|i| {
                let a = grid.x(i);
                let mut rb = Vec::with_capacity(i + 1);
                let mut rp = Vec::with_capacity(i + 1);
                let samples = [a];
                for j in 0..=i {
                    let b = grid.x(j);
                    let idx = i * (i + 1) / 2 + j;
                    let mut obs = Observation {
                        variant: Variant::FullRecall,
                        stage: n - k,
                        horizon: n,
                        remaining: k,
                        samples: &samples,
                        best: a,
                        second: b,
                        player: 1,
                    };
                    let q = fixed.bid_probability(&obs);
                    obs.player = 0;
                    let p = fixed.bid_probability(&obs);
                    let ck = c[j];
                    let bid = q * 0.5 * (a + ck) + (1.0 - q) * a;
                    let pass_br = q * ck + (1.0 - q) * br_cont[idx];
                    let pass_pol = q * ck + (1.0 - q) * pol_cont[idx];
                    rb.push(bid.max(pass_br));
                    rp.push(p * bid + (1.0 - p) * pass_pol);
                }
                (rb, rp)
            })
            .collect();
        br.clear();
        pol.clear();
        for (rb, rp) in rows {
            br.extend(rb);
            pol.extend(rp);
        }
        gaps.push(grid.continuation_table(&br)[0] - grid.continuation_table(&pol)[0]);
    }
    Ok(gaps)
}

/// Payoff of player 1 at one stage given both bid probabilities.
fn stage_payoff(p: f64, q: f64, a: f64, c: f64, pass_value: f64) -> (f64, f64) {
    let bid = q * 0.5 * (a + c) + (1.0 - q) * a;
    let pass = q * c + (1.0 - q) * pass_value;
    (bid.max(pass), p * bid + (1.0 - p) * pass)
}

/// Values of player 1 at the start of a k-arrival game, per mode.
#[derive(Debug, Clone)]
struct ModeValues {
    best: f64,
    worst: f64,
    punish: [f64; 2],
    /// Cumulative ∫_0^u of the worst-mode and best-mode stage values.
    cum_worst: Vec<f64>,
    cum_best: Vec<f64>,
}

impl ModeValues {
    fn zero(points: usize) -> Self {
        ModeValues { best: 0.0, worst: 0.0, punish: [0.0; 2], cum_worst: vec![0.0; points], cum_best: vec![0.0; points] }
    }

    fn value(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Best => self.best,
            Mode::Worst => self.worst,
            Mode::Punish(j) => self.punish[j],
            Mode::Mix(u) => {
                let n = self.cum_worst.len();
                let s = u.clamp(0.0, 1.0) * (n - 1) as f64;
                let i = (s.floor() as usize).min(n - 2);
                let w = s - i as f64;
                let lerp = |v: &[f64]| (1.0 - w) * v[i] + w * v[i + 1];
                lerp(&self.cum_worst) + self.best - lerp(&self.cum_best)
            }
        }
    }
}

fn no_recall_mode_gaps(d: &ValueDistribution, n: usize, spe: &NoRecallSpe, cfg: BestResponseConfig) -> Result<Vec<f64>> {
    if spe.tables.n() < n {
        return Err(Error::Validation("strategy tables shorter than the horizon".into()));
    }
    let m = cfg.points;
    let h = 1.0 / (m - 1) as f64;
    // values[k] for the k-arrival game, best response (0) and policy (1)
    let mut prev = [ModeValues::zero(m), ModeValues::zero(m)];
    let mut gaps = Vec::with_capacity(n);
    for k in 1..=n {
        let c = spe.tables.stage(k - 1).c;
        // player 1 is index 0; the designated taker is a fair public coin
        let integrand = |mode: Mode, a: f64, which: usize| -> f64 {
            let mut v = 0.0;
            for taker in 0..2 {
                let pr = spe.prescribe(mode, k - 1, a, taker);
                let (p, q) = if k == 1 { (1.0, 1.0) } else { (pr.bids[0], pr.bids[1]) };
                let cont = prev[which].value(pr.next);
                let (b, pol) = stage_payoff(p, q, a, c, cont);
                v += 0.5 * if which == 0 { b } else { pol };
            }
            v
        };
        let mut next = [ModeValues::zero(m), ModeValues::zero(m)];
        for (which, out) in next.iter_mut().enumerate() {
            for i in 0..m - 1 {
                let (lo, hi) = (i as f64 * h, (i + 1) as f64 * h);
                out.cum_worst[i + 1] = out.cum_worst[i] + d.partial_expectation(lo, hi, |a| integrand(Mode::Worst, a, which))?;
                out.cum_best[i + 1] = out.cum_best[i] + d.partial_expectation(lo, hi, |a| integrand(Mode::Best, a, which))?;
            }
            out.worst = out.cum_worst[m - 1];
            out.best = out.cum_best[m - 1];
            for j in 0..2 {
                out.punish[j] = d.partial_expectation(0.0, 1.0, |a| integrand(Mode::Punish(j), a, which))?;
            }
        }
        let start = spe.start_mode();
        gaps.push(next[0].value(start) - next[1].value(start));
        prev = next;
    }
    Ok(gaps)
}

/// No recall against a Markov rule of `(remaining, current value)`.
fn no_recall_markov_gaps(d: &ValueDistribution, n: usize, fixed: &dyn Strategy, cfg: BestResponseConfig) -> Result<Vec<f64>> {
    let c = prophet_values(d, n);
    let h = 1.0 / (cfg.points - 1) as f64;
    let (mut br, mut pol) = (0.0, 0.0);
    let mut gaps = Vec::with_capacity(n);
    for k in 1..=n {
        let ck = c.get(k - 1);
        let query = |a: f64, player: usize| {
            if k == 1 {
                return 1.0;
            }
            let samples = [a];
            fixed.bid_probability(&Observation {
                variant: Variant::NoRecall,
                stage: 1,
                horizon: k,
                remaining: k - 1,
                samples: &samples,
                best: a,
                second: 0.0,
                player,
            })
        };
        let (mut nb, mut np) = (0.0, 0.0);
        for i in 0..cfg.points - 1 {
            let (lo, hi) = (i as f64 * h, (i + 1) as f64 * h);
            nb += d.partial_expectation(lo, hi, |a| stage_payoff(query(a, 0), query(a, 1), a, ck, br).0)?;
            np += d.partial_expectation(lo, hi, |a| stage_payoff(query(a, 0), query(a, 1), a, ck, pol).1)?;
        }
        br = nb;
        pol = np;
        gaps.push(br - pol);
    }
    Ok(gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn designation_is_balanced() {
        let ones: usize = (0..100_000).map(|i| designated_taker(i as f64 / 100_000.0)).sum();
        assert!((ones as f64 / 100_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn never_bidding_opponent_leaves_the_lone_value() {
        let u = ValueDistribution::uniform();
        let spe = NoRecallSpe::new(&u, 3, Which::Best).unwrap();
        let r = play(&u, 3, Variant::NoRecall, &NeverBid, &spe, 20_000, 5).unwrap();
        // player 2 bids at some point or wins the final coin; player 1 only gets a share at the end
        assert!(r.mean.1 > r.mean.0);
    }

    #[test]
    fn one_arrival_is_split() {
        let u = ValueDistribution::uniform();
        let r = play(&u, 1, Variant::NoRecall, &AlwaysBid, &AlwaysBid, 200_000, 11).unwrap();
        assert!((r.mean_average - 0.25).abs() < 3.0 * r.std_err_average);
        assert!((r.mean.0 - 0.25).abs() < 3.0 * r.std_err.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let u = ValueDistribution::uniform();
        let a = play(&u, 3, Variant::FullRecall, &AlwaysBid, &NeverBid, 10_000, 3).unwrap();
        let b = play(&u, 3, Variant::FullRecall, &AlwaysBid, &NeverBid, 10_000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_stage_gap_is_zero() {
        let u = ValueDistribution::uniform();
        let g = best_response_gap(&u, 1, Variant::NoRecall, &NeverBid, BestResponseConfig { points: 101 }).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn full_recall_thresholds_at_the_first_of_three() {
        let u = ValueDistribution::uniform();
        let b = Arc::new(band(&u, 3, GridConfig::new(401).unwrap()).unwrap());
        let worst = FullRecallSpe::new(b.clone(), Which::Worst);
        let best = FullRecallSpe::new(b, Which::Best);
        assert!((worst.threshold(2, 0.0) - 2.0 / 3.0).abs() < 1e-6);
        assert!((best.threshold(2, 0.0) - crate::full_recall::a_star()).abs() < 2e-3);
    }

    #[test]
    fn simulated_no_recall_means_match_the_recursion() {
        let u = ValueDistribution::uniform();
        let s = crate::no_recall::uniform_no_recall_closed(3);
        for (which, target) in [(Which::Best, s.beta), (Which::Worst, s.alpha)] {
            let spe = NoRecallSpe::new(&u, 3, which).unwrap();
            let r = play(&u, 3, Variant::NoRecall, &spe, &spe, 100_000, 17).unwrap();
            assert!((r.mean_average - target).abs() < 4.0 * r.std_err_average, "{which:?}: {} vs {target}", r.mean_average);
        }
    }

    #[test]
    fn equilibria_leave_no_profitable_deviation() {
        let u = ValueDistribution::uniform();
        let cfg = BestResponseConfig { points: 401 };
        for which in [Which::Best, Which::Worst] {
            let nr = NoRecallSpe::new(&u, 3, which).unwrap();
            for g in best_response_gaps(&u, 3, Variant::NoRecall, &nr, cfg).unwrap() {
                assert!(g.abs() < 1e-3, "no recall {which:?}: {g}");
            }
            let fr = spe_strategy(&u, 3, Variant::FullRecall, which, GridConfig::new(401).unwrap()).unwrap();
            for g in best_response_gaps(&u, 3, Variant::FullRecall, &fr, cfg).unwrap() {
                assert!(g.abs() < 2e-3, "full recall {which:?}: {g}");
            }
        }
        let gap = best_response_gap(&u, 3, Variant::NoRecall, &AlwaysBid, cfg).unwrap();
        assert!(gap > 1e-3);
    }

    #[test]
    fn two_point_full_recall_play() {
        let d = ValueDistribution::discrete(vec![(0.25, 0.5), (0.75, 0.5)]).unwrap();
        let spe = spe_strategy(&d, 4, Variant::FullRecall, Which::Best, GridConfig::default()).unwrap();
        let b = band(&d, 4, GridConfig::default()).unwrap();
        let r = play(&d, 4, Variant::FullRecall, &spe, &spe, 100_000, 2).unwrap();
        assert!((r.mean_average - b.h).abs() < 4.0 * r.std_err_average);
    }
}
