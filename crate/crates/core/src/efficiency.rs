//! Price of anarchy, price of stability and prophet ratio.
//!
//! With full recall the benchmark for all three ratios is the expected sum of
//! the two largest values. Without recall the anarchy and stability ratios
//! compare against the best two-pick stopping value `s_n`, and the prophet
//! ratio against the top-two expectation.

use serde::Serialize;

use crate::distributions::ValueDistribution;
use crate::error::{Error, Result};
use crate::full_recall::{band, FullRecallBand, GridConfig};
use crate::no_recall::{no_recall_tables, NoRecallTables};
use crate::oracle::Variant;
use crate::prophet::max_feasible_sum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub variant: Variant,
    pub n: usize,
    pub poa: f64,
    pub pos: f64,
    pub pr: f64,
    /// Numerator of PoA and PoS.
    pub max_feasible_sum: f64,
    /// Numerator of PR.
    pub prophet_top_two: f64,
    pub worst_sum: f64,
    pub best_sum: f64,
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den <= 0.0 {
        return Err(Error::Degenerate(format!("equilibrium payoff sum {den} is not positive")));
    }
    Ok(num / den)
}

fn report(variant: Variant, n: usize, feasible: f64, top_two: f64, worst: f64, best: f64) -> Result<RatioReport> {
    Ok(RatioReport {
        variant,
        n,
        poa: ratio(feasible, worst)?,
        pos: ratio(feasible, best)?,
        pr: ratio(top_two, best)?,
        max_feasible_sum: feasible,
        prophet_top_two: top_two,
        worst_sum: worst,
        best_sum: best,
    })
}

/// Full-recall ratios for every k in 2..=n from one band.
pub fn full_recall_series(d: &ValueDistribution, band: &FullRecallBand) -> Result<Vec<RatioReport>> {
    (2..=band.n)
        .map(|k| {
            let top = d.top_two_expectation(k as u32);
            let (l, h) = band.origin(k);
            report(Variant::FullRecall, k, top, top, 2.0 * l, 2.0 * h)
        })
        .collect()
}

/// No-recall ratios for every k in 2..=n from one set of tables.
pub fn no_recall_series(d: &ValueDistribution, tables: &NoRecallTables) -> Result<Vec<RatioReport>> {
    let s = max_feasible_sum(d, tables.n())?;
    (2..=tables.n())
        .map(|k| {
            let st = tables.stage(k);
            let top = d.top_two_expectation(k as u32);
            report(Variant::NoRecall, k, s.get(k), top, 2.0 * st.alpha, 2.0 * st.beta)
        })
        .collect()
}

pub fn ratios(d: &ValueDistribution, n: usize, variant: Variant, grid: GridConfig) -> Result<RatioReport> {
    if n < 2 {
        return Err(Error::Validation(format!("ratios need n >= 2, got {n}")));
    }
    let series = match variant {
        Variant::FullRecall => full_recall_series(d, &band(d, n, grid)?)?,
        Variant::NoRecall => no_recall_series(d, &no_recall_tables(d, n)?)?,
    };
    Ok(series.into_iter().last().expect("n >= 2 gives one row"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoArrivalForms {
    pub pos2: f64,
    pub poa2: f64,
    pub two_beta2: f64,
    pub two_alpha2: f64,
}

/// No-recall ratios for two arrivals by direct integration; atoms are
/// allowed and follow the distribution module's boundary convention.
pub fn two_arrival_closed_forms(d: &ValueDistribution) -> Result<TwoArrivalForms> {
    let m = d.mean();
    if m <= 0.0 {
        return Err(Error::Degenerate("mean is zero".into()));
    }
    // Best: m plus the mass-weighted values at or above m/2.
    let two_beta2 = m + d.integrate_closed(m / 2.0, 1.0, |x| x)?;
    let two_alpha2 = 2.0 * m
        - d.partial_expectation(0.0, m / 2.0, |a| a)?
        - d.partial_expectation(m / 2.0, m, |a| a - 2.0 * m + m * m / a)?;
    Ok(TwoArrivalForms {
        pos2: 2.0 * m / two_beta2,
        poa2: 2.0 * m / two_alpha2,
        two_beta2,
        two_alpha2,
    })
}

/// Two atoms at `ε−ε²` and 1 (mass ε on the top one), mixed with weight η
/// of Uniform[0,1].
pub fn tightness_family(epsilon: f64, eta: f64) -> Result<ValueDistribution> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Validation(format!("epsilon={epsilon} outside (0, 1/2)")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Validation(format!("eta={eta} outside (0, 1)")));
    }
    ValueDistribution::mixture(eta, vec![(epsilon - epsilon * epsilon, 1.0 - epsilon), (1.0, epsilon)])
}
