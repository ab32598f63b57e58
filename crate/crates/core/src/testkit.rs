//! Shared fixtures for tests and examples: published reference values
//! encoded as data, extra continuous distributions, proptest strategies and
//! a best-response checking harness.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use crate::distributions::{DistributionSpec, PieceSpec, ValueDistribution};
use crate::error::{Error, Result};
use crate::full_recall::GridConfig;
use crate::oracle::Variant;
use crate::simulate::{best_response_gaps, spe_strategy, BestResponseConfig, Which};

/// One expected quantity, with where it comes from and how close a
/// reproduction has to be.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub quantity: String,
    pub n: usize,
    pub value: f64,
    /// Exact value as a fraction, when one is known.
    pub exact: Option<(i64, i64)>,
    pub tolerance: f64,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFixture {
    pub name: &'static str,
    pub distribution: DistributionSpec,
    pub expected: Vec<Expected>,
}

impl ReferenceFixture {
    pub fn get(&self, quantity: &str, n: usize) -> Option<&Expected> {
        self.expected.iter().find(|e| e.quantity == quantity && e.n == n)
    }
}

pub const TABLE_TOL: f64 = 1e-3;
pub const RATIO_TOL: f64 = 1e-2;

const NR_TABLE: &str = "uniform no-recall table of worst single, worst sum and best sum";
const BAND_TABLE: &str = "uniform comparison table of band values for both variants";
const RATIO_TABLE: &str = "uniform efficiency table";
const TWO_POINT: &str = "two-point closed forms";
const COUNTEREXAMPLE: &str = "two-arrival counterexample";

fn uniform_spec() -> DistributionSpec {
    DistributionSpec::Uniform
}

fn two_point_spec(lo: &str, hi: &str) -> DistributionSpec {
    DistributionSpec::from_json(&format!(
        r#"{{"type":"discrete","atoms":[{{"x":"{lo}","p":"1/2"}},{{"x":"{hi}","p":"1/2"}}]}}"#
    ))
    .expect("static spec parses")
}

fn row(q: &str, n: usize, value: f64, tolerance: f64, citation: &'static str) -> Expected {
    Expected { quantity: q.into(), n, value, exact: None, tolerance, citation }
}

fn exact(q: &str, n: usize, num: i64, den: i64, citation: &'static str) -> Expected {
    Expected { quantity: q.into(), n, value: num as f64 / den as f64, exact: Some((num, den)), tolerance: 0.0, citation }
}

/// Two-point closed forms as exact fractions over `3 * 2^(n+2)`.
pub fn two_point_closed_form(quantity: &str, n: usize) -> Option<(i64, i64)> {
    let den = 3 * (1i64 << (n + 2));
    // 2/3 - (n + k)/(3 * 2^(n+1)) with k doubled to stay integral
    let k2 = match quantity {
        "h" => 4,
        "p" => 2,
        "q" => 6,
        "r" => 5,
        _ => return None,
    };
    let num = 2 * (1i64 << (n + 2)) - 2 * (n as i64) - k2;
    Some((num, den))
}

pub fn ratio_of(e: &Expected) -> Option<BigRational> {
    e.exact.map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn fixtures() -> Vec<ReferenceFixture> {
    let mut nr = vec![
        row("alpha_prime", 1, 0.25, TABLE_TOL, NR_TABLE),
        row("alpha", 1, 0.25, TABLE_TOL, NR_TABLE),
        row("beta", 1, 0.25, TABLE_TOL, NR_TABLE),
    ];
    for (n, ap, a, b) in [(2, 0.4688, 0.4759, 0.4844), (3, 0.5747, 0.5803, 0.5881), (4, 0.6419, 0.6465, 0.6533)] {
        nr.push(row("alpha_prime", n, ap, TABLE_TOL, NR_TABLE));
        nr.push(row("alpha", n, a, TABLE_TOL, NR_TABLE));
        nr.push(row("beta", n, b, TABLE_TOL, NR_TABLE));
    }

    let mut lh = Vec::new();
    for (n, l, h, a, b) in [
        (1, 0.25, 0.25, 0.25, 0.25),
        (2, 0.5, 0.5, 0.4759, 0.4844),
        (3, 607.0 / 972.0, 0.6245, 0.5803, 0.5881),
        (4, 0.6989, 0.699, 0.6465, 0.6533),
        (5, 0.7484, 0.7486, 0.6932, 0.6991),
    ] {
        lh.push(row("l", n, l, TABLE_TOL, BAND_TABLE));
        lh.push(row("h", n, h, TABLE_TOL, BAND_TABLE));
        lh.push(row("alpha", n, a, TABLE_TOL, BAND_TABLE));
        lh.push(row("beta", n, b, TABLE_TOL, BAND_TABLE));
    }
    lh[8] = exact("l", 3, 607, 972, BAND_TABLE);
    lh[8].tolerance = TABLE_TOL;

    // Entries printed with at least five decimals get the tighter tolerance.
    let tol = |s: &str| if s.split('.').nth(1).map_or(0, str::len) >= 5 { TABLE_TOL } else { RATIO_TOL };
    let mut eff = Vec::new();
    for (n, cells) in [
        (2, ["1", "1.0507", "1", "1.0323", "1", "1.0323"]),
        (3, ["1.000823", "1.0299", "1.0008", "1.0161", "1.0008", "1.0627"]),
        (4, ["1.00157", "1.0212", "1.00143", "1.0105", "1.00143", "1.0714"]),
        (5, ["1.0021", "1.0164", "1.00187", "1.0077", "1.00187", "1.0728"]),
    ] {
        let names = ["poa_full", "poa_no", "pos_full", "pos_no", "pr_full", "pr_no"];
        for (name, cell) in names.iter().zip(cells) {
            eff.push(row(name, n, cell.parse().expect("numeric cell"), tol(cell), RATIO_TABLE));
        }
    }

    let mut tp = Vec::new();
    for n in 2..=6 {
        for q in ["h", "p", "q", "r"] {
            let (num, den) = two_point_closed_form(q, n).expect("known quantity");
            tp.push(exact(q, n, num, den, TWO_POINT));
        }
    }
    tp.push(exact("spep_asym_low", 2, 11, 24, TWO_POINT));
    tp.push(exact("spep_asym_high", 2, 13, 24, TWO_POINT));
    tp.push(exact("spep_sym", 2, 23, 48, TWO_POINT));

    vec![
        ReferenceFixture { name: "no_recall_uniform", distribution: uniform_spec(), expected: nr },
        ReferenceFixture { name: "band_uniform", distribution: uniform_spec(), expected: lh },
        ReferenceFixture { name: "efficiency_uniform", distribution: uniform_spec(), expected: eff },
        ReferenceFixture { name: "two_point_thirds", distribution: two_point_spec("1/3", "2/3"), expected: tp },
        ReferenceFixture {
            name: "counterexample_tenth_half",
            distribution: two_point_spec("1/10", "1/2"),
            expected: vec![exact("h", 2, 3, 10, COUNTEREXAMPLE), exact("beta_prime", 2, 11, 40, COUNTEREXAMPLE)],
        },
        ReferenceFixture {
            name: "counterexample_uniform",
            distribution: uniform_spec(),
            expected: vec![exact("h", 2, 1, 2, COUNTEREXAMPLE), exact("beta_prime", 2, 1, 2, COUNTEREXAMPLE)],
        },
    ]
}

pub fn fixture(name: &str) -> Option<ReferenceFixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Beta(a, b) with integer shape parameters, as one polynomial piece.
pub fn beta(a: u32, b: u32) -> Result<ValueDistribution> {
    if a == 0 || b == 0 || a + b > 40 {
        return Err(Error::Validation(format!("beta shapes ({a},{b}) must be positive with a+b <= 40")));
    }
    // x^(a-1) (1-x)^(b-1) / B(a,b), B(a,b)^-1 = (a+b-1) C(a+b-2, a-1)
    let norm = (a + b - 1) as f64 * binomial(a + b - 2, a - 1);
    let mut coeffs = vec![0.0; (a + b - 1) as usize];
    for j in 0..b {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[(a - 1 + j) as usize] = norm * sign * binomial(b - 1, j);
    }
    ValueDistribution::piecewise(vec![(0.0, 1.0, coeffs)])
}

/// Density `(k+1) x^k`.
pub fn power(k: u32) -> Result<ValueDistribution> {
    let mut coeffs = vec![0.0; k as usize + 1];
    coeffs[k as usize] = (k + 1) as f64;
    ValueDistribution::piecewise(vec![(0.0, 1.0, coeffs)])
}

/// Triangular density on [0,1] with the given mode.
pub fn triangular(mode: f64) -> Result<ValueDistribution> {
    if !(0.0..=1.0).contains(&mode) {
        return Err(Error::Validation(format!("mode {mode} outside [0,1]")));
    }
    let mut pieces = Vec::new();
    if mode > 0.0 {
        pieces.push((0.0, mode, vec![0.0, 2.0 / mode]));
    }
    if mode < 1.0 {
        let s = 2.0 / (1.0 - mode);
        pieces.push((mode, 1.0, vec![s, -s]));
    }
    ValueDistribution::piecewise(pieces)
}

/// Exponential with rate `lambda` truncated to [0,1]. The density is a
/// Taylor polynomial of degree 30, which is exact to machine precision for
/// rates up to 4.
pub fn truncated_exponential(lambda: f64) -> Result<ValueDistribution> {
    if !(lambda > 0.0 && lambda <= 4.0) {
        return Err(Error::Validation(format!("rate {lambda} outside (0, 4]")));
    }
    let mut coeffs = Vec::with_capacity(31);
    let mut term = 1.0;
    for i in 0..=30 {
        coeffs.push(term);
        term *= -lambda / (i + 1) as f64;
    }
    let mass: f64 = coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum();
    ValueDistribution::piecewise(vec![(0.0, 1.0, coeffs.into_iter().map(|c| c / mass).collect())])
}

/// The three continuous laws used next to the uniform one in ordering checks.
pub fn continuous_panel() -> Vec<(String, ValueDistribution)> {
    vec![
        ("beta(2,2)".into(), beta(2, 2).expect("valid")),
        ("triangular(0.3)".into(), triangular(0.3).expect("valid")),
        ("exponential(2) on [0,1]".into(), truncated_exponential(2.0).expect("valid")),
    ]
}

/// Piece list of a spec, handy for building JSON fixtures in tests.
pub fn piecewise_spec(d: &ValueDistribution) -> DistributionSpec {
    DistributionSpec::PiecewisePoly {
        pieces: d
            .pieces()
            .iter()
            .map(|p| PieceSpec { lo: p.lo, hi: p.hi, coeffs: p.density.0.clone() })
            .collect(),
    }
}

/// Continuous laws with polynomial densities.
pub fn arb_continuous() -> impl Strategy<Value = ValueDistribution> {
    prop_oneof![
        Just(ValueDistribution::uniform()),
        (1u32..6, 1u32..6).prop_map(|(a, b)| beta(a, b).expect("valid shapes")),
        (0u32..5).prop_map(|k| power(k).expect("valid")),
        (0.0f64..=1.0).prop_map(|m| triangular(m).expect("valid mode")),
    ]
}

/// Finite laws with up to `max_support` atoms on a grid of multiples of 1/24.
pub fn arb_discrete(max_support: usize) -> impl Strategy<Value = ValueDistribution> {
    proptest::collection::btree_map(1u32..=24, 1u32..=6, 1..=max_support).prop_map(|m| {
        let total: u32 = m.values().sum();
        let atoms = m.into_iter().map(|(x, w)| (x as f64 / 24.0, w as f64 / total as f64)).collect();
        ValueDistribution::discrete(atoms).expect("valid atoms")
    })
}

/// Mixed laws: a few atoms plus a uniform part.
pub fn arb_mixture() -> impl Strategy<Value = ValueDistribution> {
    (0.05f64..0.95, arb_discrete(3)).prop_map(|(eta, d)| {
        ValueDistribution::mixture(eta, d.atoms().to_vec()).expect("valid mixture")
    })
}

pub fn arb_any() -> impl Strategy<Value = ValueDistribution> {
    prop_oneof![arb_continuous(), arb_discrete(4), arb_mixture()]
}

/// Largest best-response gap over horizons 1..=n against the best and the
/// worst equilibrium strategy.
pub fn max_equilibrium_gap(d: &ValueDistribution, n: usize, variant: Variant, points: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for which in [Which::Best, Which::Worst] {
        let s = spe_strategy(d, n, variant, which, GridConfig::default())?;
        for g in best_response_gaps(d, n, variant, &s, BestResponseConfig { points })? {
            worst = worst.max(g.abs());
        }
    }
    Ok(worst)
}
