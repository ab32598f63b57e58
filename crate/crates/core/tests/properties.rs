//! Randomised invariants of the building blocks and the recursions.

use compsel::distributions::rational_to_f64;
use compsel::efficiency::ratios;
use compsel::full_recall::{band, lh_values, uniform_closed_forms, GridConfig};
use compsel::no_recall::{mixed_sum, no_recall_summary, no_recall_tables, uniform_no_recall_tables};
use compsel::oracle::{oracle_spep_for, Variant};
use compsel::stage_games::{psi_extremes, selector_h, selector_l, solve_nr_stage, BidPassMatrix};
use compsel::testkit::{arb_any, arb_continuous, arb_discrete, two_point_closed_form};
use compsel::ValueDistribution;
use proptest::prelude::*;

fn cheap() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn cdf_is_monotone(d in arb_any(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(d.cdf(lo) <= d.cdf(hi) + 1e-12);
        prop_assert!(d.cdf_left(hi) <= d.cdf(hi) + 1e-12);
        prop_assert!((d.cdf(1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lone_value_is_one_lipschitz(d in arb_any(), k in 1u32..6, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let gap = (d.expect_order_max_with(k, x) - d.expect_order_max_with(k, y)).abs();
        prop_assert!(gap <= (x - y).abs() + 1e-9);
        prop_assert!(d.expect_order_max_with(k, x) >= x - 1e-12);
    }

    #[test]
    fn partial_expectations_add_up(d in arb_any(), cuts in proptest::collection::vec(0.0f64..1.0, 3)) {
        let mut c = cuts.clone();
        c.sort_by(f64::total_cmp);
        let g = |x: f64| x * x + 0.5;
        let whole = d.partial_expectation(c[0], c[2], g).unwrap();
        let parts = d.partial_expectation(c[0], c[1], g).unwrap() + d.partial_expectation(c[1], c[2], g).unwrap();
        prop_assert!((whole - parts).abs() < 1e-8);
    }

    #[test]
    fn full_recall_stage_is_monotone_in_the_continuation(a in 0.0f64..1.0, c in 0.0f64..1.0, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        // the solver rejects c >= a with d < a, which the recursion never produces
        prop_assume!(a > c || lo >= a);
        let (w1, b1) = psi_extremes(&a, &c, &lo).unwrap();
        let (w2, b2) = psi_extremes(&a, &c, &hi).unwrap();
        prop_assert!(w1 <= w2 + 1e-12 && b1 <= b2 + 1e-12);
        prop_assert!(w1 <= b1 + 1e-12);
        prop_assert!(selector_l(a, c, lo) <= selector_h(a, c, lo) + 1e-12);
    }

    #[test]
    fn mixed_no_recall_sum_stays_below_the_sure_sum(beta in 0.0f64..0.5, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        // β <= a < c as in the recursion
        let (a, c) = if x <= y { (x, y) } else { (y, x) };
        prop_assume!(a >= beta && c > a);
        let m = mixed_sum(a, c, beta);
        prop_assert!(m <= a + c + 1e-12);
        prop_assert!(m >= 2.0 * beta - 1e-12);
    }

    #[test]
    fn every_no_recall_stage_equilibrium_is_one(a in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0, e in 0.0f64..1.0) {
        prop_assume!(d <= c && e <= c);
        let out = solve_nr_stage(&a, &c, &d, &e).unwrap();
        let m = BidPassMatrix { a, c, d, e };
        for eq in &out.equilibria {
            prop_assert!(m.is_equilibrium(&eq.bid.0, &eq.bid.1), "{:?}", eq);
        }
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn no_recall_values_are_ordered(d in arb_continuous(), n in 1usize..8) {
        let s = no_recall_summary(&d, n).unwrap();
        let c = s.prophet.get(n);
        prop_assert!(s.alpha_prime <= s.alpha + 1e-12);
        prop_assert!(s.alpha <= s.beta + 1e-12);
        prop_assert!(s.beta <= c + 1e-12);
    }

    #[test]
    fn full_recall_beats_no_recall(d in arb_continuous(), n in 1usize..4) {
        let b = band(&d, n, GridConfig::new(201).unwrap()).unwrap();
        let s = no_recall_summary(&d, n).unwrap();
        prop_assert!(b.l >= s.beta - 1e-4, "l={} beta={}", b.l, s.beta);
        prop_assert!(b.l <= b.h + 1e-12);
    }

    #[test]
    fn stability_is_the_smallest_ratio(d in arb_continuous(), n in 2usize..8) {
        let r = ratios(&d, n, Variant::NoRecall, GridConfig::default()).unwrap();
        prop_assert!(r.pos <= r.poa + 1e-12);
        prop_assert!(r.pos <= r.pr + 1e-9);
        prop_assert!(r.pos >= 1.0 - 1e-9);
        if n == 2 {
            prop_assert!((r.pos - r.pr).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_sets_have_the_expected_shape(d in arb_discrete(3), n in 1usize..4) {
        let nr = oracle_spep_for(&d, n, Variant::NoRecall).unwrap();
        for (x, y) in &nr.payoffs {
            prop_assert!(nr.payoffs.contains(&(y.clone(), x.clone())));
        }
        let fr = oracle_spep_for(&d, n, Variant::FullRecall).unwrap();
        for (x, y) in &fr.payoffs {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn exact_and_grid_agree_on_finite_laws(d in arb_discrete(3), n in 1usize..5) {
        let exact = band(&d, n, GridConfig::default()).unwrap();
        // the set is diagonal and sorted, so its ends are the band
        let set = oracle_spep_for(&d, n, Variant::FullRecall).unwrap();
        let lo = rational_to_f64(&set.payoffs[0].0);
        let hi = rational_to_f64(&set.payoffs[set.payoffs.len() - 1].0);
        prop_assert!((exact.l - lo).abs() < 1e-12, "l {} vs {}", exact.l, lo);
        prop_assert!((exact.h - hi).abs() < 1e-12, "h {} vs {}", exact.h, hi);
    }

    #[test]
    fn worst_band_is_monotone_in_the_second_value(a in 0.05f64..1.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let u = ValueDistribution::uniform();
        let (b1, b2) = if s <= t { (s * a, t * a) } else { (t * a, s * a) };
        for n in 1..=3 {
            let (l1, h1) = uniform_closed_forms(n, a, b1).unwrap();
            let (l2, h2) = uniform_closed_forms(n, a, b2).unwrap();
            prop_assert!(l1 <= l2 + 1e-12, "n={} a={} b1={} b2={}", n, a, b1, b2);
            prop_assert!(h1 <= h2 + 1e-12);
        }
        let (g1, _) = lh_values(&u, 2, a, b1, GridConfig::new(201).unwrap()).unwrap();
        let (g2, _) = lh_values(&u, 2, a, b2, GridConfig::new(201).unwrap()).unwrap();
        prop_assert!(g1 <= g2 + 1e-6);
    }
}

#[test]
fn uniform_lone_continuation_dominates_the_best_pair() {
    let t = uniform_no_recall_tables(20);
    for k in 1..=20 {
        let s = t.stage(k);
        assert!(s.alpha_prime + s.c >= 2.0 * s.beta - 1e-12, "k={k}");
    }
}

#[test]
fn two_point_closed_forms_are_ordered() {
    for n in 2..=6 {
        let v = |q| {
            let (a, b) = two_point_closed_form(q, n).unwrap();
            a as f64 / b as f64
        };
        assert!(v("p") > v("h") && v("h") > v("r") && v("r") > v("q"));
        assert!((v("p") + v("q") - 2.0 * v("h")).abs() < 1e-15);
    }
}

#[test]
fn full_recall_stage_slack_is_nonnegative() {
    // at every sampled state the best band is at least the lone value of
    // the contested top value, and at most the best of the two available
    let u = ValueDistribution::uniform();
    let b = band(&u, 3, GridConfig::new(401).unwrap()).unwrap();
    for k in 1..=3 {
        for i in 0..40 {
            for j in 0..=i {
                let (a, bb) = (i as f64 / 39.0, j as f64 / 39.0);
                let (l, h) = b.lh_at(k, a, bb);
                assert!(l >= (a + bb) / 2.0 - 1e-9, "k={k} a={a} b={bb}");
                assert!(h <= b.lone_value(k, a) + 1e-9);
            }
        }
    }
}

#[test]
fn grid_matches_closed_forms_on_a_triangle_sample() {
    let u = ValueDistribution::uniform();
    let b = band(&u, 3, GridConfig::new(2001).unwrap()).unwrap();
    let g = b.grid().unwrap();
    for k in 1..=3 {
        for si in 0..50 {
            for sj in 0..=si {
                let (i, j) = (40 * si + 20, 40 * sj + 3);
                let (l, h) = b.node_values(k, i, j).unwrap();
                let (cl, ch) = uniform_closed_forms(k, g.x(i), g.x(j)).unwrap();
                assert!((l - cl).abs() < 1e-4 && (h - ch).abs() < 1e-4, "k={k} at ({}, {})", g.x(i), g.x(j));
            }
        }
    }
}

#[test]
fn tables_extend_consistently() {
    let u = ValueDistribution::uniform();
    let long = no_recall_tables(&u, 8).unwrap();
    let short = no_recall_tables(&u, 4).unwrap();
    for k in 0..=4 {
        assert_eq!(long.stage(k), short.stage(k));
    }
}
