//! Exact equilibrium payoff sets for a two-point law, in rationals.

use compsel::oracle::{oracle_spep, oracle_summaries, Variant};
use compsel::DistributionSpec;

fn main() -> compsel::Result<()> {
    for (lo, hi) in [("1/3", "2/3"), ("1/10", "1/2")] {
        let spec = DistributionSpec::from_json(&format!(
            r#"{{"type":"discrete","atoms":[{{"x":"{lo}","p":"1/2"}},{{"x":"{hi}","p":"1/2"}}]}}"#
        ))?;
        let atoms = spec.exact_atoms()?;
        println!("values {lo} and {hi}, equal odds");
        for n in 1..=4 {
            for variant in [Variant::FullRecall, Variant::NoRecall] {
                let set = oracle_spep(&atoms, n, variant)?;
                let pairs: Vec<String> = set.payoffs.iter().map(|(x, y)| format!("({x}, {y})")).collect();
                let s = oracle_summaries(&set)?;
                println!("  n={n} {variant:?}: {}  best single {}", pairs.join(" "), s.best_single);
            }
        }
    }
    Ok(())
}
