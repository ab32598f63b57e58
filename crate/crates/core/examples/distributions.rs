//! Building value distributions: from code, from JSON, and with atoms.

use compsel::testkit::{beta, truncated_exponential};
use compsel::{DistributionSpec, ValueDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> compsel::Result<()> {
    let spec = DistributionSpec::from_json(
        r#"{"type":"mixture","eta":0.2,"discrete":{"atoms":[{"x":"1/4","p":"1/2"},{"x":1.0,"p":0.5}]}}"#,
    )?;
    let laws = [
        ("uniform", ValueDistribution::uniform()),
        ("beta(2,5)", beta(2, 5)?),
        ("exponential(3) on [0,1]", truncated_exponential(3.0)?),
        ("mixture from JSON", spec.build()?),
        ("two points", ValueDistribution::discrete(vec![(1.0 / 3.0, 0.5), (2.0 / 3.0, 0.5)])?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:<26}{:>10}{:>12}{:>14}{:>12}", "law", "mean", "F(1/2)", "E[max of 3]", "sample");
    for (name, d) in &laws {
        println!(
            "{name:<26}{:>10.5}{:>12.5}{:>14.5}{:>12.5}",
            d.mean(),
            d.cdf(0.5),
            d.expect_order_max_with(3, 0.0),
            d.sample(&mut rng)
        );
    }
    Ok(())
}
