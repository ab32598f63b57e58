//! Single-agent benchmarks: the optimal lone stopping value `c_n` and the
//! best expected sum `s_n` two cooperating pickers can secure without recall,
//! next to the expected sum of the two largest values.

use compsel::prophet::{max_feasible_sum, prophet_values};
use compsel::ValueDistribution;

fn main() -> compsel::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let d = ValueDistribution::uniform();
    let c = prophet_values(&d, n);
    let s = max_feasible_sum(&d, n)?;
    println!("n   c_n       s_n       E[top two]");
    for k in 1..=n {
        let top = if k >= 2 { d.top_two_expectation(k as u32) } else { d.mean() };
        println!("{k:<3} {:.6}  {:.6}  {:.6}", c.get(k), s.get(k), top);
    }
    Ok(())
}
