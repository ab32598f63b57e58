//! Worst and best symmetric equilibrium payoffs with full recall, uniform values.
//!
//! Usage: `cargo run --release --example full_recall_band [grid_points]`

use std::time::Instant;

use compsel::full_recall::{band, uniform_closed_forms, GridConfig};
use compsel::ValueDistribution;

fn main() -> compsel::Result<()> {
    let points = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1001);
    let grid = GridConfig::new(points)?;
    let uniform = ValueDistribution::uniform();
    println!("n   l_n       h_n       (closed form l, h)");
    for n in 1..=5 {
        let start = Instant::now();
        let b = band(&uniform, n, grid)?;
        let closed = uniform_closed_forms(n, 0.0, 0.0)
            .map(|(l, h)| format!("({l:.6}, {h:.6})"))
            .unwrap_or_default();
        println!("{n}   {:.6}  {:.6}  {closed}  [{:.2?}]", b.l, b.h, start.elapsed());
    }
    Ok(())
}
