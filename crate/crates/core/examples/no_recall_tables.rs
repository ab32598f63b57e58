//! Worst single payoff and worst/best symmetric payoffs without recall, by
//! quadrature and by the uniform closed-form recursion.

use compsel::no_recall::{no_recall_summary, uniform_no_recall_closed};
use compsel::testkit::beta;
use compsel::ValueDistribution;

fn main() -> compsel::Result<()> {
    let u = ValueDistribution::uniform();
    println!("uniform values");
    println!("n    alpha'    alpha     beta      |closed form diff|");
    for n in 1..=10 {
        let s = no_recall_summary(&u, n)?;
        let c = uniform_no_recall_closed(n);
        let diff = (s.alpha - c.alpha).abs().max((s.beta - c.beta).abs()).max((s.alpha_prime - c.alpha_prime).abs());
        println!("{n:<4} {:.6}  {:.6}  {:.6}  {diff:.1e}", s.alpha_prime, s.alpha, s.beta);
    }
    let b = beta(2, 2)?;
    println!("\nbeta(2,2) values");
    for n in [2, 5, 10] {
        let s = no_recall_summary(&b, n)?;
        println!("n={n:<3} alpha'={:.6} alpha={:.6} beta={:.6} lone={:.6}", s.alpha_prime, s.alpha, s.beta, s.prophet.get(n));
    }
    Ok(())
}
