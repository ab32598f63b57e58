//! Efficiency of equilibria: anarchy, stability and prophet ratios for
//! uniform values, and the two-arrival family that pushes them towards 4/3.

use compsel::efficiency::{full_recall_series, no_recall_series, tightness_family, two_arrival_closed_forms};
use compsel::full_recall::{band, GridConfig};
use compsel::no_recall::no_recall_tables;
use compsel::ValueDistribution;

fn main() -> compsel::Result<()> {
    let u = ValueDistribution::uniform();
    let fr = full_recall_series(&u, &band(&u, 5, GridConfig::default())?)?;
    let nr = no_recall_series(&u, &no_recall_tables(&u, 5)?)?;
    println!("n  PoA full  PoA no    PoS full  PoS no    PR full   PR no");
    for (a, b) in fr.iter().zip(&nr) {
        println!("{}  {:.6}  {:.6}  {:.6}  {:.6}  {:.6}  {:.6}", a.n, a.poa, b.poa, a.pos, b.pos, a.pr, b.pr);
    }
    println!("\ntwo arrivals, atoms near 0 and at 1 plus a little uniform noise");
    for eps in [0.3, 0.1, 0.03, 0.01] {
        let f = two_arrival_closed_forms(&tightness_family(eps, 0.001)?)?;
        println!("eps={eps:<5} PoS={:.5} PoA={:.5}  (bound {:.5})", f.pos2, f.poa2, 4.0 / 3.0);
    }
    Ok(())
}
