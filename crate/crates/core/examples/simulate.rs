//! Monte Carlo play of the best and worst equilibria, compared with the
//! recursion values, plus a best-response check of each strategy.

use compsel::full_recall::{band, GridConfig};
use compsel::no_recall::no_recall_summary;
use compsel::oracle::Variant;
use compsel::simulate::{best_response_gap, play, spe_strategy, BestResponseConfig, Which};
use compsel::ValueDistribution;

fn main() -> compsel::Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let u = ValueDistribution::uniform();
    let n = 3;
    let fr = band(&u, n, GridConfig::default())?;
    let nr = no_recall_summary(&u, n)?;
    let br = BestResponseConfig { points: 801 };
    for (variant, which, target) in [
        (Variant::FullRecall, Which::Worst, fr.l),
        (Variant::FullRecall, Which::Best, fr.h),
        (Variant::NoRecall, Which::Worst, nr.alpha),
        (Variant::NoRecall, Which::Best, nr.beta),
    ] {
        let s = spe_strategy(&u, n, variant, which, GridConfig::default())?;
        let r = play(&u, n, variant, &s, &s, runs, 42)?;
        let gap = best_response_gap(&u, n, variant, &s, br)?;
        println!(
            "{variant:?} {which:?}: simulated {:.5} ± {:.5}, recursion {target:.5}, payoffs ({:.4}, {:.4}), deviation gain {gap:.1e}",
            r.mean_average, r.std_err_average, r.mean.0, r.mean.1
        );
    }
    Ok(())
}
