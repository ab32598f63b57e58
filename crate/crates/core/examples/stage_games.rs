//! The one-shot bid/pass games behind the recursions, solved exactly in
//! rational arithmetic and checked against the payoff matrix.

use compsel::stage_games::{solve_fr_stage, solve_nr_stage, BidPassMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() -> compsel::Result<()> {
    // value on the table, lone continuation, continuation when both pass
    let cases = [(q(1, 2), q(2, 3), q(1, 2), q(1, 2)), (q(3, 4), q(2, 3), q(3, 5), q(3, 5)), (q(1, 2), q(2, 3), q(2, 5), q(3, 5))];
    for (a, c, d, e) in cases {
        let nr = solve_nr_stage(&a, &c, &d, &e)?;
        println!("no recall  a={a} c={c} (d,e)=({d},{e})  case {:?}", nr.case);
        let m = BidPassMatrix { a: a.clone(), c: c.clone(), d: d.clone(), e: e.clone() };
        for eq in &nr.equilibria {
            let ok = m.is_equilibrium(&eq.bid.0, &eq.bid.1);
            println!("    bids ({}, {})  payoffs ({}, {})  verified: {ok}", eq.bid.0, eq.bid.1, eq.payoff.0, eq.payoff.1);
        }
        if d == e {
            let fr = solve_fr_stage(&a, &c, &d)?;
            println!("full recall  case {:?}, {} equilibria", fr.case, fr.equilibria.len());
        }
    }
    Ok(())
}
