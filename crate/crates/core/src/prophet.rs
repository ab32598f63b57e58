//! Single-decision-maker benchmarks: the no-recall stopping values c_k and
//! the best expected sum s_k obtainable with two picks.

use serde::Serialize;

use crate::distributions::ValueDistribution;
use crate::error::Result;

/// `c[k-1]` holds the value of a lone no-recall decision maker facing k
/// arrivals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProphetSequence {
    pub c: Vec<f64>,
}

impl ProphetSequence {
    /// c_k with the convention c_0 = 0.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.c[k - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibleSumSequence {
    pub s: Vec<f64>,
}

impl FeasibleSumSequence {
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.s[k - 1]
        }
    }
}

pub fn prophet_values(d: &ValueDistribution, n: usize) -> ProphetSequence {
    let mut c = Vec::with_capacity(n);
    let mut prev = 0.0;
    for k in 1..=n {
        // E(X ∨ 0) is the mean, so c_1 falls out of the same step.
        let next = if k == 1 { d.mean() } else { d.expect_max_with(prev) };
        c.push(next);
        prev = next;
    }
    ProphetSequence { c }
}

/// Best expected total from two no-recall picks among k arrivals.
///
/// With one pick already banked, the other is worth `c_{k-1}`; taking the
/// current value x is right exactly when `x + c_{k-1} >= s_{k-1}`.
pub fn max_feasible_sum(d: &ValueDistribution, n: usize) -> Result<FeasibleSumSequence> {
    let c = prophet_values(d, n);
    let m = d.mean();
    let mut s = Vec::with_capacity(n);
    for k in 1..=n {
        let v = match k {
            1 => m,
            2 => 2.0 * m,
            _ => {
                let prev: f64 = s[k - 2];
                let ck = c.get(k - 1);
                let t = (prev - ck).clamp(0.0, 1.0);
                d.integrate_closed(t, 1.0, |x| x + ck)? + prev * d.cdf_left(t)
            }
        };
        s.push(v);
    }
    Ok(FeasibleSumSequence { s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prophet_values() {
        let c = prophet_values(&ValueDistribution::uniform(), 3);
        assert_eq!(c.c[0], 0.5);
        assert!((c.c[1] - 5.0 / 8.0).abs() < 1e-15);
        assert!((c.c[2] - 89.0 / 128.0).abs() < 1e-15);
        assert_eq!(c.get(0), 0.0);
    }

    #[test]
    fn point_mass_sequences() {
        let d = ValueDistribution::point_mass(0.4).unwrap();
        let c = prophet_values(&d, 6);
        assert!(c.c.iter().all(|&v| (v - 0.4).abs() < 1e-15));
        let s = max_feasible_sum(&d, 6).unwrap();
        assert_eq!(s.s[0], 0.4);
        assert!(s.s[1..].iter().all(|&v| (v - 0.8).abs() < 1e-15));
    }

    #[test]
    fn uniform_s3() {
        let s = max_feasible_sum(&ValueDistribution::uniform(), 3).unwrap();
        assert!((s.s[1] - 1.0).abs() < 1e-15);
        assert!((s.s[2] - 153.0 / 128.0).abs() < 1e-12);
    }
}
