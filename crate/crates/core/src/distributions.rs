//! Value distributions on [0,1]: finitely many atoms plus a density that is
//! polynomial on each of finitely many pieces.
//!
//! Integration convention for a range `lo..hi`: an atom sitting exactly at
//! `lo` is excluded and one at `hi` is included, except that a range starting
//! at 0 (or below) includes an atom at 0 so that the full range carries all of
//! the mass. Use [`ValueDistribution::integrate_closed`] when both ends must be
//! included.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, gauss_legendre, Poly, DEFAULT_QUAD_TOL};

const MASS_TOL: f64 = 1e-12;
// Largest composed degree integrated by expanding the polynomial.
const EXPAND_DEGREE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub density: Poly,
    cdf: Poly,
    mass: f64,
}

impl DensityPiece {
    fn new(lo: f64, hi: f64, density: Poly) -> Self {
        let anti = density.antiderivative();
        let base = anti.eval(lo);
        let cdf = anti.add(&Poly::constant(-base));
        let mass = cdf.eval(hi);
        DensityPiece { lo, hi, density, cdf, mass }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Mass of this piece at or below `x`.
    fn mass_below(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x >= self.hi {
            self.mass
        } else {
            self.cdf.eval(x)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    atoms: Vec<(f64, f64)>,
    pieces: Vec<DensityPiece>,
    quad_tol: f64,
}

impl ValueDistribution {
    pub fn uniform() -> Self {
        Self::piecewise(vec![(0.0, 1.0, vec![1.0])]).expect("uniform is valid")
    }

    pub fn point_mass(v: f64) -> Result<Self> {
        Self::discrete(vec![(v, 1.0)])
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms, vec![])
    }

    pub fn piecewise(pieces: Vec<(f64, f64, Vec<f64>)>) -> Result<Self> {
        Self::new(vec![], pieces)
    }

    /// `(1-eta)` times the given atoms plus `eta` times Uniform[0,1].
    /// The atom masses must sum to one before scaling.
    pub fn mixture(eta: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Validation(format!("mixture weight eta={eta} outside [0,1]")));
        }
        let scaled = atoms.into_iter().map(|(x, p)| (x, p * (1.0 - eta))).collect();
        let pieces = if eta > 0.0 { vec![(0.0, 1.0, vec![eta])] } else { vec![] };
        Self::new(scaled, pieces)
    }

    pub fn new(mut atoms: Vec<(f64, f64)>, pieces: Vec<(f64, f64, Vec<f64>)>) -> Result<Self> {
        for &(x, p) in &atoms {
            if !(0.0..=1.0).contains(&x) || !x.is_finite() {
                return Err(Error::Validation(format!("atom value {x} outside [0,1]")));
            }
            if !(p > 0.0 && p <= 1.0 + MASS_TOL) {
                return Err(Error::Validation(format!("atom mass {p} at {x} outside (0,1]")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Merge duplicate values so atom values stay distinct.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        let mut built = Vec::with_capacity(pieces.len());
        for (lo, hi, coeffs) in pieces {
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::Validation(format!("density piece [{lo},{hi}] not inside [0,1]")));
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Validation("density coefficients must be finite".into()));
            }
            let piece = DensityPiece::new(lo, hi, Poly(coeffs));
            for s in 0..=64 {
                let x = lo + (hi - lo) * s as f64 / 64.0;
                if piece.density.eval(x) < -1e-12 {
                    return Err(Error::Validation(format!("density negative at x={x}")));
                }
            }
            built.push(piece);
        }
        built.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in built.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Validation("density pieces overlap".into()));
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum::<f64>() + built.iter().map(|p| p.mass).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("total mass {total} differs from 1")));
        }
        Ok(ValueDistribution { atoms: merged, pieces: built, quad_tol: DEFAULT_QUAD_TOL })
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.pieces.is_empty()
    }

    /// P(X <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.1).sum();
        let cont: f64 = self.pieces.iter().map(|p| p.mass_below(x)).sum();
        (atoms + cont).clamp(0.0, 1.0)
    }

    /// P(X < x).
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().take_while(|a| a.0 < x).map(|a| a.1).sum();
        let cont: f64 = self.pieces.iter().map(|p| p.mass_below(x)).sum();
        (atoms + cont).clamp(0.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|(x, p)| x * p).sum();
        let cont: f64 = self
            .pieces
            .iter()
            .map(|p| p.density.mul(&Poly(vec![0.0, 1.0])).integral(p.lo, p.hi))
            .sum();
        atoms + cont
    }

    /// E(X ∨ k).
    pub fn expect_max_with(&self, k: f64) -> f64 {
        self.expect_order_max_with(1, k)
    }

    /// E(max(X_1..X_n) ∨ k) = k + ∫_k^1 (1 - F^n).
    pub fn expect_order_max_with(&self, n: u32, k: f64) -> f64 {
        let k = k.clamp(0.0, 1.0);
        if n == 0 {
            return k;
        }
        k + self.integrate_cdf_poly(k, n as usize, |f| Poly::constant(1.0).add(&f.pow(n).scale(-1.0)), |f| {
            1.0 - f.powi(n as i32)
        })
    }

    /// E(X_(1:n) + X_(2:n)): expected sum of the two largest of n draws.
    pub fn top_two_expectation(&self, n: u32) -> f64 {
        assert!(n >= 2, "top_two_expectation needs n >= 2");
        let nf = n as f64;
        self.integrate_cdf_poly(
            0.0,
            n as usize,
            |f| {
                let fn1 = f.pow(n - 1);
                let fnn = fn1.mul(f);
                Poly::constant(2.0).add(&fnn.scale(nf - 2.0)).add(&fn1.scale(-nf))
            },
            |f| {
                let fn1 = f.powi(n as i32 - 1);
                2.0 + (nf - 2.0) * fn1 * f - nf * fn1
            },
        )
    }

    /// ∫_k^1 G(F(x)) dx for a polynomial transform G of degree `g_degree`,
    /// exact on each segment where F is polynomial. Low degrees expand the
    /// composition; high degrees would lose everything to cancellation in the
    /// monomial basis, so those use a Gauss rule with enough nodes to stay
    /// exact, applying `g_scalar` pointwise.
    fn integrate_cdf_poly<G, S>(&self, k: f64, g_degree: usize, g: G, g_scalar: S) -> f64
    where
        G: Fn(&Poly) -> Poly,
        S: Fn(f64) -> f64,
    {
        let mut cuts = vec![0.0, 1.0];
        cuts.extend(self.atoms.iter().map(|a| a.0));
        for p in &self.pieces {
            cuts.push(p.lo);
            cuts.push(p.hi);
        }
        cuts.push(k);
        cuts.retain(|&c| c >= k);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (u, v) = (w[0], w[1]);
            if v <= u {
                continue;
            }
            // On (u, v) the CDF equals base + Σ pieces' partial masses.
            let mut base: f64 = self.atoms.iter().take_while(|a| a.0 <= u).map(|a| a.1).sum();
            let mut poly = Poly::constant(0.0);
            for p in &self.pieces {
                if p.hi <= u {
                    base += p.mass;
                } else if p.lo < v {
                    // piece covers the whole segment
                    poly = poly.add(&p.cdf);
                }
            }
            let local = poly.add(&Poly::constant(base)).shift(u);
            let degree = local.degree() * g_degree;
            if degree <= EXPAND_DEGREE {
                total += g(&local).integral(0.0, v - u);
            } else {
                let half = 0.5 * (v - u);
                total += gauss_legendre(degree / 2 + 1)
                    .iter()
                    .map(|&(t, w)| w * g_scalar(local.eval(half * (t + 1.0))))
                    .sum::<f64>()
                    * half;
            }
        }
        total
    }

    fn atom_in(lo: f64, hi: f64, x: f64) -> bool {
        (x > lo || (lo <= 0.0 && x <= 0.0)) && x <= hi
    }

    /// ∫ g dF over `lo..hi` using the module's atom convention.
    pub fn partial_expectation<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> Result<f64> {
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if hi < lo {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for &(x, p) in &self.atoms {
            if Self::atom_in(lo, hi, x) {
                total += p * g(x);
            }
        }
        total += self.continuous_integral(lo, hi, &g);
        if !total.is_finite() {
            return Err(Error::Integration(format!("non-finite integrand on [{lo},{hi}]")));
        }
        Ok(total)
    }

    /// ∫ g dF over the closed range `[lo, hi]`.
    pub fn integrate_closed<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> Result<f64> {
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if hi < lo {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for &(x, p) in &self.atoms {
            if x >= lo && x <= hi {
                total += p * g(x);
            }
        }
        total += self.continuous_integral(lo, hi, &g);
        if !total.is_finite() {
            return Err(Error::Integration(format!("non-finite integrand on [{lo},{hi}]")));
        }
        Ok(total)
    }

    /// ∫_lo^hi g(x) f(x) dx over the density part only.
    pub fn continuous_integral<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: &G) -> f64 {
        let mut total = 0.0;
        for p in &self.pieces {
            let a = lo.max(p.lo);
            let b = hi.min(p.hi);
            if b > a {
                let dens = &p.density;
                total += adaptive_simpson(&|x| g(x) * dens.eval(x), a, b, self.quad_tol);
            }
        }
        total
    }

    /// One i.i.d. draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.gen::<f64>();
        for &(x, p) in &self.atoms {
            if u < p {
                return x;
            }
            u -= p;
        }
        for piece in &self.pieces {
            if u < piece.mass {
                return piece.invert(u);
            }
            u -= piece.mass;
        }
        // Rounding left a sliver of mass unassigned; fall back to the top.
        match (self.pieces.last(), self.atoms.last()) {
            (Some(p), Some(a)) => p.hi.max(a.0),
            (Some(p), None) => p.hi,
            (None, Some(a)) => a.0,
            (None, None) => 0.0,
        }
    }
}

impl DensityPiece {
    fn invert(&self, u: f64) -> f64 {
        if self.density.degree() == 0 {
            return self.lo + u / self.density.0[0];
        }
        let (mut a, mut b) = (self.lo, self.hi);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if self.cdf.eval(m) < u {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

/// A number given either as a JSON float or as an exact string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Exact(String),
}

impl Number {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Number::Float(v) => Ok(*v),
            Number::Exact(s) => {
                let r = parse_rational(s)?;
                Ok(rational_to_f64(&r))
            }
        }
    }

    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Number::Float(v) => float_to_rational(*v),
            Number::Exact(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Validation(format!("cannot parse '{s}' as a rational"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else if let Ok(n) = s.parse::<BigInt>() {
        Ok(BigRational::from_integer(n))
    } else {
        let v: f64 = s.parse().map_err(|_| bad())?;
        float_to_rational(v)
    }
}

/// The simplest fraction (smallest denominator, at most 10^9) within 1e-12 of
/// `v`, falling back to the exact binary value of the float.
pub fn float_to_rational(v: f64) -> Result<BigRational> {
    if !v.is_finite() {
        return Err(Error::Validation(format!("non-finite number {v}")));
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > 1_000_000_000 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - v).abs() <= 1e-12 {
            return Ok(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    BigRational::from_float(v).ok_or_else(|| Error::Validation(format!("cannot convert {v}")))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// External JSON form of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionSpec {
    Uniform,
    Discrete { atoms: Vec<AtomSpec> },
    Mixture { eta: f64, discrete: DiscretePart },
    PiecewisePoly { pieces: Vec<PieceSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub x: Number,
    pub p: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePart {
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

fn atoms_f64(atoms: &[AtomSpec]) -> Result<Vec<(f64, f64)>> {
    atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let x = a.x.to_f64().map_err(|e| Error::Validation(format!("atoms[{i}].x: {e}")))?;
            let p = a.p.to_f64().map_err(|e| Error::Validation(format!("atoms[{i}].p: {e}")))?;
            Ok((x, p))
        })
        .collect()
}

impl DistributionSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("distribution spec: {e}")))
    }

    pub fn build(&self) -> Result<ValueDistribution> {
        match self {
            DistributionSpec::Uniform => Ok(ValueDistribution::uniform()),
            DistributionSpec::Discrete { atoms } => ValueDistribution::discrete(atoms_f64(atoms)?),
            DistributionSpec::Mixture { eta, discrete } => {
                ValueDistribution::mixture(*eta, atoms_f64(&discrete.atoms)?)
            }
            DistributionSpec::PiecewisePoly { pieces } => ValueDistribution::piecewise(
                pieces.iter().map(|p| (p.lo, p.hi, p.coeffs.clone())).collect(),
            ),
        }
    }

    /// Exact atoms for the rational oracle. Only discrete specs qualify.
    pub fn exact_atoms(&self) -> Result<Vec<(BigRational, BigRational)>> {
        match self {
            DistributionSpec::Discrete { atoms } => {
                let out: Vec<_> = atoms
                    .iter()
                    .map(|a| Ok((a.x.to_rational()?, a.p.to_rational()?)))
                    .collect::<Result<_>>()?;
                let total = out.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
                if total != BigRational::one() {
                    return Err(Error::Validation(format!("exact atom masses sum to {total}, not 1")));
                }
                Ok(out)
            }
            _ => Err(Error::Unsupported("the exact oracle needs a discrete distribution".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_point() -> ValueDistribution {
        ValueDistribution::discrete(vec![(1.0 / 3.0, 0.5), (2.0 / 3.0, 0.5)]).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(ValueDistribution::uniform().cdf(0.5), 0.5);
        assert_eq!(two_point().cdf(0.5), 0.5);
        assert_eq!(two_point().cdf(1.0), 1.0);
        assert_eq!(two_point().cdf(-3.0), 0.0);
        assert_eq!(two_point().cdf(1.0 / 3.0), 0.5);
        assert_eq!(two_point().cdf_left(1.0 / 3.0), 0.0);
    }

    #[test]
    fn means() {
        assert!((ValueDistribution::uniform().mean() - 0.5).abs() < 1e-15);
        assert!((two_point().mean() - 0.5).abs() < 1e-15);
        let ex1 = ValueDistribution::discrete(vec![(0.1, 0.5), (0.5, 0.5)]).unwrap();
        assert!((ex1.mean() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn expect_max_uniform() {
        let u = ValueDistribution::uniform();
        for &k in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            assert!((u.expect_max_with(k) - (1.0 + k * k) / 2.0).abs() < 1e-14);
        }
        assert!((u.expect_max_with(0.5) - 0.625).abs() < 1e-15);
        assert!((two_point().expect_max_with(1.0) - 1.0).abs() < 1e-15);
        assert!((two_point().expect_max_with(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_max() {
        let u = ValueDistribution::uniform();
        for &b in &[0.0, 0.3, 0.8] {
            let want = (2.0 + b * b * b) / 3.0;
            assert!((u.expect_order_max_with(2, b) - want).abs() < 1e-14);
            let n = 5.0;
            let want5 = (n + b.powf(n + 1.0)) / (n + 1.0);
            assert!((u.expect_order_max_with(5, b) - want5).abs() < 1e-13);
        }
        assert!((two_point().expect_order_max_with(2, 0.0) - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn top_two() {
        for n in 2..8u32 {
            let want = 4.0 / 3.0 - (n as f64 + 2.0) / (3.0 * 2f64.powi(n as i32));
            assert!((two_point().top_two_expectation(n) - want).abs() < 1e-14, "n={n}");
        }
        let u = ValueDistribution::uniform();
        assert!((u.top_two_expectation(2) - 1.0).abs() < 1e-14);
        // k-th largest of n uniforms has mean (n+1-k)/(n+1)
        assert!((u.top_two_expectation(3) - 1.25).abs() < 1e-14);
    }

    #[test]
    fn partial_expectation_examples() {
        let u = ValueDistribution::uniform();
        assert!((u.partial_expectation(0.0, 1.0, |x| x).unwrap() - 0.5).abs() < 1e-13);
        assert!((u.partial_expectation(0.25, 0.5, |x| x).unwrap() - 3.0 / 32.0).abs() < 1e-13);
        let tp = two_point();
        assert!((tp.partial_expectation(0.0, 0.5, |x| x).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // lower endpoint atom excluded, upper included
        assert_eq!(tp.partial_expectation(1.0 / 3.0, 2.0 / 3.0, |_| 1.0).unwrap(), 0.5);
        assert_eq!(tp.integrate_closed(1.0 / 3.0, 2.0 / 3.0, |_| 1.0).unwrap(), 1.0);
        let at_zero = ValueDistribution::discrete(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(at_zero.partial_expectation(0.0, 1.0, |_| 1.0).unwrap(), 1.0);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let u = ValueDistribution::uniform();
        assert!(u.partial_expectation(0.0, 1.0, |_| f64::NAN).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_fair() {
        let u = ValueDistribution::uniform();
        let a: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..5).map(|_| u.sample(&mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..5).map(|_| u.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
        let pm = ValueDistribution::point_mass(0.7).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| pm.sample(&mut r) == 0.7));

        let tp = two_point();
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let runs = 1_000_000;
        let low = (0..runs).filter(|_| tp.sample(&mut r) < 0.5).count();
        assert!((low as f64 / runs as f64 - 0.5).abs() < 0.003);
    }

    #[test]
    fn kolmogorov_distance_of_polynomial_density() {
        // density 2x on [0,1]
        let d = ValueDistribution::piecewise(vec![(0.0, 1.0, vec![0.0, 2.0])]).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut r)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = d.cdf(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.005, "ks={ks}");
    }

    #[test]
    fn validation_errors() {
        assert!(ValueDistribution::discrete(vec![(0.5, 0.7)]).is_err());
        assert!(ValueDistribution::discrete(vec![(1.5, 1.0)]).is_err());
        assert!(ValueDistribution::piecewise(vec![(0.0, 1.0, vec![2.0, -2.0 * 2.0])]).is_err());
        assert!(ValueDistribution::mixture(1.5, vec![(0.5, 1.0)]).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let s = r#"{"type":"discrete","atoms":[{"x":"1/3","p":0.5},{"x":"2/3","p":"1/2"}]}"#;
        let spec = DistributionSpec::from_json(s).unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.atoms().len(), 2);
        let exact = spec.exact_atoms().unwrap();
        assert_eq!(exact[0].0, BigRational::new(1.into(), 3.into()));
        let m = DistributionSpec::from_json(r#"{"type":"mixture","eta":0.01,"discrete":{"atoms":[{"x":0.09,"p":0.9},{"x":1,"p":0.1}]}}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!((m.cdf(1.0) - 1.0).abs() < 1e-12);
        let pp = DistributionSpec::from_json(r#"{"type":"piecewise_poly","pieces":[{"lo":0,"hi":1,"coeffs":[1.0]}]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(pp, ValueDistribution::uniform());
        assert!(DistributionSpec::from_json(r#"{"type":"gamma"}"#).is_err());
    }

    #[test]
    fn float_to_rational_recovers_simple_fractions() {
        assert_eq!(float_to_rational(1.0 / 3.0).unwrap(), BigRational::new(1.into(), 3.into()));
        assert_eq!(float_to_rational(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(float_to_rational(0.0).unwrap(), BigRational::zero());
    }

    #[test]
    fn high_degree_order_statistics_stay_accurate() {
        // degree-8 density to a high power: compare with pointwise quadrature
        let d = crate::testkit::beta(5, 4).unwrap();
        for n in [3u32, 7, 12] {
            let nf = n as f64;
            let top = adaptive_simpson(&|x: f64| { let f = d.cdf(x); 2.0 - nf * f.powi(n as i32 - 1) + (nf - 2.0) * f.powi(n as i32) }, 0.0, 1.0, 1e-12);
            let max = adaptive_simpson(&|x: f64| 1.0 - d.cdf(x).powi(n as i32), 0.3, 1.0, 1e-12) + 0.3;
            assert!((d.top_two_expectation(n) - top).abs() < 1e-9, "n={n}");
            assert!((d.expect_order_max_with(n, 0.3) - max).abs() < 1e-9, "n={n}");
        }
    }
}
