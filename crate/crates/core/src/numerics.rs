//! Small numerical kernels shared by the recursions: adaptive Simpson
//! quadrature, bisection, and dense polynomials in the monomial basis.

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

/// Adaptive composite Simpson on `[lo, hi]`.
///
/// The interval is first cut into four panels so that integrands which happen
/// to be symmetric about the midpoint cannot fool the first error estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let panels = 4;
    let w = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * w;
        let b = if p + 1 == panels { hi } else { a + w };
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = simpson(a, b, fa, fm, fb);
        total += refine(f, a, b, fa, fm, fb, whole, tol / panels as f64, MAX_DEPTH);
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol || !diff.is_finite() {
        return left + right + diff / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Root of a continuous function with a sign change on `[lo, hi]`.
/// Returns the endpoint when there is no sign change.
/// Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1], exact
/// for polynomials up to degree 2m - 1.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        // Chebyshev-like starting guess, then Newton on P_m
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let step = pm / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo.signum() == fhi.signum() {
        return if flo.abs() < fhi.abs() { lo } else { hi };
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        for (i, &c) in self.0.iter().enumerate() {
            out.push(c / (i + 1) as f64);
        }
        Poly(out)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(hi) - p.eval(lo)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(vec![]);
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        Poly(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(1.0);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Re-expand around `x0`: returns q with q(t) = self(x0 + t).
    pub fn shift(&self, x0: f64) -> Poly {
        // Horner-style Taylor shift.
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] += x0 * c[j + 1];
            }
        }
        Poly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn gauss_legendre_is_exact_for_high_degree() {
        for m in [1, 2, 5, 32] {
            let rule = super::gauss_legendre(m);
            let w: f64 = rule.iter().map(|r| r.1).sum();
            assert!((w - 2.0).abs() < 1e-13, "m={m}");
            let deg = 2 * m - 2;
            let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "m={m}");
        }
    }

    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let f = |x: f64| 1.0 + x - 3.0 * x * x + x * x * x;
        let got = adaptive_simpson(&f, 0.0, 2.0, 1e-12);
        // 2 + 2 - 8 + 4
        assert!((got - 0.0).abs() < 1e-13, "{got}");
    }

    #[test]
    fn simpson_handles_log_like_integrand() {
        let got = adaptive_simpson(&|x: f64| 1.0 / x, 0.25, 0.5, 1e-12);
        assert!((got - std::f64::consts::LN_2).abs() < 1e-11);
    }

    #[test]
    fn bisect_finds_cube_root() {
        let r = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Poly(vec![0.5, -1.0, 2.0, 0.25]);
        let q = p.shift(0.3);
        for &t in &[0.0, 0.1, 0.7] {
            assert!((q.eval(t) - p.eval(0.3 + t)).abs() < 1e-14);
        }
    }

    #[test]
    fn pow_and_integral() {
        let p = Poly(vec![0.0, 1.0]).pow(5);
        assert!((p.integral(0.0, 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }
}
