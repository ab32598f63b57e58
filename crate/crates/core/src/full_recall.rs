//! Worst and best symmetric equilibrium payoffs of the full-recall game.
//!
//! State `(k, a, b)`: k arrivals still to come, `a >= b` the two best values
//! that are still available. With no arrivals left both players split the top
//! two, `l_0 = h_0 = (a+b)/2`. Otherwise
//!
//! ```text
//! l_k(a,b) = L(a, c_k(b), d⁻_k(a,b))      h_k(a,b) = H(a, c_k(b), d⁺_k(a,b))
//! d_k(a,b) = E[ v_{k-1}(a ∨ X, med(a,b,X)) ]
//! c_k(b)   = E[ max(X_1..X_k) ∨ b ]
//! ```
//!
//! For discrete laws the recursion is evaluated exactly on the reachable
//! states. Otherwise value tables live on a uniform grid over the triangle
//! `b <= a`; the expectation over the next arrival integrates the previous
//! table, linearly interpolated in x, against the law.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::ValueDistribution;
use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::stage_games::{selector_h, selector_l};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridConfig {
    /// Number of grid points per axis, spacing 1/(points-1).
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { points: 1001 }
    }
}

impl GridConfig {
    pub fn new(points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::Validation(format!("grid needs at least 3 points, got {points}")));
        }
        Ok(GridConfig { points })
    }
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

#[inline]
fn sym(i: usize, j: usize) -> usize {
    if j <= i {
        tri(i, j)
    } else {
        tri(j, i)
    }
}

/// Grid geometry plus the per-cell integration weights of the law.
#[derive(Debug, Clone)]
pub struct TriangleGrid {
    g: usize,
    h: f64,
    /// `w0[j]`, `w1[j]`: mass of cell `[x_j, x_{j+1}]` weighted by the hat
    /// functions of its left and right node (density part only).
    w0: Vec<f64>,
    w1: Vec<f64>,
    cdf: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

impl TriangleGrid {
    pub fn new(d: &ValueDistribution, cfg: GridConfig) -> Self {
        let g = cfg.points;
        let h = 1.0 / (g - 1) as f64;
        let x = |j: usize| j as f64 * h;
        let (w0, w1): (Vec<f64>, Vec<f64>) = (0..g - 1)
            .into_par_iter()
            .map(|j| {
                let (lo, hi) = (x(j), x(j + 1));
                let a = d.continuous_integral(lo, hi, &|t| (hi - t) / h);
                let b = d.continuous_integral(lo, hi, &|t| (t - lo) / h);
                (a, b)
            })
            .unzip();
        let cdf = (0..g).map(|j| d.cdf(x(j))).collect();
        TriangleGrid { g, h, w0, w1, cdf, atoms: d.atoms().to_vec() }
    }

    pub fn points(&self) -> usize {
        self.g
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    fn cell(&self, v: f64) -> (usize, f64) {
        let s = (v.clamp(0.0, 1.0) / self.h).min((self.g - 1) as f64);
        let i = (s.floor() as usize).min(self.g - 2);
        (i, s - i as f64)
    }

    /// Bilinear interpolation of a triangle table at any point of the square,
    /// reading `(u, v)` and `(v, u)` as the same state.
    pub fn interp(&self, table: &[f64], u: f64, v: f64) -> f64 {
        let (i, s) = self.cell(u);
        let (j, t) = self.cell(v);
        let f00 = table[sym(i, j)];
        let f10 = table[sym(i + 1, j)];
        let f01 = table[sym(i, j + 1)];
        let f11 = table[sym(i + 1, j + 1)];
        (1.0 - s) * ((1.0 - t) * f00 + t * f01) + s * ((1.0 - t) * f10 + t * f11)
    }

    /// Tail integrals `r[i*g + j] = ∫_{(x_j,1]} T(a_i, x) f(x) dx` over the
    /// density part, for a triangle table T.
    fn tails(&self, table: &[f64]) -> Vec<f64> {
        let g = self.g;
        let mut r = vec![0.0; g * g];
        r.par_chunks_mut(g).enumerate().for_each(|(i, row)| {
            row[g - 1] = 0.0;
            for j in (0..g - 1).rev() {
                row[j] = row[j + 1] + table[sym(i, j)] * self.w0[j] + table[sym(i, j + 1)] * self.w1[j];
            }
        });
        r
    }

    fn atom_part(&self, table: &[f64], a: f64, b: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(x, _)| *x > b)
            .map(|&(x, m)| m * self.interp(table, a.max(x), a.min(x)))
            .sum()
    }

    /// `E[T(a ∨ X, med(a, b, X))]` at grid node `(i, j)`.
    fn continuation_node(&self, table: &[f64], tails: &[f64], i: usize, j: usize) -> f64 {
        let base = self.cdf[j] * table[tri(i, j)] + tails[i * self.g + j];
        if self.atoms.is_empty() {
            base
        } else {
            base + self.atom_part(table, self.x(i), self.x(j))
        }
    }

    /// `E[T(a ∨ X, med(a, b, X))]` at every node of the triangle.
    pub fn continuation_table(&self, table: &[f64]) -> Vec<f64> {
        let tails = self.tails(table);
        let g = self.g;
        let mut out = Vec::with_capacity(g * (g + 1) / 2);
        for i in 0..g {
            for j in 0..=i {
                out.push(self.continuation_node(table, &tails, i, j));
            }
        }
        out
    }

    /// `E[T(a ∨ X, med(a, b, X))]` at an arbitrary state `a >= b`.
    fn continuation_at(&self, table: &[f64], tails: &[f64], cdf_b: f64, a: f64, b: f64) -> f64 {
        let (i, s) = self.cell(a);
        let (j, t) = self.cell(b);
        let g = self.g;
        let row = |i: usize| (1.0 - t) * tails[i * g + j] + t * tails[i * g + j + 1];
        let tail = (1.0 - s) * row(i) + s * row(i + 1);
        cdf_b * self.interp(table, a, b) + tail + self.atom_part(table, a, b)
    }
}

/// Tables of one stage: values `l_k`, `h_k` on the triangle and their tail
/// integrals, which feed stage k+1.
#[derive(Debug, Clone)]
struct StageTables {
    l: Vec<f64>,
    h: Vec<f64>,
    l_tails: Vec<f64>,
    h_tails: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Backend {
    Grid { grid: TriangleGrid, stages: Vec<StageTables> },
    Exact { memo: HashMap<(usize, u64, u64), (f64, f64)> },
}

/// Extremal symmetric equilibrium payoffs for a horizon of n arrivals, with
/// the machinery to evaluate every intermediate stage.
#[derive(Debug, Clone)]
pub struct FullRecallBand {
    pub n: usize,
    pub l: f64,
    pub h: f64,
    dist: ValueDistribution,
    backend: Backend,
}

impl FullRecallBand {
    /// `c_k(b) = E[max(X_1..X_k) ∨ b]`.
    pub fn lone_value(&self, k: usize, b: f64) -> f64 {
        self.dist.expect_order_max_with(k as u32, b)
    }

    /// `(d⁻_k(a,b), d⁺_k(a,b))`: expected worst/best continuation when both
    /// pass with k arrivals to come.
    pub fn continuation(&self, k: usize, a: f64, b: f64) -> (f64, f64) {
        assert!(k >= 1 && k <= self.n, "stage {k} outside 1..={}", self.n);
        match &self.backend {
            Backend::Grid { grid, stages } => {
                let prev = &stages[k - 1];
                let fb = self.dist.cdf(b);
                (
                    grid.continuation_at(&prev.l, &prev.l_tails, fb, a, b),
                    grid.continuation_at(&prev.h, &prev.h_tails, fb, a, b),
                )
            }
            Backend::Exact { memo } => {
                let mut dm = 0.0;
                let mut dp = 0.0;
                for &(x, m) in self.dist.atoms() {
                    let (na, nb) = if x <= b { (a, b) } else { (a.max(x), a.min(x)) };
                    let (l, h) = lookup_lh(&self.dist, k - 1, na, nb, memo);
                    dm += m * l;
                    dp += m * h;
                }
                (dm, dp)
            }
        }
    }

    /// `(l_k(a,b), h_k(a,b))` for `0 <= k <= n`.
    pub fn lh_at(&self, k: usize, a: f64, b: f64) -> (f64, f64) {
        if k == 0 {
            let v = (a + b) / 2.0;
            return (v, v);
        }
        if let Backend::Exact { memo } = &self.backend {
            return lookup_lh(&self.dist, k, a, b, memo);
        }
        let c = self.lone_value(k, b);
        let (dm, dp) = self.continuation(k, a, b);
        (selector_l(a, c, dm), selector_h(a, c, dp))
    }

    /// `(l_k(0,0), h_k(0,0))`: the band of the game with k arrivals, k <= n.
    pub fn origin(&self, k: usize) -> (f64, f64) {
        assert!(k <= self.n);
        match &self.backend {
            Backend::Grid { stages, .. } => (stages[k].l[0], stages[k].h[0]),
            Backend::Exact { memo } => lookup_lh(&self.dist, k, 0.0, 0.0, memo),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.backend, Backend::Exact { .. })
    }

    /// Grid values of stage k at node (i, j), i >= j; `None` on the exact path.
    pub fn node_values(&self, k: usize, i: usize, j: usize) -> Option<(f64, f64)> {
        match &self.backend {
            Backend::Grid { stages, .. } => stages.get(k).map(|s| (s.l[tri(i, j)], s.h[tri(i, j)])),
            Backend::Exact { .. } => None,
        }
    }

    pub fn grid(&self) -> Option<&TriangleGrid> {
        match &self.backend {
            Backend::Grid { grid, .. } => Some(grid),
            Backend::Exact { .. } => None,
        }
    }
}

fn key(k: usize, a: f64, b: f64) -> (usize, u64, u64) {
    (k, a.to_bits(), b.to_bits())
}

fn exact_continuation(
    d: &ValueDistribution,
    k: usize,
    a: f64,
    b: f64,
    memo: &mut HashMap<(usize, u64, u64), (f64, f64)>,
) -> (f64, f64) {
    let mut dm = 0.0;
    let mut dp = 0.0;
    for &(x, m) in d.atoms() {
        let (na, nb) = if x <= b { (a, b) } else { (a.max(x), a.min(x)) };
        let (l, h) = exact_lh(d, k - 1, na, nb, memo);
        dm += m * l;
        dp += m * h;
    }
    (dm, dp)
}

/// Memo lookup that falls back to a fresh recursion for unseen states.
fn lookup_lh(d: &ValueDistribution, k: usize, a: f64, b: f64, memo: &HashMap<(usize, u64, u64), (f64, f64)>) -> (f64, f64) {
    if k == 0 {
        let v = (a + b) / 2.0;
        return (v, v);
    }
    match memo.get(&key(k, a, b)) {
        Some(v) => *v,
        None => exact_lh(d, k, a, b, &mut HashMap::new()),
    }
}

fn exact_lh(
    d: &ValueDistribution,
    k: usize,
    a: f64,
    b: f64,
    memo: &mut HashMap<(usize, u64, u64), (f64, f64)>,
) -> (f64, f64) {
    if k == 0 {
        let v = (a + b) / 2.0;
        return (v, v);
    }
    if let Some(v) = memo.get(&key(k, a, b)) {
        return *v;
    }
    let c = d.expect_order_max_with(k as u32, b);
    let (dm, dp) = exact_continuation(d, k, a, b, memo);
    let v = (selector_l(a, c, dm), selector_h(a, c, dp));
    memo.insert(key(k, a, b), v);
    v
}

fn grid_stage_zero(grid: &TriangleGrid) -> StageTables {
    let g = grid.points();
    let mut l = vec![0.0; g * (g + 1) / 2];
    for i in 0..g {
        for j in 0..=i {
            l[tri(i, j)] = (grid.x(i) + grid.x(j)) / 2.0;
        }
    }
    let tails = grid.tails(&l);
    StageTables { h: l.clone(), l, l_tails: tails.clone(), h_tails: tails }
}

fn grid_next_stage(grid: &TriangleGrid, d: &ValueDistribution, prev: &StageTables, k: usize) -> StageTables {
    let g = grid.points();
    let c: Vec<f64> = (0..g).into_par_iter().map(|j| d.expect_order_max_with(k as u32, grid.x(j))).collect();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..g)
        .into_par_iter()
        .map(|i| {
            let a = grid.x(i);
            let mut lr = Vec::with_capacity(i + 1);
            let mut hr = Vec::with_capacity(i + 1);
            for (j, &cj) in c.iter().enumerate().take(i + 1) {
                let dm = grid.continuation_node(&prev.l, &prev.l_tails, i, j);
                let dp = grid.continuation_node(&prev.h, &prev.h_tails, i, j);
                lr.push(selector_l(a, cj, dm));
                hr.push(selector_h(a, cj, dp));
            }
            (lr, hr)
        })
        .collect();
    let mut l = Vec::with_capacity(g * (g + 1) / 2);
    let mut h = Vec::with_capacity(g * (g + 1) / 2);
    for (lr, hr) in rows {
        l.extend(lr);
        h.extend(hr);
    }
    let l_tails = grid.tails(&l);
    let h_tails = grid.tails(&h);
    StageTables { l, h, l_tails, h_tails }
}

/// Build the band for horizon n: exact recursion for purely discrete laws,
/// grid tables otherwise.
pub fn band(d: &ValueDistribution, n: usize, cfg: GridConfig) -> Result<FullRecallBand> {
    if d.is_discrete() {
        let mut memo = HashMap::new();
        let (l, h) = exact_lh(d, n, 0.0, 0.0, &mut memo);
        return Ok(FullRecallBand { n, l, h, dist: d.clone(), backend: Backend::Exact { memo } });
    }
    let grid = TriangleGrid::new(d, cfg);
    let mut stages = vec![grid_stage_zero(&grid)];
    for k in 1..=n {
        let next = grid_next_stage(&grid, d, &stages[k - 1], k);
        stages.push(next);
    }
    let (l, h) = stages
        .last()
        .map(|s| (s.l[0], s.h[0]))
        .expect("stage zero always present");
    Ok(FullRecallBand { n, l, h, dist: d.clone(), backend: Backend::Grid { grid, stages } })
}

/// `(l_n(a,b), h_n(a,b))` at one state.
pub fn lh_values(d: &ValueDistribution, n: usize, a: f64, b: f64, cfg: GridConfig) -> Result<(f64, f64)> {
    if b > a {
        return Err(Error::Validation(format!("need b <= a, got a={a}, b={b}")));
    }
    if n == 0 {
        return Ok(((a + b) / 2.0, (a + b) / 2.0));
    }
    if d.is_discrete() {
        let mut memo = HashMap::new();
        return Ok(exact_lh(d, n, a, b, &mut memo));
    }
    let band = band(d, n - 1, cfg)?;
    let c = d.expect_order_max_with(n as u32, b);
    let grid = band.grid().expect("grid backend");
    let Backend::Grid { stages, .. } = &band.backend else { unreachable!() };
    let prev = &stages[n - 1];
    let fb = d.cdf(b);
    let dm = grid.continuation_at(&prev.l, &prev.l_tails, fb, a, b);
    let dp = grid.continuation_at(&prev.h, &prev.h_tails, fb, a, b);
    Ok((selector_l(a, c, dm), selector_h(a, c, dp)))
}

/// Fixed point of `a = (1+a²)/2 − a³/6`: the first-arrival threshold of the
/// best equilibrium with three uniform arrivals.
pub fn a_star() -> f64 {
    bisect(|a| a - (1.0 + a * a) / 2.0 + a * a * a / 6.0, 0.0, 1.0, 1e-15)
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi))
}

fn uniform_d2(a: f64, b: f64) -> f64 {
    (1.0 + a * a) / 2.0 + (b * b * b - a * a * a) / 6.0
}

fn uniform_c2(b: f64) -> f64 {
    (2.0 + b * b * b) / 3.0
}

fn uniform_lh2(a: f64, b: f64) -> (f64, f64) {
    let c = uniform_c2(b);
    let d = uniform_d2(a, b);
    let contested = a / 2.0 + c / 2.0;
    let l = if a <= c { d } else { contested };
    let h = if a <= c.max(d) { d } else { contested };
    (l, h)
}

/// Piecewise-polynomial closed forms for Uniform[0,1] and n <= 3.
pub fn uniform_closed_forms(n: usize, a: f64, b: f64) -> Result<(f64, f64)> {
    if b > a {
        return Err(Error::Validation(format!("need b <= a, got a={a}, b={b}")));
    }
    match n {
        0 => Ok(((a + b) / 2.0, (a + b) / 2.0)),
        1 => {
            let v = a / 2.0 + (1.0 + b * b) / 4.0;
            Ok((v, v))
        }
        2 => Ok(uniform_lh2(a, b)),
        3 => {
            let c3 = (3.0 + b.powi(4)) / 4.0;
            let cbrt_pos = |v: f64| v.max(0.0).cbrt();
            // State (a, x) for b < x <= a: l_2 keeps its first branch iff
            // x³ >= 3a−2; h_2 iff x³ >= min(3a−2, 6a−3−3a²+a³).
            let tl = cbrt_pos(3.0 * a - 2.0).clamp(b, a);
            let th = cbrt_pos((3.0 * a - 2.0).min(6.0 * a - 3.0 - 3.0 * a * a + a * a * a)).clamp(b, a);
            // State (x, a) for x > a: l_2 first branch iff x <= c_2(a);
            // h_2 iff x <= max(c_2(a), root of x = d_2(x, a)).
            let sl = uniform_c2(a).clamp(a, 1.0);
            let root = bisect(|x| x - uniform_d2(x, a), 0.0, 1.0, 1e-15);
            let sh = uniform_c2(a).max(root).clamp(a, 1.0);
            // Each sub-integral uses its branch formula directly so that
            // Simpson never samples the other side of a jump.
            let kept = |hi: f64, lo: f64| uniform_d2(hi, lo);
            let contested = |hi: f64, lo: f64| hi / 2.0 + uniform_c2(lo) / 2.0;
            let (l_ab, h_ab) = uniform_lh2(a, b);
            let dm = b * l_ab
                + simpson(|x| contested(a, x), b, tl)
                + simpson(|x| kept(a, x), tl, a)
                + simpson(|x| kept(x, a), a, sl)
                + simpson(|x| contested(x, a), sl, 1.0);
            let dp = b * h_ab
                + simpson(|x| contested(a, x), b, th)
                + simpson(|x| kept(a, x), th, a)
                + simpson(|x| kept(x, a), a, sh)
                + simpson(|x| contested(x, a), sh, 1.0);
            Ok((selector_l(a, c3, dm), selector_h(a, c3, dp)))
        }
        _ => Err(Error::Validation(format!("uniform closed forms cover n <= 3, got {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_origin() {
        let (l2, h2) = uniform_closed_forms(2, 0.0, 0.0).unwrap();
        assert!((l2 - 0.5).abs() < 1e-15 && (h2 - 0.5).abs() < 1e-15);
        let (l, _) = uniform_closed_forms(2, 0.9, 0.0).unwrap();
        assert!((l - (0.45 + 1.0 / 3.0)).abs() < 1e-15);
        let (l3, h3) = uniform_closed_forms(3, 0.0, 0.0).unwrap();
        assert!((l3 - 607.0 / 972.0).abs() < 1e-14, "{l3}");
        // h_3 = ∫_0^{a*} d_2(a,0) da + ∫_{a*}^1 (a/2+1/3) da
        let s = a_star();
        let want = s / 2.0 + s.powi(3) / 6.0 - s.powi(4) / 24.0 + (1.0 - s * s) / 4.0 + (1.0 - s) / 3.0;
        assert!((h3 - want).abs() < 1e-12, "{h3} vs {want}");
        assert!((h3 - 0.6245).abs() < 1e-4);
        assert!((s - 0.677).abs() < 1e-3);
    }

    #[test]
    fn n1_formula_everywhere() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 0.2), (0.9, 0.9), (1.0, 0.3)] {
            let (l, h) = uniform_closed_forms(1, a, b).unwrap();
            let want = a / 2.0 + (1.0 + b * b) / 4.0;
            assert!((l - want).abs() < 1e-15 && (h - want).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_matches_closed_forms_at_origin() {
        let u = ValueDistribution::uniform();
        let b = band(&u, 3, GridConfig::new(401).unwrap()).unwrap();
        assert!((b.l - 607.0 / 972.0).abs() < 2e-4, "{}", b.l);
        assert!((b.h - uniform_closed_forms(3, 0.0, 0.0).unwrap().1).abs() < 2e-4, "{}", b.h);
    }

    #[test]
    fn two_point_exact_path() {
        let d = ValueDistribution::discrete(vec![(1.0 / 3.0, 0.5), (2.0 / 3.0, 0.5)]).unwrap();
        for n in 2..=6 {
            let b = band(&d, n, GridConfig::default()).unwrap();
            let want = 2.0 / 3.0 - (n as f64 + 2.0) / (3.0 * 2f64.powi(n as i32 + 1));
            assert!((b.l - want).abs() < 1e-12 && (b.h - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn argument_order_is_checked() {
        let u = ValueDistribution::uniform();
        assert!(lh_values(&u, 2, 0.2, 0.5, GridConfig::default()).is_err());
        assert_eq!(lh_values(&u, 0, 0.6, 0.2, GridConfig::default()).unwrap(), (0.4, 0.4));
    }
}
