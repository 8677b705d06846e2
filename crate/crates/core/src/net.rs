//! Nets of the monotone part of the ℓ_q unit ball.
//!
//! Points of `K_qⁿ = {a : a₁ ≥ … ≥ a_n ≥ 0, ‖a‖_q ≤ 1}` are approximated on
//! the multiplicative grid `t_j = (1 + δ/6)^{-j}`, `j = 0..=J`, with
//! `J = ⌈ln(30/δ)/ln(1 + δ/6)⌉`, plus the value zero. A point of the net is
//! a [`LevelProfile`]: a nondecreasing assignment of levels to coordinates
//! whose decoded vector lies in the ball.
//!
//! Rounding every coordinate of `x ∈ K_qⁿ` down to the grid (and to zero
//! below `t_J`) lands in the net and moves `x` by at most
//! `(1 − 1/(1+δ/6))·‖x‖_q + t_J·n^{1/q}` in ℓ_q; [`density_check`] measures
//! the worst case empirically.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{lp_norm, Exponent};
use crate::rng::stream;

/// Default cap on enumerated profiles.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
const BALL_EPS: f64 = 1e-12;

/// Parameters of the net `G(n, q, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetParams {
    pub n: usize,
    pub q: Exponent,
    pub delta: f64,
    /// Deepest grid level `J`.
    pub depth: u32,
    /// Set when the zero cutoff was lowered to `δ/(30·min(n,30)^{1/q})`.
    pub refined: bool,
}

impl NetParams {
    pub fn new(n: usize, q: Exponent, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("net dimension must be positive".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("δ must lie in (0, 1), got {delta}")));
        }
        let depth = Self::depth_for_cutoff(delta, delta / 30.0);
        Ok(Self { n, q, delta, depth, refined: false })
    }

    fn depth_for_cutoff(delta: f64, cutoff: f64) -> u32 {
        ((1.0 / cutoff).ln() / (1.0 + delta / 6.0).ln()).ceil() as u32
    }

    /// Same grid ratio, cutoff lowered to `δ/(30·min(n,30)^{1/q})`.
    pub fn refined(self) -> Self {
        let m = self.n.min(30) as f64;
        let factor = if self.q.is_infinite() { 1.0 } else { m.powf(1.0 / self.q.value()) };
        let depth = Self::depth_for_cutoff(self.delta, self.delta / (30.0 * factor)).max(self.depth);
        Self { depth, refined: true, ..self }
    }

    pub fn ratio(&self) -> f64 {
        1.0 + self.delta / 6.0
    }

    /// Level index standing for the value zero.
    pub fn zero_level(&self) -> u32 {
        self.depth + 1
    }

    pub fn grid_value(&self, level: u32) -> f64 {
        if level > self.depth {
            0.0
        } else {
            // powf, not powi: LLVM may fold powi differently from its runtime
            // routine, and grid values must compare identically everywhere
            self.ratio().powf(-(level as f64))
        }
    }

    /// `t_J`, the smallest positive grid value.
    pub fn cutoff(&self) -> f64 {
        self.grid_value(self.depth)
    }

    /// Number of nondecreasing level assignments, `C(n + J + 1, n)`; an
    /// upper bound on the net size.
    pub fn profile_count_estimate(&self) -> f64 {
        binomial(self.n as u64 + self.depth as u64 + 1, self.n as u64)
    }

    /// Worst-case ℓ_q rounding distance into the net.
    pub fn density_bound(&self) -> f64 {
        let spread = if self.q.is_infinite() { 1.0 } else { (self.n as f64).powf(1.0 / self.q.value()) };
        (1.0 - 1.0 / self.ratio()) + self.cutoff() * spread
    }

    /// Largest grid point not above `x` (zero below the cutoff).
    pub fn round_down(&self, x: f64) -> u32 {
        if x <= 0.0 {
            return self.zero_level();
        }
        if x >= 1.0 {
            return 0;
        }
        let mut j = ((1.0 / x).ln() / self.ratio().ln()).ceil().max(0.0) as u32;
        while j > 0 && self.grid_value(j - 1) <= x {
            j -= 1;
        }
        while j <= self.depth && self.grid_value(j) > x {
            j += 1;
        }
        j.min(self.zero_level())
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A net point as a nondecreasing map from coordinates to levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelProfile {
    pub levels: Vec<u32>,
}

impl LevelProfile {
    pub fn decode(&self, params: &NetParams) -> Vec<f64> {
        self.levels.iter().map(|&l| params.grid_value(l)).collect()
    }

    /// Whether the profile is a point of `G(n, q, δ)`.
    pub fn is_member(&self, params: &NetParams) -> bool {
        self.levels.len() == params.n
            && self.levels.windows(2).all(|w| w[0] <= w[1])
            && self.levels.iter().all(|&l| l <= params.zero_level())
            && lp_norm(&self.decode(params), params.q) <= 1.0 + BALL_EPS
    }

    /// Rounds `x ∈ K_qⁿ` (nonincreasing, nonnegative) down to the net.
    pub fn round(params: &NetParams, x: &[f64]) -> Self {
        Self { levels: x.iter().map(|&v| params.round_down(v)).collect() }
    }
}

/// `‖v‖_q^q` for finite q; used for incremental ball checks.
struct PowerTable {
    pow: Vec<f64>,
    infinite: bool,
}

impl PowerTable {
    fn new(params: &NetParams) -> Self {
        let infinite = params.q.is_infinite();
        let pow = (0..=params.zero_level())
            .map(|l| {
                let v = params.grid_value(l);
                if infinite {
                    0.0
                } else {
                    v.powf(params.q.value())
                }
            })
            .collect();
        Self { pow, infinite }
    }

    #[inline]
    fn get(&self, level: u32) -> f64 {
        self.pow[level as usize]
    }
}

/// Lazy depth-first enumeration of the net in lexicographic level order.
///
/// With `maximal_only`, only points that are maximal under the coordinatewise
/// order are emitted, and subtrees that cannot contain such points are
/// skipped. The number of visited search nodes is capped by the budget.
pub struct NetIter {
    params: NetParams,
    table: PowerTable,
    maximal_only: bool,
    budget: u64,
    visited: u64,
    levels: Vec<u32>,
    /// `sums[k]` = power sum of the first `k` coordinates.
    sums: Vec<f64>,
    depth: usize,
    started: bool,
    done: bool,
}

/// Streams every point of `G(n, q, δ)`. Fails up front when the monotone
/// assignment count `C(n+J+1, n)` exceeds `budget`.
pub fn build_net(params: &NetParams, budget: u64) -> Result<NetIter> {
    let estimate = params.profile_count_estimate();
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    Ok(NetIter::new(*params, false, budget))
}

/// Streams the coordinatewise-maximal points of `G(n, q, δ)`. The budget
/// caps visited search nodes.
pub fn build_maximal_net(params: &NetParams, budget: u64) -> NetIter {
    NetIter::new(*params, true, budget)
}

impl NetIter {
    fn new(params: NetParams, maximal_only: bool, budget: u64) -> Self {
        let n = params.n;
        Self {
            table: PowerTable::new(&params),
            params,
            maximal_only,
            budget,
            visited: 0,
            levels: vec![0; n],
            sums: vec![0.0; n + 1],
            depth: 0,
            started: false,
            done: false,
        }
    }

    pub fn params(&self) -> &NetParams {
        &self.params
    }

    pub fn visited(&self) -> u64 {
        self.visited
    }

    fn fits(&self, sum: f64) -> bool {
        self.table.infinite || sum <= 1.0 + BALL_EPS
    }

    /// Whether a subtree rooted at a prefix of length `k` can hold a maximal
    /// point: the block of the last assigned level must be unable to move up.
    fn subtree_viable(&self, k: usize) -> bool {
        if !self.maximal_only || k == 0 {
            return true;
        }
        let last = self.levels[k - 1];
        if self.table.infinite {
            return last == 0;
        }
        if last == 0 || last == self.params.zero_level() {
            return true;
        }
        let remaining = (self.params.n - k) as f64;
        let best_sum = self.sums[k] + remaining * self.table.get(last);
        let raise = self.table.get(last - 1) - self.table.get(last);
        // final slack is at least 1 - best_sum; it must stay below `raise`
        1.0 - best_sum < raise + BALL_EPS
    }

    fn is_maximal(&self) -> bool {
        let n = self.params.n;
        let total = self.sums[n];
        let zero = self.params.zero_level();
        if self.table.infinite {
            // every coordinate must already sit at the top level
            return self.levels.iter().all(|&l| l == 0);
        }
        for i in 0..n {
            let l = self.levels[i];
            let starts_block = i == 0 || self.levels[i - 1] < l;
            if !starts_block || l == 0 {
                continue;
            }
            let up = if l == zero { self.params.depth } else { l - 1 };
            let raised = total - self.table.get(l) + self.table.get(up);
            if raised <= 1.0 + BALL_EPS {
                return false;
            }
        }
        true
    }

    /// Advances to the next complete assignment; false when exhausted.
    fn advance(&mut self) -> Result<bool> {
        let n = self.params.n;
        let zero = self.params.zero_level();
        // `depth` = number of assigned coordinates whose choice is being varied
        if !self.started {
            self.started = true;
            self.depth = 0;
            return self.descend(0, 0);
        }
        // backtrack: bump the deepest coordinate that can move
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(false);
            }
            k -= 1;
            let next = self.levels[k] + 1;
            if next <= zero && self.try_place(k, next)? {
                if self.descend(k + 1, self.levels[k])? {
                    return Ok(true);
                }
                // subtree exhausted; keep bumping at this depth
                k += 1;
                continue;
            }
        }
    }

    /// Places the smallest feasible level `>= from` at coordinate `k`.
    fn try_place(&mut self, k: usize, from: u32) -> Result<bool> {
        let zero = self.params.zero_level();
        let mut l = from;
        while l <= zero {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded { estimate: self.visited as f64, budget: self.budget });
            }
            let sum = self.sums[k] + self.table.get(l);
            if self.fits(sum) {
                self.levels[k] = l;
                self.sums[k + 1] = sum;
                if self.subtree_viable(k + 1) {
                    return Ok(true);
                }
            }
            l += 1;
        }
        Ok(false)
    }

    /// Fills coordinates `k..n` with the lexicographically first feasible
    /// completion, backtracking within the subtree as needed.
    fn descend(&mut self, k: usize, floor: u32) -> Result<bool> {
        let n = self.params.n;
        if k == n {
            return Ok(true);
        }
        if !self.try_place(k, floor)? {
            return Ok(false);
        }
        loop {
            if self.descend(k + 1, self.levels[k])? {
                return Ok(true);
            }
            let next = self.levels[k] + 1;
            if next > self.params.zero_level() || !self.try_place(k, next)? {
                return Ok(false);
            }
        }
    }

    /// Next profile, or an error once the budget is exhausted.
    pub fn next_profile(&mut self) -> Option<Result<LevelProfile>> {
        if self.done {
            return None;
        }
        loop {
            match self.advance() {
                Ok(true) => {
                    if !self.maximal_only || self.is_maximal() {
                        return Some(Ok(LevelProfile { levels: self.levels.clone() }));
                    }
                }
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

impl Iterator for NetIter {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        let params = self.params;
        self.next_profile().map(|r| r.map(|p| p.decode(&params)))
    }
}

/// Greedy ℓ_q cover: keeps a point only if no kept point lies within
/// `radius`. Every input point ends up within `radius` of the output.
pub struct GreedyCover {
    q: Exponent,
    radius: f64,
    centers: Vec<Vec<f64>>,
    last_hit: usize,
}

impl GreedyCover {
    pub fn new(q: Exponent, radius: f64) -> Self {
        Self { q, radius, centers: Vec::new(), last_hit: 0 }
    }

    fn within(&self, a: &[f64], b: &[f64]) -> bool {
        if self.q.is_infinite() {
            return a.iter().zip(b).all(|(x, y)| (x - y).abs() <= self.radius);
        }
        let q = self.q.value();
        let limit = self.radius.powf(q);
        let mut acc = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = (x - y).abs();
            acc += if q == 2.0 { d * d } else { d.powf(q) };
            if acc > limit {
                return false;
            }
        }
        true
    }

    /// Returns true when `p` was added as a new center.
    pub fn offer(&mut self, p: Vec<f64>) -> bool {
        if self.radius > 0.0 && !self.centers.is_empty() {
            if self.within(&p, &self.centers[self.last_hit]) {
                return false;
            }
            for idx in (0..self.centers.len()).rev() {
                if self.within(&p, &self.centers[idx]) {
                    self.last_hit = idx;
                    return false;
                }
            }
        }
        self.centers.push(p);
        self.last_hit = self.centers.len() - 1;
        true
    }

    pub fn into_centers(self) -> Vec<Vec<f64>> {
        self.centers
    }
}

/// Logarithm of the size bound `n^{2·ln(30/δ)/ln(1+δ/6)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetSizeBound {
    pub exponent: f64,
    /// Natural logarithm of the bound.
    pub log_value: f64,
}

pub fn net_size_bound(n: usize, delta: f64) -> Result<NetSizeBound> {
    if n < 2 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("net size bound needs n >= 2 and δ in (0,1), got n={n}, δ={delta}")));
    }
    let exponent = 2.0 * (30.0 / delta).ln() / (1.0 + delta / 6.0).ln();
    Ok(NetSizeBound { exponent, log_value: exponent * (n as f64).ln() })
}

/// Outcome of [`density_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub params: NetParams,
    pub trials: usize,
    pub max_distance: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Rounds random and adversarial points of `K_qⁿ` into the net and reports
/// the largest ℓ_q displacement. When the default cutoff fails, the check is
/// repeated once with the refined cutoff.
pub fn density_check(n: usize, q: Exponent, delta: f64, trials: usize, seed: u64, budget: u64) -> Result<DensityReport> {
    let params = NetParams::new(n, q, delta)?;
    let estimate = params.profile_count_estimate();
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let first = density_run(&params, trials, seed)?;
    if first.pass {
        return Ok(first);
    }
    density_run(&params.refined(), trials, seed)
}

fn density_run(params: &NetParams, trials: usize, seed: u64) -> Result<DensityReport> {
    let threshold = params.delta / 2.0;
    let mut worst: f64 = 0.0;
    let mut check = |x: &[f64]| -> Result<()> {
        let profile = LevelProfile::round(params, x);
        if !profile.is_member(params) {
            return Err(Error::Numerical(format!("rounded point {:?} left the net", profile.levels)));
        }
        let a = profile.decode(params);
        let diff: Vec<f64> = x.iter().zip(&a).map(|(u, v)| u - v).collect();
        worst = worst.max(lp_norm(&diff, params.q));
        Ok(())
    };
    for x in adversarial_points(params) {
        check(&x)?;
    }
    let mut rng = stream(seed, 0x6e6574);
    let mut x = vec![0.0; params.n];
    for t in 0..trials {
        sample_monotone_ball(params, t, &mut rng, &mut x);
        check(&x)?;
    }
    Ok(DensityReport { params: *params, trials, max_distance: worst, threshold, pass: worst <= threshold })
}

/// Projects a nonnegative vector into `K_qⁿ`: sort nonincreasing, rescale to
/// norm at most `radius`.
fn into_monotone_ball(x: &mut [f64], q: Exponent, radius: f64) {
    for v in x.iter_mut() {
        *v = v.abs();
    }
    x.sort_by(|a, b| b.total_cmp(a));
    let norm = lp_norm(x, q);
    if norm > 0.0 {
        let s = radius / norm;
        for v in x.iter_mut() {
            *v = (*v * s).min(1.0);
        }
    }
}

fn sample_monotone_ball<R: Rng + ?Sized>(params: &NetParams, t: usize, rng: &mut R, x: &mut [f64]) {
    let n = params.n;
    match t % 3 {
        0 => {
            // Dirichlet(1,…,1) weights on the q-sphere, random radius
            for v in x.iter_mut() {
                *v = -(1.0 - rng.random::<f64>()).ln();
            }
            let s: f64 = x.iter().sum();
            for v in x.iter_mut() {
                *v /= s;
                if !params.q.is_infinite() {
                    *v = v.powf(1.0 / params.q.value());
                }
            }
            let radius = rng.random::<f64>().powf(1.0 / n as f64);
            into_monotone_ball(x, params.q, radius);
        }
        1 => {
            // power-law entries: many coordinates near the zero cutoff
            let k: f64 = rng.random_range(1.0..12.0);
            for v in x.iter_mut() {
                *v = rng.random::<f64>().powf(k);
            }
            into_monotone_ball(x, params.q, 1.0);
        }
        _ => {
            // uniform in the cube, on the sphere when outside
            for v in x.iter_mut() {
                *v = rng.random::<f64>();
            }
            let norm = lp_norm(x, params.q);
            into_monotone_ball(x, params.q, norm.min(1.0));
        }
    }
}

/// Points that lose a full grid step (or fall just under the cutoff) in
/// every coordinate.
fn adversarial_points(params: &NetParams) -> Vec<Vec<f64>> {
    let n = params.n;
    let below = 1.0 - 1e-12;
    let mut out = Vec::new();
    let cutoff = params.cutoff();
    out.push(vec![cutoff * below; n]);
    for split in 0..=n {
        for level in [1, params.depth / 4, params.depth / 2, params.depth] {
            let level = level.min(params.depth);
            let mut x = vec![0.0; n];
            for (i, v) in x.iter_mut().enumerate() {
                *v = if i < split { params.grid_value(level.saturating_sub(1)) * below } else { cutoff * below };
            }
            let norm = lp_norm(&x, params.q);
            if norm > 1.0 {
                // shrink onto the sphere, then nudge below the grid again
                for v in x.iter_mut() {
                    *v /= norm;
                    let l = params.round_down(*v);
                    if l > 0 && l <= params.depth {
                        *v = params.grid_value(l - 1) * below;
                        if *v > 1.0 {
                            *v = 1.0;
                        }
                    }
                }
                let r = lp_norm(&x, params.q).min(1.0);
                into_monotone_ball(&mut x, params.q, r);
            }
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(params: &NetParams) -> Vec<LevelProfile> {
        let mut it = build_net(params, DEFAULT_BUDGET).unwrap();
        std::iter::from_fn(|| it.next_profile()).map(|r| r.unwrap()).collect()
    }

    fn collect_maximal(params: &NetParams) -> Vec<LevelProfile> {
        let mut it = build_maximal_net(params, DEFAULT_BUDGET);
        std::iter::from_fn(|| it.next_profile()).map(|r| r.unwrap()).collect()
    }

    #[test]
    fn one_dimensional_grid() {
        let p = NetParams::new(1, Exponent::INFINITY, 0.5).unwrap();
        assert_eq!(p.depth, 52);
        let pts: Vec<f64> = build_net(&p, DEFAULT_BUDGET).unwrap().map(|r| r.unwrap()[0]).collect();
        assert_eq!(pts.len(), 54);
        assert_eq!(pts[0], 1.0);
        assert_eq!(*pts.last().unwrap(), 0.0);
        for (j, v) in pts.iter().take(53).enumerate() {
            assert!((v - (13.0f64 / 12.0).powi(-(j as i32))).abs() < 1e-15);
        }
    }

    #[test]
    fn two_dimensional_cube_count() {
        let p = NetParams::new(2, Exponent::INFINITY, 0.5).unwrap();
        let all = collect(&p);
        assert_eq!(all.len(), 1485);
        assert_eq!(all.len() as f64, p.profile_count_estimate());
    }

    #[test]
    fn zero_vector_always_emitted() {
        for (n, q) in [(1, Exponent::TWO), (3, Exponent::ONE), (2, Exponent::INFINITY), (4, Exponent::new(1.5).unwrap())] {
            let p = NetParams::new(n, q, 0.9).unwrap();
            let zero = LevelProfile { levels: vec![p.zero_level(); n] };
            assert!(collect(&p).contains(&zero));
        }
    }

    #[test]
    fn emitted_points_are_members_in_lex_order() {
        for q in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
            let p = NetParams::new(3, q, 0.8).unwrap();
            let all = collect(&p);
            assert!(all.iter().all(|pr| pr.is_member(&p)));
            assert!(all.windows(2).all(|w| w[0].levels < w[1].levels));
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for q in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
            let p = NetParams::new(3, q, 0.9).unwrap();
            let z = p.zero_level();
            let mut brute = Vec::new();
            for a in 0..=z {
                for b in a..=z {
                    for c in b..=z {
                        let pr = LevelProfile { levels: vec![a, b, c] };
                        if pr.is_member(&p) {
                            brute.push(pr);
                        }
                    }
                }
            }
            assert_eq!(collect(&p), brute, "q={q}");
        }
    }

    #[test]
    fn maximal_enumeration_matches_filtering() {
        for q in [Exponent::ONE, Exponent::TWO, Exponent::new(3.0).unwrap(), Exponent::INFINITY] {
            for n in 1..=3 {
                let p = NetParams::new(n, q, 0.7).unwrap();
                let all = collect(&p);
                let dominated = |a: &LevelProfile| {
                    all.iter().any(|b| b != a && b.levels.iter().zip(&a.levels).all(|(x, y)| x <= y))
                };
                let expect: Vec<LevelProfile> = all.iter().filter(|a| !dominated(a)).cloned().collect();
                assert_eq!(collect_maximal(&p), expect, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn cube_collapses_to_all_ones() {
        let p = NetParams::new(5, Exponent::INFINITY, 0.25).unwrap();
        let m = collect_maximal(&p);
        assert_eq!(m, vec![LevelProfile { levels: vec![0; 5] }]);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let p = NetParams::new(3, Exponent::TWO, 0.6).unwrap();
        assert_eq!(collect(&p), collect(&p));
    }

    #[test]
    fn budget_is_enforced() {
        let p = NetParams::new(6, Exponent::TWO, 0.25).unwrap();
        match build_net(&p, 1000) {
            Err(Error::BudgetExceeded { estimate, budget }) => {
                assert_eq!(budget, 1000);
                assert!(estimate > 1e9);
            }
            _ => panic!("expected budget error"),
        }
        let mut it = build_maximal_net(&p, 50);
        let err = std::iter::from_fn(|| it.next_profile()).find_map(|r| r.err());
        assert!(matches!(err, Some(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn size_bound_values() {
        let b = net_size_bound(2, 0.5).unwrap();
        assert!((b.exponent - 102.3).abs() < 0.05, "{}", b.exponent);
        assert!((b.log_value - b.exponent * 2f64.ln()).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for d in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let v = net_size_bound(4, d).unwrap().log_value;
            assert!(v < prev);
            prev = v;
        }
        assert!(net_size_bound(1, 0.5).is_err());
    }

    #[test]
    fn enumerated_counts_within_size_bound() {
        for n in 2..=4 {
            for delta in [0.5, 0.75, 0.9] {
                for q in [Exponent::TWO, Exponent::INFINITY] {
                    let p = NetParams::new(n, q, delta).unwrap();
                    let count = collect(&p).len() as f64;
                    assert!(count.ln() <= net_size_bound(n, delta).unwrap().log_value);
                }
            }
        }
    }

    #[test]
    fn round_down_is_a_floor() {
        let p = NetParams::new(1, Exponent::TWO, 0.3).unwrap();
        for i in 0..2000 {
            let x = (i as f64 + 0.5) / 2000.0;
            let l = p.round_down(x);
            let v = p.grid_value(l);
            assert!(v <= x);
            if l > 0 {
                assert!(l == p.zero_level() && x < p.cutoff() || p.grid_value(l - 1) > x);
            }
        }
        assert_eq!(p.round_down(p.cutoff()), p.depth);
        assert_eq!(p.round_down(1.0), 0);
    }

    #[test]
    fn one_dimensional_density() {
        let r = density_check(1, Exponent::INFINITY, 0.5, 2000, 0, DEFAULT_BUDGET).unwrap();
        assert!(r.pass);
        assert!(r.max_distance <= 0.5 / 6.0 + 1e-12);
    }

    #[test]
    fn density_check_small_cases() {
        for q in [Exponent::TWO, Exponent::INFINITY] {
            let r = density_check(3, q, 0.5, 3000, 1, DEFAULT_BUDGET).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.max_distance <= r.params.density_bound());
        }
    }

    #[test]
    fn greedy_cover_covers() {
        let p = NetParams::new(3, Exponent::TWO, 0.5).unwrap();
        let pts: Vec<Vec<f64>> = build_net(&p, DEFAULT_BUDGET).unwrap().map(|r| r.unwrap()).collect();
        let mut cover = GreedyCover::new(Exponent::TWO, 0.1);
        for x in &pts {
            cover.offer(x.clone());
        }
        let centers = cover.into_centers();
        assert!(centers.len() < pts.len());
        for x in &pts {
            let d = centers
                .iter()
                .map(|c| lp_norm(&x.iter().zip(c).map(|(a, b)| a - b).collect::<Vec<_>>(), Exponent::TWO))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 0.1 + 1e-12);
        }
    }
}
