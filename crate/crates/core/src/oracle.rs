//! Weak membership oracles for symmetric convex bodies.
//!
//! A weak membership oracle answers, for a point `x` and tolerance `tol`,
//! either "x is within Euclidean distance `tol` of K" or "x is not
//! `tol`-deep inside K". Everything else in the diameter pipeline (norm
//! evaluation, separation, dual optimization) is built on top of this
//! interface plus a Euclidean sandwich `r·B₂ ⊆ K ⊆ R·B₂`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::gauge::{lp_norm, Exponent, SymmetricGauge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    AssertIn,
    AssertOut,
}

pub trait MembershipOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// One oracle call; implementations must bump their call counter by
    /// exactly one.
    fn query(&self, x: &[f64], tol: f64) -> Membership;

    fn calls(&self) -> u64;
}

/// Reference oracle for the unit ball of a symmetric gauge.
///
/// Answers `AssertIn` only for points that are `tol`-deep inside, which
/// resolves every boundary case as `AssertOut`: with `ν = ‖x‖_E` and outer
/// radius `R`, the answer is `AssertIn` iff `ν ≤ 1 − tol/R`.
#[derive(Debug)]
pub struct GaugeOracle {
    gauge: SymmetricGauge,
    outer_radius: f64,
    calls: AtomicU64,
}

pub fn oracle_from_gauge(g: &SymmetricGauge) -> GaugeOracle {
    let n = g.dim();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let u = g.eval_unchecked(&e1);
    GaugeOracle { gauge: g.clone(), outer_radius: (n as f64).sqrt() / u, calls: AtomicU64::new(0) }
}

impl GaugeOracle {
    pub fn gauge(&self) -> &SymmetricGauge {
        &self.gauge
    }
}

impl MembershipOracle for GaugeOracle {
    fn dim(&self) -> usize {
        self.gauge.dim()
    }

    fn query(&self, x: &[f64], tol: f64) -> Membership {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let nu = self.gauge.eval_unchecked(x);
        if nu.is_finite() && nu <= 1.0 - tol.max(0.0) / self.outer_radius {
            Membership::AssertIn
        } else {
            Membership::AssertOut
        }
    }

    fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Euclidean sandwich `r·B₂ ⊆ K ⊆ R·B₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBounds {
    inner: f64,
    outer: f64,
}

impl SandwichBounds {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner.is_finite() && outer.is_finite() && inner <= outer) {
            return Err(Error::InvalidInput(format!("invalid sandwich radii r={inner}, R={outer}")));
        }
        Ok(Self { inner, outer })
    }

    /// Sandwich of a symmetric norm with `‖e₁‖_E = u`, from Cauchy–Schwarz
    /// and 1-unconditionality: `B₂/(√n·u) ⊆ B_E ⊆ (√n/u)·B₂`.
    pub fn from_unit_norm(n: usize, u: f64) -> Result<Self> {
        let sqrt_n = (n as f64).sqrt();
        Self::new(1.0 / (sqrt_n * u), sqrt_n / u)
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }
}

/// Slack applied to the measured `‖e₁‖_E` when forming the sandwich.
pub const SANDWICH_SLACK: f64 = 1e-6;
const MAX_LOG_RANGE: f64 = 700.0;

/// Measures `u = ‖e₁‖_E` by bisection along `e₁` and returns
/// `r = 1/(√n·u·(1+δ₀))`, `R = √n·(1+δ₀)/u` with `δ₀ = 1e-6`.
///
/// The search is confined to `e^{-n^D} ≤ u ≤ e^{n^D}`; an oracle that never
/// accepts a point along `e₁` inside that range is rejected.
pub fn sandwich_from_unit_norm(o: &dyn MembershipOracle, big_d: u32) -> Result<SandwichBounds> {
    let n = o.dim();
    if n == 0 {
        return Err(Error::InvalidInput("oracle has dimension 0".into()));
    }
    let log_bound = (n as f64).powi(big_d.max(1) as i32).min(MAX_LOG_RANGE);
    let sqrt_n = (n as f64).sqrt();
    let mut probe = vec![0.0; n];
    // In iff the candidate t satisfies t >= u (probe e1/t inside the ball).
    let mut ask = |log_t: f64| {
        let t = log_t.exp();
        probe[0] = 1.0 / t;
        let tol = SANDWICH_SLACK / (8.0 * sqrt_n * t);
        o.query(&probe, tol)
    };
    let (mut lo, mut hi) = (-log_bound, log_bound);
    if ask(hi) == Membership::AssertOut {
        return Err(Error::OracleViolation(format!(
            "no point along e1 accepted: ‖e1‖ exceeds e^{log_bound}"
        )));
    }
    if ask(lo) == Membership::AssertIn {
        return Err(Error::OracleViolation(format!(
            "every point along e1 accepted: ‖e1‖ below e^-{log_bound}"
        )));
    }
    let target = (1.0 + SANDWICH_SLACK).ln() / 4.0;
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        match ask(mid) {
            Membership::AssertIn => hi = mid,
            Membership::AssertOut => lo = mid,
        }
    }
    let u = (0.5 * (lo + hi)).exp();
    SandwichBounds::new(1.0 / (sqrt_n * u * (1.0 + SANDWICH_SLACK)), sqrt_n * (1.0 + SANDWICH_SLACK) / u)
}

/// Approximates `‖x‖_K` to relative accuracy `δ` by geometric bisection on
/// `t` in the membership test `x/t ∈ K`.
///
/// Returns the estimate and the number of oracle calls used. The bracket
/// starts at `[‖x‖₂/R, ‖x‖₂/r]`, so the call count is
/// `O(log(log(R/r)/δ))`.
pub fn norm_eval_counted(
    o: &dyn MembershipOracle,
    b: &SandwichBounds,
    x: &[f64],
    delta: f64,
) -> Result<(f64, u64)> {
    if x.len() != o.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), got: x.len() });
    }
    check_finite(x)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("δ must lie in (0, 1), got {delta}")));
    }
    let len = lp_norm(x, Exponent::TWO);
    if len == 0.0 {
        return Err(Error::InvalidInput("norm evaluation at the origin".into()));
    }
    // Answers from a weak oracle at tolerance r·δ/4 pin ‖x/t‖ to within a
    // factor 1 ± δ/4 of the boundary.
    let tol = b.inner * delta / 4.0;
    let (shrink, grow) = (1.0 - delta / 4.0, 1.0 + delta / 4.0);
    let mut lo = len / b.outer;
    let mut hi = len / b.inner;
    let stop = (1.0 + delta).powi(2);
    let mut probe = vec![0.0; x.len()];
    let mut calls = 0;
    while hi / lo > stop {
        let t = (lo * hi).sqrt();
        for (p, v) in probe.iter_mut().zip(x) {
            *p = v / t;
        }
        calls += 1;
        match o.query(&probe, tol) {
            Membership::AssertIn => hi = hi.min(t * grow),
            Membership::AssertOut => lo = lo.max(t * shrink),
        }
        if calls > 200 {
            return Err(Error::OracleViolation("bisection failed to contract".into()));
        }
    }
    Ok(((lo * hi).sqrt(), calls))
}

pub fn norm_eval_from_membership(o: &dyn MembershipOracle, b: &SandwichBounds, x: &[f64], delta: f64) -> Result<f64> {
    norm_eval_counted(o, b, x, delta).map(|(v, _)| v)
}

/// Norm access used by the ellipsoid method: either a gauge evaluated
/// directly or a membership oracle behind bisection.
pub trait NormAccess: Sync {
    fn dim(&self) -> usize;

    /// Norm of `y`; adds the number of underlying evaluations/oracle calls
    /// to `calls`.
    fn norm(&self, y: &[f64], calls: &mut u64) -> Result<f64>;

    /// An exact subgradient at `y` if the access knows one.
    fn exact_subgradient(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Smallest relative accuracy the norm values are trusted to.
    fn accuracy(&self) -> f64 {
        0.0
    }

    /// Exact dual norm, when a closed form is known.
    fn closed_dual(&self, _a: &[f64]) -> Option<f64> {
        None
    }
}

impl NormAccess for SymmetricGauge {
    fn dim(&self) -> usize {
        SymmetricGauge::dim(self)
    }

    fn norm(&self, y: &[f64], calls: &mut u64) -> Result<f64> {
        *calls += 1;
        self.eval(y)
    }

    fn exact_subgradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.subgradient(y)
    }

    fn closed_dual(&self, a: &[f64]) -> Option<f64> {
        self.dual_eval_closed(a).ok()
    }
}

/// Hides a gauge's closed-form subgradient, forcing finite differences.
#[derive(Debug, Clone)]
pub struct EvaluationOnly<'a>(pub &'a SymmetricGauge);

impl NormAccess for EvaluationOnly<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn norm(&self, y: &[f64], calls: &mut u64) -> Result<f64> {
        *calls += 1;
        self.0.eval(y)
    }
}

/// Norm values computed from a membership oracle by bisection.
pub struct MembershipNorm<'a> {
    oracle: &'a dyn MembershipOracle,
    bounds: SandwichBounds,
    delta: f64,
}

impl<'a> MembershipNorm<'a> {
    pub fn new(oracle: &'a dyn MembershipOracle, bounds: SandwichBounds, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("δ must lie in (0, 1), got {delta}")));
        }
        Ok(Self { oracle, bounds, delta })
    }

    pub fn bounds(&self) -> SandwichBounds {
        self.bounds
    }
}

impl NormAccess for MembershipNorm<'_> {
    fn dim(&self) -> usize {
        self.oracle.dim()
    }

    fn norm(&self, y: &[f64], calls: &mut u64) -> Result<f64> {
        if y.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let (v, c) = norm_eval_counted(self.oracle, &self.bounds, y, self.delta)?;
        *calls += c;
        Ok(v)
    }

    fn accuracy(&self) -> f64 {
        self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, BoxMuller};
    use approx::assert_relative_eq;

    fn builtins(n: usize) -> Vec<SymmetricGauge> {
        let mut v = vec![
            SymmetricGauge::lp(n, Exponent::ONE).unwrap(),
            SymmetricGauge::lp(n, Exponent::TWO).unwrap(),
            SymmetricGauge::lp(n, Exponent::new(3.5).unwrap()).unwrap(),
            SymmetricGauge::lp(n, Exponent::INFINITY).unwrap(),
        ];
        for m in 1..=n.min(3) {
            v.push(SymmetricGauge::ky_fan(n, m).unwrap());
        }
        v
    }

    #[test]
    fn gauge_oracle_examples() {
        let g = SymmetricGauge::lp(3, Exponent::TWO).unwrap();
        let o = oracle_from_gauge(&g);
        assert_eq!(o.query(&[0.5, 0.0, 0.0], 1e-6), Membership::AssertIn);
        assert_eq!(o.query(&[2.0, 0.0, 0.0], 1e-6), Membership::AssertOut);
        // boundary point: deep-in convention rejects it
        assert_eq!(o.query(&[1.0, 0.0, 0.0], 1e-6), Membership::AssertOut);
        assert_eq!(o.calls(), 3);
    }

    #[test]
    fn sandwich_examples() {
        for n in [1, 2, 5, 8] {
            for g in [
                SymmetricGauge::lp(n, Exponent::INFINITY).unwrap(),
                SymmetricGauge::lp(n, Exponent::ONE).unwrap(),
                SymmetricGauge::ky_fan(n, n.min(2)).unwrap(),
            ] {
                let b = sandwich_from_unit_norm(&oracle_from_gauge(&g), 1).unwrap();
                let sqrt_n = (n as f64).sqrt();
                assert_relative_eq!(b.inner(), 1.0 / sqrt_n, max_relative = 1e-5);
                assert_relative_eq!(b.outer(), sqrt_n, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn sandwich_holds_along_random_directions() {
        let mut rng = stream(21, 0);
        let mut gauss = BoxMuller::new();
        for n in [2, 4, 7] {
            for g in builtins(n) {
                let o = oracle_from_gauge(&g);
                let b = sandwich_from_unit_norm(&o, 1).unwrap();
                let mut d = vec![0.0; n];
                for _ in 0..100 {
                    gauss.fill(&mut rng, &mut d);
                    let len = lp_norm(&d, Exponent::TWO);
                    let inside: Vec<f64> = d.iter().map(|v| v / len * b.inner() * 0.99).collect();
                    let outside: Vec<f64> = d.iter().map(|v| v / len * b.outer() * 1.01).collect();
                    assert_eq!(o.query(&inside, 1e-9), Membership::AssertIn, "{g}");
                    assert_eq!(o.query(&outside, 1e-9), Membership::AssertOut, "{g}");
                }
            }
        }
    }

    #[test]
    fn scaled_oracle_gets_scaled_sandwich() {
        let g = SymmetricGauge::custom(3, "3*l2", |x| 3.0 * lp_norm(x, Exponent::TWO)).unwrap();
        let b = sandwich_from_unit_norm(&oracle_from_gauge(&g), 1).unwrap();
        assert_relative_eq!(b.inner(), 1.0 / (3.0 * 3f64.sqrt()), max_relative = 1e-5);
    }

    #[test]
    fn degenerate_oracle_is_rejected() {
        struct Never;
        impl MembershipOracle for Never {
            fn dim(&self) -> usize {
                2
            }
            fn query(&self, _: &[f64], _: f64) -> Membership {
                Membership::AssertOut
            }
            fn calls(&self) -> u64 {
                0
            }
        }
        assert!(matches!(sandwich_from_unit_norm(&Never, 1), Err(Error::OracleViolation(_))));
    }

    #[test]
    fn norm_from_membership_examples() {
        let l2 = SymmetricGauge::lp(2, Exponent::TWO).unwrap();
        let o = oracle_from_gauge(&l2);
        let b = sandwich_from_unit_norm(&o, 1).unwrap();
        let v = norm_eval_from_membership(&o, &b, &[3.0, 4.0], 0.01).unwrap();
        assert!((4.95..=5.05).contains(&v), "{v}");

        let k2 = SymmetricGauge::ky_fan(3, 2).unwrap();
        let o = oracle_from_gauge(&k2);
        let b = sandwich_from_unit_norm(&o, 1).unwrap();
        let v = norm_eval_from_membership(&o, &b, &[1.0, 1.0, 1.0], 0.01).unwrap();
        assert!((1.98..=2.02).contains(&v), "{v}");

        assert!(matches!(norm_eval_from_membership(&o, &b, &[0.0; 3], 0.01), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn norm_from_membership_call_budget() {
        // geometric bisection needs about log2(ln(R/r)/δ) calls; at δ = 1e-6
        // and n = 8 that is ~22, well under 60.
        let mut rng = stream(22, 0);
        let mut gauss = BoxMuller::new();
        for g in builtins(8) {
            let o = oracle_from_gauge(&g);
            let b = sandwich_from_unit_norm(&o, 1).unwrap();
            let mut x = vec![0.0; 8];
            gauss.fill(&mut rng, &mut x);
            let (_, calls) = norm_eval_counted(&o, &b, &x, 1e-6).unwrap();
            assert!(calls <= 60, "{g}: {calls} calls");
        }
    }

    #[test]
    fn norm_from_membership_agrees_with_eval() {
        let mut rng = stream(23, 0);
        let mut gauss = BoxMuller::new();
        for n in [2, 5] {
            for g in builtins(n) {
                let o = oracle_from_gauge(&g);
                let b = sandwich_from_unit_norm(&o, 1).unwrap();
                let mut x = vec![0.0; n];
                for _ in 0..100 {
                    gauss.fill(&mut rng, &mut x);
                    for delta in [0.1, 1e-3] {
                        let est = norm_eval_from_membership(&o, &b, &x, delta).unwrap();
                        let exact = g.eval(&x).unwrap();
                        assert!((est - exact).abs() <= delta * exact, "{g}: {est} vs {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn call_counter_is_exact() {
        let g = SymmetricGauge::ky_fan(4, 2).unwrap();
        let o = oracle_from_gauge(&g);
        let b = SandwichBounds::from_unit_norm(4, 1.0).unwrap();
        let before = o.calls();
        let (_, used) = norm_eval_counted(&o, &b, &[1.0, -2.0, 0.5, 0.0], 1e-3).unwrap();
        assert_eq!(o.calls() - before, used);
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    for _ in 0..250 {
                        o.query(&[0.1, 0.0, 0.0, 0.0], 1e-9);
                    }
                });
            }
        });
        assert_eq!(o.calls() - before, used + 1000);
    }
}
