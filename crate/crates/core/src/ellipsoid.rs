//! Dual-norm evaluation by the ellipsoid method.
//!
//! `‖a‖_{E*} = max { ⟨a, y⟩ : ‖y‖_E ≤ 1 }` is approximated by a deep-cut
//! ellipsoid method started from the outer sandwich ball. Infeasible centres
//! are cut with a (sub)gradient of the norm; feasible centres with the
//! objective. Every centre `c` with `⟨a, c⟩ > 0` also yields the feasible
//! point `c/‖c‖_E`, whose objective value is a lower bound, while the
//! ellipsoid always contains the optimiser, so
//! `⟨a, centre⟩ + √(aᵀQa)` is an upper bound. The run stops once the two
//! bounds are within a factor `1 + δ/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{lp_norm, Exponent};
use crate::oracle::{NormAccess, SandwichBounds};

/// Relative tolerances below this are rejected: iteration counts grow like
/// `n² log(1/δ)`.
pub const MIN_DELTA: f64 = 1e-4;
const FD_REL_STEP: f64 = 1e-5;
const EULER_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Separation {
    Feasible { norm: f64 },
    /// `⟨normal, y⟩ > offset`, while `⟨normal, z⟩ ≤ offset` (approximately)
    /// on the unit ball.
    Hyperplane { normal: Vec<f64>, offset: f64, norm: f64 },
}

/// Separates `y` from the unit ball when `‖y‖ > 1 + tol`.
///
/// The normal is the exact subgradient when the access provides one and a
/// central finite-difference gradient otherwise (step `1e-5·‖y‖₂`, retried
/// once at a tenth of that when Euler's identity `⟨∇‖y‖, y⟩ = ‖y‖` is off by
/// more than `1e-3`). Accesses with a nonzero [`NormAccess::accuracy`] use a
/// larger step and a slightly shallower cut.
pub fn separation_probe(access: &dyn NormAccess, y: &[f64], tol: f64, calls: &mut u64) -> Result<Separation> {
    let norm = access.norm(y, calls)?;
    separation_at(access, y, norm, tol, calls)
}

fn separation_at(access: &dyn NormAccess, y: &[f64], norm: f64, tol: f64, calls: &mut u64) -> Result<Separation> {
    if norm <= 1.0 + tol {
        return Ok(Separation::Feasible { norm });
    }
    if let Some(normal) = access.exact_subgradient(y) {
        return Ok(Separation::Hyperplane { normal, offset: 1.0, norm });
    }
    // With an inexact norm (relative error η) the difference quotient carries
    // error about η/h, so the step grows to √η and the cut is loosened.
    let eta = access.accuracy();
    let base = lp_norm(y, Exponent::TWO) * FD_REL_STEP.max(eta.sqrt());
    let mut attempt = fd_gradient(access, y, base, calls)?;
    let euler = |g: &[f64]| dot(g, y);
    if (euler(&attempt) - norm).abs() > EULER_TOL * norm {
        let retry = fd_gradient(access, y, base / 10.0, calls)?;
        if (euler(&retry) - norm).abs() <= (euler(&attempt) - norm).abs() {
            attempt = retry;
        }
    }
    // By homogeneity the supporting value of the gradient over the unit
    // ball is ⟨g, y⟩/‖y‖.
    let offset = euler(&attempt) / norm * (1.0 + 10.0 * eta.sqrt());
    Ok(Separation::Hyperplane { normal: attempt, offset, norm })
}

fn fd_gradient(access: &dyn NormAccess, y: &[f64], h: f64, calls: &mut u64) -> Result<Vec<f64>> {
    let mut probe = y.to_vec();
    let mut g = vec![0.0; y.len()];
    for i in 0..y.len() {
        probe[i] = y[i] + h;
        let plus = access.norm(&probe, calls)?;
        probe[i] = y[i] - h;
        let minus = access.norm(&probe, calls)?;
        probe[i] = y[i];
        g[i] = (plus - minus) / (2.0 * h);
    }
    Ok(g)
}

/// Result of one dual evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualEvalReport {
    pub value: f64,
    /// Feasible point with `⟨a, witness⟩ = value`.
    pub witness: Vec<f64>,
    /// Certified upper bound on the dual norm.
    pub upper_bound: f64,
    pub iterations: usize,
    pub oracle_calls: u64,
}

/// Iteration cap `4n(n+1)·ln(4R/(rδ)) + 64`.
pub fn iteration_cap(n: usize, bounds: &SandwichBounds, delta: f64) -> usize {
    let nf = n as f64;
    let log_term = (4.0 * bounds.outer() / (bounds.inner() * delta)).ln().max(1.0);
    (4.0 * nf * (nf + 1.0) * log_term).ceil() as usize + 64
}

/// Approximates `‖a‖_{E*}` within a factor `1 ± δ/2`.
pub fn eval_dual(a: &[f64], access: &dyn NormAccess, bounds: &SandwichBounds, delta: f64) -> Result<DualEvalReport> {
    let n = access.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    crate::error::check_finite(a)?;
    if !(MIN_DELTA..1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("δ must lie in [{MIN_DELTA}, 1), got {delta}")));
    }
    let a_len = lp_norm(a, Exponent::TWO);
    if a_len == 0.0 {
        return Err(Error::InvalidInput("dual evaluation at the zero functional".into()));
    }
    let cap = iteration_cap(n, bounds, delta);
    let target = 1.0 + delta / 2.0;
    let mut state = Ellipsoid::ball(n, bounds.outer());
    let mut calls = 0u64;
    let mut best = 0.0_f64;
    let mut witness = vec![0.0; n];
    let mut upper = bounds.outer() * a_len;
    let mut qa = vec![0.0; n];

    for iteration in 0..cap {
        let c = state.center.clone();
        let ac = dot(a, &c);
        let norm = if c.iter().all(|v| *v == 0.0) { 0.0 } else { access.norm(&c, &mut calls)? };
        if ac > 0.0 && norm > 0.0 && ac / norm > best {
            best = ac / norm;
            witness = c.iter().map(|v| v / norm).collect();
        }
        if best > 0.0 && upper <= best * target {
            return Ok(DualEvalReport { value: best, witness, upper_bound: upper, iterations: iteration, oracle_calls: calls });
        }

        let (normal, depth) = if norm <= 1.0 {
            // keep ⟨a, y⟩ ≥ best
            let neg: Vec<f64> = a.iter().map(|v| -v).collect();
            (neg, best - ac)
        } else {
            match separation_at(access, &c, norm, 0.0, &mut calls)? {
                Separation::Hyperplane { normal, offset, .. } => {
                    let d = dot(&normal, &c) - offset;
                    (normal, d)
                }
                Separation::Feasible { .. } => unreachable!("norm > 1 is never feasible at tol 0"),
            }
        };
        let width = state.width_along(&normal);
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Conditioning { iteration });
        }
        let alpha = (depth / width).max(0.0);
        if alpha >= 1.0 {
            if norm <= 1.0 {
                // the objective cut removes the whole ellipsoid: best is optimal
                return Ok(DualEvalReport { value: best, witness, upper_bound: best, iterations: iteration + 1, oracle_calls: calls });
            }
            return Err(Error::Numerical(format!(
                "separating cut at iteration {iteration} excludes the whole ellipsoid"
            )));
        }
        state.cut(&normal, alpha, width);
        if !state.is_positive_definite() {
            return Err(Error::Conditioning { iteration });
        }
        state.mul_shape(a, &mut qa);
        let ub = dot(a, &state.center) + dot(a, &qa).max(0.0).sqrt();
        upper = upper.min(ub);
    }
    let gap = if best > 0.0 { upper / best - 1.0 } else { f64::INFINITY };
    Err(Error::Convergence { iterations: cap, gap })
}

/// `{x : (x − c)ᵀ Q⁻¹ (x − c) ≤ 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: Vec<f64>,
    shape: Vec<f64>,
    n: usize,
}

impl Ellipsoid {
    pub fn ball(n: usize, radius: f64) -> Self {
        let mut shape = vec![0.0; n * n];
        for i in 0..n {
            shape[i * n + i] = radius * radius;
        }
        Self { center: vec![0.0; n], shape, n }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    fn mul_shape(&self, g: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            out[i] = dot(&self.shape[i * n..(i + 1) * n], g);
        }
    }

    /// `√(gᵀQg)`, the half-width of the support in direction `g`.
    pub fn width_along(&self, g: &[f64]) -> f64 {
        let mut qg = vec![0.0; self.n];
        self.mul_shape(g, &mut qg);
        dot(g, &qg).sqrt()
    }

    /// Minimum-volume ellipsoid containing `self ∩ {y : gᵀy ≤ gᵀc − α·√(gᵀQg)}`.
    fn cut(&mut self, g: &[f64], alpha: f64, width: f64) {
        let n = self.n;
        let nf = n as f64;
        let mut b = vec![0.0; n];
        self.mul_shape(g, &mut b);
        for v in b.iter_mut() {
            *v /= width;
        }
        let step = (1.0 + nf * alpha) / (nf + 1.0);
        for (c, bi) in self.center.iter_mut().zip(&b) {
            *c -= step * bi;
        }
        if n == 1 {
            let f = 0.5 * (1.0 - alpha);
            self.shape[0] *= f * f;
            return;
        }
        let scale = nf * nf * (1.0 - alpha * alpha) / (nf * nf - 1.0);
        let rank_one = 2.0 * (1.0 + nf * alpha) / ((nf + 1.0) * (1.0 + alpha));
        for i in 0..n {
            for j in 0..n {
                self.shape[i * n + j] = scale * (self.shape[i * n + j] - rank_one * b[i] * b[j]);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.shape[i * n + j] + self.shape[j * n + i]);
                self.shape[i * n + j] = avg;
                self.shape[j * n + i] = avg;
            }
        }
    }

    fn is_positive_definite(&self) -> bool {
        cholesky_ok(&self.shape, self.n)
    }
}

fn cholesky_ok(m: &[f64], n: usize) -> bool {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::SymmetricGauge;
    use crate::oracle::{oracle_from_gauge, sandwich_from_unit_norm, EvaluationOnly, MembershipNorm};
    use crate::rng::{stream, BoxMuller};

    fn bounds_for(g: &SymmetricGauge) -> SandwichBounds {
        sandwich_from_unit_norm(&oracle_from_gauge(g), 1).unwrap()
    }

    #[test]
    fn probe_examples() {
        let linf = SymmetricGauge::lp(3, Exponent::INFINITY).unwrap();
        let mut calls = 0;
        let sep = separation_probe(&linf, &[2.0, 0.0, 0.0], 0.0, &mut calls).unwrap();
        assert_eq!(sep, Separation::Hyperplane { normal: vec![1.0, 0.0, 0.0], offset: 1.0, norm: 2.0 });

        let l2 = SymmetricGauge::lp(3, Exponent::TWO).unwrap();
        let sep = separation_probe(&l2, &[0.1, 0.2, -0.3], 1e-9, &mut calls).unwrap();
        assert!(matches!(sep, Separation::Feasible { .. }));

        let k2 = SymmetricGauge::ky_fan(3, 2).unwrap();
        match separation_probe(&k2, &[2.0, 2.0, 0.0], 0.0, &mut calls).unwrap() {
            Separation::Hyperplane { normal, offset, .. } => {
                assert_eq!(normal, vec![1.0, 1.0, 0.0]);
                assert_eq!(offset, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kyfan_normal_supports_the_ball() {
        // ⟨(1,1,0), z⟩ ≤ 1 over a grid of the K₂ ball (the offset of the cut)
        let k2 = SymmetricGauge::ky_fan(3, 2).unwrap();
        let steps = 60;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let z = [i, j, k].map(|t| -1.0 + 2.0 * t as f64 / steps as f64);
                    if k2.eval(&z).unwrap() <= 1.0 {
                        best = best.max(z[0] + z[1]);
                    }
                }
            }
        }
        assert!(best <= 1.0 + 1e-12, "{best}");
    }

    #[test]
    fn finite_difference_normal_matches_exact() {
        let k2 = SymmetricGauge::ky_fan(4, 2).unwrap();
        let y = [2.0, -1.5, 0.3, 0.1];
        let mut calls = 0;
        let sep = separation_probe(&EvaluationOnly(&k2), &y, 0.0, &mut calls).unwrap();
        let Separation::Hyperplane { normal, offset, .. } = sep else { panic!() };
        for (g, e) in normal.iter().zip([1.0, -1.0, 0.0, 0.0]) {
            assert!((g - e).abs() < 1e-6);
        }
        assert!((offset - 1.0).abs() < 1e-6);
        assert_eq!(calls, 1 + 8);
    }

    #[test]
    fn eval_dual_examples() {
        let l1 = SymmetricGauge::lp(3, Exponent::ONE).unwrap();
        let r = eval_dual(&[1.0, -2.0, 3.0], &l1, &bounds_for(&l1), 0.1).unwrap();
        assert!((2.85..=3.15).contains(&r.value), "{r:?}");

        let k2 = SymmetricGauge::ky_fan(3, 2).unwrap();
        let r = eval_dual(&[1.0, 1.0, 1.0], &k2, &bounds_for(&k2), 0.1).unwrap();
        assert!((1.425..=1.575).contains(&r.value), "{r:?}");

        let mut rng = stream(31, 0);
        let mut gauss = BoxMuller::new();
        for n in 1..=6 {
            let l2 = SymmetricGauge::lp(n, Exponent::TWO).unwrap();
            let mut a = vec![0.0; n];
            gauss.fill(&mut rng, &mut a);
            let r = eval_dual(&a, &l2, &bounds_for(&l2), 0.05).unwrap();
            let exact = lp_norm(&a, Exponent::TWO);
            assert!((r.value - exact).abs() <= 0.025 * exact, "n={n}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn report_invariants() {
        let k3 = SymmetricGauge::ky_fan(5, 3).unwrap();
        let a = [0.4, -1.0, 2.0, 0.0, 0.7];
        let r = eval_dual(&a, &k3, &bounds_for(&k3), 0.1).unwrap();
        assert!(dot(&a, &r.witness) <= r.value * (1.0 + 1e-12));
        assert!(k3.eval(&r.witness).unwrap() <= 1.0 + 0.05);
        assert!(r.value <= r.upper_bound);
        assert!(r.iterations <= iteration_cap(5, &bounds_for(&k3), 0.1));
    }

    #[test]
    fn eval_dual_through_membership_only() {
        let k2 = SymmetricGauge::ky_fan(4, 2).unwrap();
        let oracle = oracle_from_gauge(&k2);
        let bounds = sandwich_from_unit_norm(&oracle, 1).unwrap();
        let access = MembershipNorm::new(&oracle, bounds, 1e-8).unwrap();
        let a = [1.0, 2.0, -0.5, 0.25];
        let r = eval_dual(&a, &access, &bounds, 0.1).unwrap();
        let exact = k2.dual_eval_closed(&a).unwrap();
        assert!((r.value - exact).abs() <= 0.05 * exact, "{} vs {exact}", r.value);
        assert!(r.oracle_calls > 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let l2 = SymmetricGauge::lp(2, Exponent::TWO).unwrap();
        let b = bounds_for(&l2);
        assert!(matches!(eval_dual(&[0.0, 0.0], &l2, &b, 0.1), Err(Error::InvalidInput(_))));
        assert!(matches!(eval_dual(&[1.0, 0.0], &l2, &b, 1e-5), Err(Error::InvalidInput(_))));
        assert!(matches!(eval_dual(&[1.0], &l2, &b, 0.1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn one_dimensional_case() {
        // for n = 1 the searched range for ‖e1‖ is [1/e, e]
        let g = SymmetricGauge::custom(1, "2.5|x|", |x| 2.5 * x[0].abs()).unwrap();
        let b = bounds_for(&g);
        let r = eval_dual(&[-2.0], &g, &b, 0.01).unwrap();
        assert!((r.value - 0.8).abs() <= 0.005 * 0.8, "{r:?}");
    }
}
