//! The test function `f(A) = det(I − AAᵀ)^p` on the operator-norm ball and
//! the singular-value form of its gradient norm.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{random_orthogonal, RealMatrix};

/// Slack on `s₁ ≤ 1` for roundoff in the singular values.
const BOUNDARY_SLACK: f64 = 1e-12;
const FORM_RTOL: f64 = 1e-10;
const FORM_ATOL: f64 = 1e-13;

fn identity_minus_gram(a: &RealMatrix) -> RealMatrix {
    let n = a.n();
    let gram = a.matmul(&a.transpose()).expect("square matrices of equal size");
    let mut out = RealMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, out.get(i, j) - gram.get(i, j));
        }
    }
    out
}

/// `det(I − AAᵀ)^p`, evaluated both as a determinant and as
/// `∏(1 − s_k²)^p`; the two must agree.
pub fn f_test(a: &RealMatrix, p: u32) -> Result<f64> {
    let s = a.singular_values();
    let s1 = s.largest();
    if s1 > 1.0 + BOUNDARY_SLACK {
        return Err(Error::Domain(format!("test function needs ‖A‖_op <= 1, got {s1}")));
    }
    let det = identity_minus_gram(a).determinant();
    let prod: f64 = s.values().iter().map(|v| (1.0 - v * v).max(0.0)).product();
    if (det - prod).abs() > FORM_RTOL * prod.abs() + FORM_ATOL {
        return Err(Error::Numerical(format!("det(I − AAᵀ) = {det} but ∏(1 − s²) = {prod}")));
    }
    Ok(prod.powi(p as i32))
}

/// `f` through the determinant alone; polynomial in the entries, used for
/// finite differences.
fn f_det(a: &RealMatrix, p: u32) -> f64 {
    identity_minus_gram(a).determinant().powi(p as i32)
}

/// `‖∇f(A)‖₂² = 4p²·∏(1 − s_r²)^{2p}·Σ s_k²/(1 − s_k²)²` for `s₁ < 1`.
pub fn grad_norm_sq(a: &RealMatrix, p: u32) -> Result<f64> {
    grad_norm_sq_from_singular(a.singular_values().values(), p)
}

pub(crate) fn grad_norm_sq_from_singular(s: &[f64], p: u32) -> Result<f64> {
    let pf = p as f64;
    let mut prod = 1.0;
    let mut sum = 0.0;
    for &v in s {
        let gap = 1.0 - v * v;
        if !(gap > 0.0) {
            return Err(Error::Domain(format!("gradient formula needs s₁ < 1, got {v}")));
        }
        prod *= gap;
        sum += v * v / (gap * gap);
    }
    Ok(4.0 * pf * pf * prod.powi(2 * p as i32) * sum)
}

/// Outcome of comparing the gradient formula with central differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheck {
    pub finite_difference: f64,
    pub closed: f64,
    pub rel_err: f64,
    /// Set when the spectrum is too close to degenerate or the boundary.
    pub skipped: Option<String>,
}

impl GradCheck {
    /// Relative error within `tol`; both sides below `1e-8` count as equal.
    pub fn passes(&self, tol: f64) -> bool {
        self.skipped.is_none()
            && (self.rel_err <= tol || (self.closed == 0.0 && self.finite_difference.abs() <= 1e-8))
    }
}

pub const MIN_SEPARATION: f64 = 1e-3;
pub const MAX_TOP_SINGULAR: f64 = 0.9;

/// `Σ_ij ((f(A + h·e_ij) − f(A − h·e_ij))/2h)²` against [`grad_norm_sq`].
pub fn grad_check(a: &RealMatrix, p: u32, h: f64) -> Result<GradCheck> {
    let s = a.singular_values();
    let vals = s.values();
    let closed = grad_norm_sq_from_singular(vals, p)?;
    let skipped = if s.largest() > MAX_TOP_SINGULAR {
        Some(format!("s₁ = {} exceeds {MAX_TOP_SINGULAR}", s.largest()))
    } else {
        vals.windows(2)
            .map(|w| w[0] - w[1])
            .find(|gap| *gap < MIN_SEPARATION)
            .map(|gap| format!("singular values only {gap:e} apart"))
    };
    let n = a.n();
    let mut probe = a.clone();
    let mut fd = 0.0;
    for i in 0..n {
        for j in 0..n {
            let orig = a.get(i, j);
            probe.set(i, j, orig + h);
            let plus = f_det(&probe, p);
            probe.set(i, j, orig - h);
            let minus = f_det(&probe, p);
            probe.set(i, j, orig);
            let d = (plus - minus) / (2.0 * h);
            fd += d * d;
        }
    }
    let rel_err = if closed > 0.0 { (fd - closed).abs() / closed } else { fd.abs() };
    Ok(GradCheck { finite_difference: fd, closed, rel_err, skipped })
}

/// `U·diag(s)·Vᵀ` with Haar-random `U, V` and sorted `s` drawn uniformly from
/// `[0, top]` until consecutive values are `separation` apart.
pub fn random_separated<R: Rng + ?Sized>(n: usize, top: f64, separation: f64, rng: &mut R) -> RealMatrix {
    let s = loop {
        let mut s: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * top).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        if s.windows(2).all(|w| w[0] - w[1] >= separation) {
            break s;
        }
    };
    let u = random_orthogonal(n, rng);
    let v = random_orthogonal(n, rng);
    let us = u.matmul(&RealMatrix::diag(&s)).expect("same size");
    us.matmul(&v.transpose()).expect("same size")
}

/// Summary of [`grad_check`] over random matrices with separated spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSweep {
    pub n: usize,
    pub p: u32,
    pub trials: usize,
    pub h: f64,
    pub tol: f64,
    pub max_rel_err: f64,
    pub failures: usize,
    pub pass: bool,
}

/// Runs `trials` checks on `random_separated(n, MAX_TOP_SINGULAR,
/// MIN_SEPARATION)` draws from `rng`.
pub fn gradient_sweep<R: Rng + ?Sized>(n: usize, p: u32, trials: usize, h: f64, tol: f64, rng: &mut R) -> Result<GradientSweep> {
    if n == 0 || p == 0 || trials == 0 {
        return Err(Error::InvalidInput(format!("need n, p, trials >= 1, got n={n}, p={p}, trials={trials}")));
    }
    if !(h > 0.0 && h < 1e-1) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("step h={h} must lie in (0, 0.1) and tol={tol} be positive")));
    }
    let mut max_rel_err: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..trials {
        let a = random_separated(n, MAX_TOP_SINGULAR, MIN_SEPARATION, rng);
        let r = grad_check(&a, p, h)?;
        max_rel_err = max_rel_err.max(r.rel_err);
        if !r.passes(tol) {
            failures += 1;
        }
    }
    Ok(GradientSweep { n, p, trials, h, tol, max_rel_err, failures, pass: failures == 0 })
}
