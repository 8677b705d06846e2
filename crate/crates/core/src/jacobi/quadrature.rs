//! Tensor Gauss–Legendre twins of the Jacobi integrals for `n ≤ 3`.
//!
//! Substituting `x = 1 − u²` per axis turns `dx/√(1 − x)` into `2·du`, so
//! every integrand becomes bounded. The kinks of `∏|x_i − x_j|` lie on the
//! diagonals `u_i = u_j`; splitting `[0,1]ⁿ` into the `n!` orderings and
//! mapping each onto the cube by `u_{σ(k)} = t₁⋯t_k` (Jacobian
//! `∏ t_k^{n−k}`) leaves a polynomial on every piece, which the rule
//! integrates exactly once its order is high enough.

use serde::{Deserialize, Serialize};

use super::closed::JacobiParams;
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 40;
pub const CHECK_ORDER: usize = 32;
/// Largest dimension the `n!·order^n` tensor rule is run at.
pub const MAX_DIM: u32 = 3;
const AGREEMENT: f64 = 1e-10;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Newton iteration on the three-term Legendre recurrence.
    pub fn gauss_legendre(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [−1, 1] to [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[m - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[m - 1 - i] = 0.5 * w;
        }
        Self { order, nodes, weights }
    }
}

/// Polynomial factor multiplying `V(x)·∏x^{2p−2}/√(1−x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrand {
    /// `∏x²`: the normaliser `Z_n(p)`.
    Z,
    /// `x_n·∏_{t<n}x_t²`: `Z·E[1/x_n]`.
    InvX,
    /// `x_{n−1}x_n·∏_{t<n−1}x_t²`: `Z·E[1/(x_{n−1}x_n)]`.
    Pair,
    /// `∏_{t<n}x_t²`: `Z·E[1/x_n²]`.
    InvXSq,
    /// The symmetric polynomial `P`: `Z·E[P/∏x²]`.
    Kadell,
}

impl Integrand {
    pub const ALL: [Integrand; 5] = [Integrand::Z, Integrand::InvX, Integrand::Pair, Integrand::InvXSq, Integrand::Kadell];

    fn factor(self, x: &[f64]) -> f64 {
        let n = x.len();
        let sq = |r: std::ops::Range<usize>| x[r].iter().map(|v| v * v).product::<f64>();
        match self {
            Integrand::Z => sq(0..n),
            Integrand::InvX => x[n - 1] * sq(0..n - 1),
            Integrand::Pair => x[n - 2] * x[n - 1] * sq(0..n - 2),
            Integrand::InvXSq => sq(0..n - 1),
            Integrand::Kadell => {
                let mut total = 0.0;
                for s in 0..n {
                    total += (0..n).filter(|&t| t != s).map(|t| x[t] * x[t]).product::<f64>();
                }
                for s in 0..n {
                    for t in (s + 1)..n {
                        let rest: f64 = (0..n).filter(|&k| k != s && k != t).map(|k| x[k] * x[k]).product();
                        total += 2.0 / 3.0 * x[s] * x[t] * rest;
                    }
                }
                total
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// `∫_{[0,1]ⁿ} V(x)·F(x)·∏ x^{2p−2}/√(1 − x) dx` with the given rule.
pub fn integrate(j: JacobiParams, kind: Integrand, rule: &QuadratureRule) -> Result<f64> {
    let n = j.n as usize;
    if j.n > MAX_DIM {
        return Err(Error::InvalidInput(format!("quadrature runs for n <= {MAX_DIM}, got n={n}")));
    }
    if kind == Integrand::Pair && n < 2 {
        return Err(Error::InvalidInput("the pair integrand needs n >= 2".into()));
    }
    let m = rule.order;
    let power = 2 * j.p as i32 - 2;
    let perms = permutations(n);
    let mut idx = vec![0usize; n];
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    for sigma in &perms {
        idx.iter_mut().for_each(|v| *v = 0);
        loop {
            let mut w = 1.0;
            let mut prod = 1.0;
            for k in 0..n {
                let t = rule.nodes[idx[k]];
                w *= rule.weights[idx[k]] * t.powi((n - 1 - k) as i32);
                prod *= t;
                u[sigma[k]] = prod;
            }
            for i in 0..n {
                x[i] = 1.0 - u[i] * u[i];
            }
            let mut vander = 1.0;
            for a in 0..n {
                for b in (a + 1)..n {
                    vander *= (x[a] - x[b]).abs();
                }
            }
            let weight: f64 = x.iter().map(|v| v.powi(power)).product();
            total += w * vander * weight * kind.factor(&x);

            // odometer over the tensor grid
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    Ok(total * 2f64.powi(n as i32))
}

/// A quadrature value with its lower-order check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureValue {
    pub value: f64,
    pub check: f64,
    pub rel_diff: f64,
}

fn converged(j: JacobiParams, kind: Integrand) -> Result<QuadratureValue> {
    let high = integrate(j, kind, &QuadratureRule::gauss_legendre(DEFAULT_ORDER))?;
    let low = integrate(j, kind, &QuadratureRule::gauss_legendre(CHECK_ORDER))?;
    let rel_diff = (high - low).abs() / high.abs().max(f64::MIN_POSITIVE);
    if rel_diff > AGREEMENT {
        return Err(Error::QuadratureNonConvergence { low: CHECK_ORDER, high: DEFAULT_ORDER, rel_diff });
    }
    Ok(QuadratureValue { value: high, check: low, rel_diff })
}

/// `Z_n(p)` by quadrature.
pub fn quadrature_z(j: JacobiParams) -> Result<QuadratureValue> {
    converged(j, Integrand::Z)
}

/// The expectation `∫F·V·∏x^{2p−2}/√(1−x) / Z_n(p)` for a non-`Z`
/// integrand; the check field holds the lower-order ratio.
pub fn quadrature_expectation(j: JacobiParams, kind: Integrand) -> Result<QuadratureValue> {
    let z = converged(j, Integrand::Z)?;
    let f = converged(j, kind)?;
    let value = f.value / z.value;
    let check = f.check / z.check;
    Ok(QuadratureValue { value, check, rel_diff: (value - check).abs() / value.abs() })
}

/// The Rayleigh quotient `4p²n·(E[1/x_n²] − E[1/x_n])` from quadrature
/// expectations, next to its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRayleigh {
    pub closed: f64,
    pub quadrature: f64,
    /// The same quotient from the lower-order rule.
    pub check: f64,
    pub rel_err: f64,
    pub pass: bool,
}

pub fn quadrature_rayleigh(j: JacobiParams) -> Result<QuadratureRayleigh> {
    use super::closed::{rayleigh_closed, to_f64};
    let sq = quadrature_expectation(j, Integrand::InvXSq)?;
    let inv = quadrature_expectation(j, Integrand::InvX)?;
    let scale = 4.0 * (j.p as f64).powi(2) * j.n as f64;
    let quadrature = scale * (sq.value - inv.value);
    let check = scale * (sq.check - inv.check);
    let closed = to_f64(&rayleigh_closed(j));
    let rel_err = (quadrature - closed).abs() / closed;
    Ok(QuadratureRayleigh { closed, quadrature, check, rel_err, pass: rel_err <= CERTIFY_RTOL })
}

/// Relative tolerance for quadrature against the closed forms.
pub const CERTIFY_RTOL: f64 = 1e-6;

/// One integral computed both ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCheck {
    pub integrand: Integrand,
    pub closed: f64,
    pub quadrature: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Every integrand that applies at `j` (the pair needs `n ≥ 2`): `Z` against
/// the Gamma product, the others as expectations against the rationals.
pub fn quadrature_certificate(j: JacobiParams) -> Result<Vec<QuadratureCheck>> {
    use super::closed::{aomoto_inv_x, aomoto_pair, inv_x_sq, kadell, selberg_z, to_f64};
    let mut out = Vec::new();
    for kind in Integrand::ALL {
        let (closed, quadrature) = match kind {
            Integrand::Z => (selberg_z(j), quadrature_z(j)?.value),
            Integrand::Pair if j.n < 2 => continue,
            Integrand::Pair => (to_f64(&aomoto_pair(j)?), quadrature_expectation(j, kind)?.value),
            Integrand::InvX => (to_f64(&aomoto_inv_x(j)), quadrature_expectation(j, kind)?.value),
            Integrand::InvXSq => (to_f64(&inv_x_sq(j)), quadrature_expectation(j, kind)?.value),
            Integrand::Kadell => (to_f64(&kadell(j)), quadrature_expectation(j, kind)?.value),
        };
        let rel_err = (quadrature - closed).abs() / closed.abs();
        out.push(QuadratureCheck { integrand: kind, closed, quadrature, rel_err, pass: rel_err <= CERTIFY_RTOL });
    }
    Ok(out)
}
