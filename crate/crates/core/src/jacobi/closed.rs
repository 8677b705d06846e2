//! Exact values of the Jacobi-ensemble integrals behind the Rayleigh
//! quotient of `det(I − AAᵀ)^p` on the operator-norm ball.
//!
//! All expectations are under the density on `[0,1]ⁿ` proportional to
//! `V(x)·∏ x_r^{2p}/√(1 − x_r)`, `V` the Vandermonde product `∏_{i<j}|x_i − x_j|`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Dimension `n ≥ 1` and integer exponent `p ≥ 1` of the test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: u32,
    pub p: u32,
}

impl JacobiParams {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput(format!("need n >= 1 and integer p >= 1, got n={n}, p={p}")));
        }
        Ok(Self { n, p })
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `pn²(4p+n)² / (2(2p−1)(4p+1))`.
pub fn rayleigh_closed(j: JacobiParams) -> BigRational {
    let (n, p) = (j.n as i64, j.p as i64);
    int(p * n * n) * int(4 * p + n) * int(4 * p + n) / (int(2 * (2 * p - 1)) * int(4 * p + 1))
}

/// `E[1/x_n] = (4p+n)/(4p)`.
pub fn aomoto_inv_x(j: JacobiParams) -> BigRational {
    let (n, p) = (j.n as i64, j.p as i64);
    ratio(4 * p + n, 4 * p)
}

/// `E[1/(x_{n−1}x_n)] = (4p+n)(4p+n+1)/(4p(4p+1))`, defined for `n ≥ 2`.
pub fn aomoto_pair(j: JacobiParams) -> Result<BigRational> {
    if j.n < 2 {
        return Err(Error::InvalidInput("the pair expectation needs n >= 2".into()));
    }
    let (n, p) = (j.n as i64, j.p as i64);
    Ok(int(4 * p + n) * int(4 * p + n + 1) / (int(4 * p) * int(4 * p + 1)))
}

/// `E[P(x)/∏x_r²] = n(n+2)(4p+n)(4p+n−2)/(24p(2p−1))` for the symmetric
/// polynomial `P = Σ_s ∏_{t≠s} x_t² + (2/3)·Σ_{s<t} x_s x_t ∏_{k≠s,t} x_k²`.
pub fn kadell(j: JacobiParams) -> BigRational {
    let (n, p) = (j.n as i64, j.p as i64);
    int(n) * int(n + 2) * int(4 * p + n) * int(4 * p + n - 2) / (int(24 * p) * int(2 * p - 1))
}

/// `E[1/x_n²]`, from [`kadell`] and [`aomoto_pair`]:
/// `(n+2)(4p+n)(4p+n−2)/(24p(2p−1)) − (n−1)(4p+n)(4p+n+1)/(12p(4p+1))`.
pub fn inv_x_sq(j: JacobiParams) -> BigRational {
    let (n, p) = (j.n as i64, j.p as i64);
    let first = int(n + 2) * int(4 * p + n) * int(4 * p + n - 2) / (int(24 * p) * int(2 * p - 1));
    let second = int(n - 1) * int(4 * p + n) * int(4 * p + n + 1) / (int(12 * p) * int(4 * p + 1));
    first - second
}

/// `4p²n·(E[1/x_n²] − E[1/x_n])`, which must equal [`rayleigh_closed`].
pub fn rayleigh_from_expectations(j: JacobiParams) -> BigRational {
    let (n, p) = (j.n as i64, j.p as i64);
    int(4 * p * p * n) * (inv_x_sq(j) - aomoto_inv_x(j))
}

/// The normalising constant
/// `Z_n(p) = n!/π^{n/2} ∏_{s=1}^n Γ(2p+(s+1)/2)·Γ(s/2)² / Γ(2p+(n+s+1)/2)`.
pub fn selberg_z(j: JacobiParams) -> f64 {
    selberg_z_ln(j).exp()
}

pub fn selberg_z_ln(j: JacobiParams) -> f64 {
    let n = j.n as f64;
    let two_p = 2.0 * j.p as f64;
    let mut acc = ln_gamma(n + 1.0) - 0.5 * n * std::f64::consts::PI.ln();
    for s in 1..=j.n {
        let s = s as f64;
        acc += ln_gamma(two_p + 0.5 * (s + 1.0)) + 2.0 * ln_gamma(0.5 * s) - ln_gamma(two_p + 0.5 * (n + s + 1.0));
    }
    acc
}

/// Brute-force minimiser of `p ↦ rayleigh_closed(n, p)` over `1 ≤ p ≤ 10n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSelection {
    pub n: u32,
    pub argmin_p: u32,
    pub min_value: f64,
    /// `argmin_p ∈ [n/4, 4n]`.
    pub argmin_in_band: bool,
    /// `min_value/n³ ∈ [1/4, 4]`.
    pub value_in_band: bool,
    /// Both bands hold; always true for `n = 1`, which is report-only.
    pub pass: bool,
}

pub fn p_selection(n: u32) -> Result<PSelection> {
    let first = JacobiParams::new(n, 1)?;
    let mut best_p = 1;
    let mut best = rayleigh_closed(first);
    for p in 2..=10 * n {
        let v = rayleigh_closed(JacobiParams { n, p });
        if v < best {
            best = v;
            best_p = p;
        }
    }
    let nf = n as f64;
    let min_value = to_f64(&best);
    let argmin_in_band = (best_p as f64) >= nf / 4.0 && (best_p as f64) <= 4.0 * nf;
    let scaled = min_value / nf.powi(3);
    let value_in_band = (0.25..=4.0).contains(&scaled);
    Ok(PSelection {
        n,
        argmin_p: best_p,
        min_value,
        argmin_in_band,
        value_in_band,
        pass: n < 2 || (argmin_in_band && value_in_band),
    })
}

/// Exact comparison of [`rayleigh_from_expectations`] with [`rayleigh_closed`]
/// over a grid of parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub max_n: u32,
    pub max_p: u32,
    pub checked: u64,
    /// `(n, p)` pairs where the two rationals differ.
    pub mismatches: Vec<(u32, u32)>,
    pub pass: bool,
}

pub fn identity_sweep(max_n: u32, max_p: u32) -> Result<IdentitySweep> {
    JacobiParams::new(max_n, max_p)?;
    let mut mismatches = Vec::new();
    for n in 1..=max_n {
        for p in 1..=max_p {
            let j = JacobiParams { n, p };
            if rayleigh_from_expectations(j) != rayleigh_closed(j) {
                mismatches.push((n, p));
            }
        }
    }
    let pass = mismatches.is_empty();
    Ok(IdentitySweep { max_n, max_p, checked: max_n as u64 * max_p as u64, mismatches, pass })
}

/// `Γ(a)Γ(1/2)/Γ(a+1/2)` for integer `a ≥ 1`, by the recurrence
/// `B(k+1, 1/2) = B(k, 1/2)·k/(k+1/2)` from `B(1, 1/2) = 2`; exact rational
/// arithmetic for the cross-checks in tests.
pub fn beta_half(a: u32) -> BigRational {
    let mut b = int(2);
    for k in 1..a as i64 {
        b *= ratio(2 * k, 2 * k + 1);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(n: u32, p: u32) -> JacobiParams {
        JacobiParams::new(n, p).unwrap()
    }

    #[test]
    fn consistency_identity_is_exact() {
        for n in 1..=30 {
            for p in 1..=30 {
                assert_eq!(rayleigh_from_expectations(jp(n, p)), rayleigh_closed(jp(n, p)), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn rayleigh_examples() {
        assert_eq!(rayleigh_closed(jp(1, 1)), ratio(5, 2));
        assert_eq!(rayleigh_closed(jp(2, 1)), ratio(72, 5));
        assert_eq!(rayleigh_closed(jp(2, 2)), ratio(800, 54));
        assert_eq!(rayleigh_closed(jp(10, 10)), ratio(10 * 100 * 2500, 2 * 19 * 41));
        // p = n gives 25n⁵/(2(2n−1)(4n+1))
        for n in 1..20i64 {
            let expect = ratio(25 * n.pow(5), 2 * (2 * n - 1) * (4 * n + 1));
            assert_eq!(rayleigh_closed(jp(n as u32, n as u32)), expect);
        }
    }

    #[test]
    fn one_dimensional_values() {
        // Beta(a, 1/2) ratios
        for p in 1..8 {
            let inv_x = beta_half(2 * p) / beta_half(2 * p + 1);
            assert_eq!(aomoto_inv_x(jp(1, p)), inv_x);
            let kad = beta_half(2 * p - 1) / beta_half(2 * p + 1);
            assert_eq!(kadell(jp(1, p)), kad);
            assert_eq!(inv_x_sq(jp(1, p)), kad);
        }
        assert_eq!(kadell(jp(1, 1)), ratio(15, 8));
        assert_eq!(inv_x_sq(jp(1, 1)), ratio(15, 8));
    }

    #[test]
    fn selberg_one_dimensional() {
        assert!((selberg_z(jp(1, 1)) - 16.0 / 15.0).abs() < 1e-14);
        for p in 1..20 {
            let oracle = to_f64(&beta_half(2 * p + 1));
            let z = selberg_z(jp(1, p));
            assert!((z - oracle).abs() <= 1e-12 * oracle, "p={p}: {z} vs {oracle}");
        }
    }

    #[test]
    fn pair_needs_two_dimensions() {
        assert!(aomoto_pair(jp(1, 1)).is_err());
        assert_eq!(aomoto_pair(jp(2, 1)).unwrap(), ratio(6 * 7, 4 * 5));
    }

    #[test]
    fn p_selection_small() {
        let s = p_selection(10).unwrap();
        assert!((3..=40).contains(&s.argmin_p));
        assert!(s.pass);
        let one = p_selection(1).unwrap();
        assert!(one.pass);
        assert!(one.min_value >= 2.5 - 1e-12 || one.argmin_p > 1);
        assert!(JacobiParams::new(0, 1).is_err());
    }

    #[test]
    fn identity_sweep_small_grid() {
        let r = identity_sweep(12, 9).unwrap();
        assert!(r.pass && r.checked == 108 && r.mismatches.is_empty());
        assert!(identity_sweep(0, 3).is_err());
    }
}
