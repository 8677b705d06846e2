//! Symmetric norms on ℝⁿ.
//!
//! A symmetric gauge is a norm invariant under coordinate permutations and
//! sign changes. Applied to singular values it yields a unitarily invariant
//! matrix norm (see [`crate::matrix`]).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_finite, Error, Result};
use crate::rng::{stream, BoxMuller};

/// An ℓ_r exponent, `1 <= r <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(r: f64) -> Result<Self> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::InvalidInput(format!("exponent must lie in [1, ∞], got {r}")));
        }
        Ok(Exponent(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate: `1/r + 1/r' = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let value = match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            other => other.parse::<f64>().map_err(|_| Error::Parse {
                input: s.to_string(),
                token: t.to_string(),
            })?,
        };
        Exponent::new(value)
    }
}

// JSON has no infinity: finite exponents are numbers, ∞ is the string "inf".
impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> serde::Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// ℓ_r norm of `x`, computed with max-scaling so large or tiny entries do
/// not overflow.
pub fn lp_norm(x: &[f64], r: Exponent) -> f64 {
    let r = r.0;
    if r == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if r.is_infinite() || max == 0.0 {
        return max;
    }
    if r == 2.0 {
        let s: f64 = x.iter().map(|v| (v / max) * (v / max)).sum();
        return max * s.sqrt();
    }
    let s: f64 = x.iter().map(|v| (v.abs() / max).powf(r)).sum();
    max * s.powf(1.0 / r)
}

/// Sum of the `m` largest absolute entries.
pub fn ky_fan(x: &[f64], m: usize) -> f64 {
    if m >= x.len() {
        return x.iter().map(|v| v.abs()).sum();
    }
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    abs.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    abs[..m].iter().sum()
}

/// Nonincreasing rearrangement of the absolute values of `x`.
pub fn canonical(x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    // stable; ties keep their relative order
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

type NormFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// User-supplied symmetric norm.
#[derive(Clone)]
pub struct CustomNorm {
    name: String,
    eval: Arc<NormFn>,
}

impl CustomNorm {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNorm").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum GaugeFamily {
    Lp(Exponent),
    KyFan(usize),
    Custom(CustomNorm),
}

/// A symmetric norm `E = (ℝⁿ, ‖·‖_E)`.
#[derive(Debug, Clone)]
pub struct SymmetricGauge {
    dim: usize,
    family: GaugeFamily,
}

const CUSTOM_TRIALS: usize = 100;
const CUSTOM_RTOL: f64 = 1e-9;

impl SymmetricGauge {
    pub fn lp(dim: usize, r: Exponent) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self { dim, family: GaugeFamily::Lp(r) })
    }

    pub fn ky_fan(dim: usize, m: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        if m == 0 || m > dim {
            return Err(Error::InvalidInput(format!("Ky Fan index must lie in [1, {dim}], got {m}")));
        }
        Ok(Self { dim, family: GaugeFamily::KyFan(m) })
    }

    /// Wraps a user evaluator. The evaluator is tested on 100 random inputs
    /// for permutation/sign invariance, positive homogeneity, the triangle
    /// inequality and definiteness; any violation rejects the gauge.
    pub fn custom<F>(dim: usize, name: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::check_dim(dim)?;
        let norm = CustomNorm { name: name.into(), eval: Arc::new(eval) };
        validate_custom(dim, &norm)?;
        Ok(Self { dim, family: GaugeFamily::Custom(norm) })
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(())
    }

    /// Parses a descriptor such as `lp:2.0`, `lp:inf` or `kyfan:3`.
    pub fn parse(descriptor: &str, dim: usize) -> Result<Self> {
        let parse_err = |token: &str| Error::Parse { input: descriptor.to_string(), token: token.to_string() };
        let (kind, arg) = descriptor.trim().split_once(':').ok_or_else(|| parse_err(descriptor.trim()))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "lp" => {
                let r: Exponent = arg.parse().map_err(|e| match e {
                    Error::Parse { .. } => parse_err(arg.trim()),
                    other => other,
                })?;
                Self::lp(dim, r)
            }
            "kyfan" => {
                let m = arg.trim().parse::<usize>().map_err(|_| parse_err(arg.trim()))?;
                Self::ky_fan(dim, m)
            }
            _ => Err(parse_err(kind.trim())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &GaugeFamily {
        &self.family
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self.family, GaugeFamily::Custom(_))
    }

    /// Text descriptor; custom gauges render as `custom:<name>`.
    pub fn descriptor(&self) -> String {
        match &self.family {
            GaugeFamily::Lp(r) => format!("lp:{r}"),
            GaugeFamily::KyFan(m) => format!("kyfan:{m}"),
            GaugeFamily::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// Same norm with the simplest family label: `kyfan:1` is `lp:inf` and
    /// `kyfan:n` is `lp:1`.
    pub fn canonical_form(&self) -> SymmetricGauge {
        let family = match &self.family {
            GaugeFamily::KyFan(1) => GaugeFamily::Lp(Exponent::INFINITY),
            GaugeFamily::KyFan(m) if *m == self.dim => GaugeFamily::Lp(Exponent::ONE),
            other => other.clone(),
        };
        SymmetricGauge { dim: self.dim, family }
    }

    /// ‖x‖_E.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        check_finite(x)
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.family {
            GaugeFamily::Lp(r) => lp_norm(x, *r),
            GaugeFamily::KyFan(m) => ky_fan(x, *m),
            GaugeFamily::Custom(c) => (c.eval)(x),
        }
    }

    /// ‖x‖_{E*} = max over the unit ball of ⟨x, y⟩, for the built-in families.
    pub fn dual_eval_closed(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        match &self.family {
            GaugeFamily::Lp(r) => Ok(lp_norm(x, r.conjugate())),
            GaugeFamily::KyFan(m) => {
                let sup = lp_norm(x, Exponent::INFINITY);
                let l1 = lp_norm(x, Exponent::ONE);
                Ok(sup.max(l1 / *m as f64))
            }
            GaugeFamily::Custom(c) => Err(Error::UnsupportedClosedForm(format!(
                "the dual of custom gauge `{}`; use the ellipsoid evaluator",
                c.name
            ))),
        }
    }

    /// Exact subgradient `g` at `x != 0` for built-in families: `⟨g, x⟩ = ‖x‖_E`
    /// and `‖g‖_{E*} = 1`. `None` for custom gauges.
    pub fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let sign = |v: f64| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 };
        match &self.family {
            GaugeFamily::Lp(r) if r.0 == 1.0 => Some(x.iter().map(|&v| sign(v)).collect()),
            GaugeFamily::Lp(r) if r.is_infinite() => {
                let k = argmax_abs(x);
                let mut g = vec![0.0; n];
                g[k] = sign(x[k]);
                Some(g)
            }
            GaugeFamily::Lp(r) => {
                let norm = lp_norm(x, *r);
                if norm == 0.0 {
                    return Some(vec![0.0; n]);
                }
                Some(x.iter().map(|&v| sign(v) * (v.abs() / norm).powf(r.0 - 1.0)).collect())
            }
            GaugeFamily::KyFan(m) => {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
                let mut g = vec![0.0; n];
                for &i in &idx[..*m] {
                    g[i] = sign(x[i]);
                }
                Some(g)
            }
            GaugeFamily::Custom(_) => None,
        }
    }
}

impl fmt::Display for SymmetricGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n={})", self.descriptor(), self.dim)
    }
}

pub(crate) fn argmax_abs(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

fn validate_custom(dim: usize, norm: &CustomNorm) -> Result<()> {
    let mut rng = stream(0x5eed_9a09e, 0);
    let mut gauss = BoxMuller::new();
    let f = |x: &[f64]| (norm.eval)(x);
    let close = |a: f64, b: f64| (a - b).abs() <= CUSTOM_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let mut perm: Vec<usize> = (0..dim).collect();
    for trial in 0..CUSTOM_TRIALS {
        gauss.fill(&mut rng, &mut x);
        gauss.fill(&mut rng, &mut y);
        let fx = f(&x);
        if !fx.is_finite() || fx <= 0.0 {
            return Err(Error::NotSymmetric(format!("trial {trial}: value {fx} at a nonzero point")));
        }
        perm.shuffle(&mut rng);
        let moved: Vec<f64> = perm
            .iter()
            .map(|&j| if rng.random::<bool>() { -x[j] } else { x[j] })
            .collect();
        if !close(f(&moved), fx) {
            return Err(Error::NotSymmetric(format!("trial {trial}: not invariant under signed permutations")));
        }
        let t: f64 = rng.random_range(-3.0..3.0);
        let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
        if !close(f(&scaled), t.abs() * fx) {
            return Err(Error::NotSymmetric(format!("trial {trial}: not positively homogeneous")));
        }
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let fy = f(&y);
        if f(&sum) > (fx + fy) * (1.0 + CUSTOM_RTOL) {
            return Err(Error::NotSymmetric(format!("trial {trial}: triangle inequality fails")));
        }
    }
    let zero = vec![0.0; dim];
    if f(&zero) != 0.0 {
        return Err(Error::NotSymmetric("nonzero value at the origin".into()));
    }
    Ok(())
}
