//! Order estimates for unitary ideals `S_Eⁿ`.
//!
//! The separation modulus is of order `√n·‖Id_n‖·diam(B)`, where the matrix
//! ball's Hilbert–Schmidt diameter equals the ℓ₂ diameter of `B_E`, and the
//! Dirichlet spectral gap of the unit ball is of order `n³·‖Id_n‖²`. Both are
//! two-sided estimates up to unspecified universal constants; the values
//! returned here are the representatives, not the quantities themselves.

use serde::{Deserialize, Serialize};

use crate::diameter::{alg_p_gauge, closed_form_diam, AlgOptions};
use crate::error::{Error, Result};
use crate::gauge::{Exponent, GaugeFamily, SymmetricGauge};
use crate::matrix::identity_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamMode {
    ClosedForm,
    /// The net-plus-ellipsoid algorithm at the given tolerance.
    AlgP,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SepReport {
    /// `√n · identity_norm · diam_value`, valid up to universal constants.
    pub estimate: f64,
    pub identity_norm: f64,
    pub diam_value: f64,
    pub diam_source: DiamMode,
    pub regime_label: String,
}

/// Separation-modulus representative of `S_Eⁿ`, `n = g.dim()`.
///
/// `delta` is only used by [`DiamMode::AlgP`].
pub fn sep_estimate(g: &SymmetricGauge, mode: DiamMode, delta: f64, opts: &AlgOptions) -> Result<SepReport> {
    // Ky Fan 1 and n are ℓ∞ and ℓ₁: one parametrisation gives one answer
    let g = g.canonical_form();
    let n = g.dim();
    let id = identity_norm(&g);
    let diam = match mode {
        DiamMode::ClosedForm => closed_form_diam(&g, Exponent::TWO)?,
        DiamMode::AlgP => alg_p_gauge(&g, Exponent::TWO, delta, opts)?.value,
    };
    let regime_label = match g.family() {
        GaugeFamily::KyFan(m) => kyfan_regime(n, *m)?.label.to_string(),
        GaugeFamily::Lp(r) if r.is_infinite() => "operator".into(),
        GaugeFamily::Lp(r) if *r == Exponent::ONE => "nuclear".into(),
        GaugeFamily::Lp(_) => "schatten".into(),
        GaugeFamily::Custom(_) => "custom".into(),
    };
    Ok(SepReport {
        estimate: (n as f64).sqrt() * id * diam,
        identity_norm: id,
        diam_value: diam,
        diam_source: mode,
        regime_label,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KyFanRegime {
    SmallM,
    Boundary,
    LargeM,
}

impl KyFanRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            KyFanRegime::SmallM => "small-m",
            KyFanRegime::Boundary => "boundary",
            KyFanRegime::LargeM => "large-m",
        }
    }
}

impl std::fmt::Display for KyFanRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeValue {
    pub value: f64,
    pub label: KyFanRegime,
}

/// Order of the Ky Fan separation modulus: `n` while `m < √n`, `m√n` once
/// `m ≥ √n`. At `m² = n` both agree and the label is `boundary`.
pub fn kyfan_regime(n: usize, m: usize) -> Result<RegimeValue> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!("Ky Fan index must satisfy 1 <= m <= n, got m={m}, n={n}")));
    }
    let (mm, nn) = (m as u128 * m as u128, n as u128);
    let root = (n as f64).sqrt();
    Ok(match mm.cmp(&nn) {
        std::cmp::Ordering::Less => RegimeValue { value: n as f64, label: KyFanRegime::SmallM },
        std::cmp::Ordering::Equal => RegimeValue { value: n as f64, label: KyFanRegime::Boundary },
        std::cmp::Ordering::Greater => RegimeValue { value: m as f64 * root, label: KyFanRegime::LargeM },
    })
}

/// Spectral-gap order `n³·‖Id_n‖²`.
pub fn lambda_order(g: &SymmetricGauge) -> f64 {
    let n = g.dim() as f64;
    let id = identity_norm(g);
    n * n * n * id * id
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(g: &SymmetricGauge) -> SepReport {
        sep_estimate(g, DiamMode::ClosedForm, 0.5, &AlgOptions::default()).unwrap()
    }

    #[test]
    fn schatten_examples() {
        for n in [1, 2, 5, 8, 13] {
            let nf = n as f64;
            let op = closed(&SymmetricGauge::lp(n, Exponent::INFINITY).unwrap());
            assert!((op.estimate - 2.0 * nf).abs() <= 1e-12 * nf);
            let hs = closed(&SymmetricGauge::lp(n, Exponent::TWO).unwrap());
            assert!((hs.estimate - 2.0 * nf).abs() <= 1e-12 * nf);
            assert_eq!(hs.diam_source, DiamMode::ClosedForm);
        }
    }

    #[test]
    fn kyfan_estimate_is_twice_the_regime() {
        for n in 1..=20 {
            for m in 1..=n {
                let r = closed(&SymmetricGauge::ky_fan(n, m).unwrap());
                let regime = kyfan_regime(n, m).unwrap();
                let expect = 2.0 * (m as f64 * (n as f64).sqrt()).max(n as f64);
                assert!((r.estimate - expect).abs() <= 1e-12 * expect, "n={n} m={m}");
                assert!((r.estimate / regime.value - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn estimate_is_exact_product() {
        let g = SymmetricGauge::ky_fan(7, 3).unwrap();
        let r = closed(&g);
        assert_eq!(r.estimate, 7f64.sqrt() * r.identity_norm * r.diam_value);
    }

    #[test]
    fn regime_examples() {
        assert_eq!(kyfan_regime(100, 1).unwrap(), RegimeValue { value: 100.0, label: KyFanRegime::SmallM });
        assert_eq!(kyfan_regime(100, 10).unwrap(), RegimeValue { value: 100.0, label: KyFanRegime::Boundary });
        assert_eq!(kyfan_regime(100, 50).unwrap(), RegimeValue { value: 500.0, label: KyFanRegime::LargeM });
        assert!(kyfan_regime(3, 4).is_err());
        assert!(kyfan_regime(3, 0).is_err());
    }

    #[test]
    fn lambda_examples() {
        for n in 1..8 {
            let nf = n as f64;
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b;
            assert!(close(lambda_order(&SymmetricGauge::lp(n, Exponent::INFINITY).unwrap()), nf.powi(3)));
            assert!(close(lambda_order(&SymmetricGauge::lp(n, Exponent::TWO).unwrap()), nf.powi(4)));
            assert!(close(lambda_order(&SymmetricGauge::lp(n, Exponent::ONE).unwrap()), nf.powi(5)));
        }
    }

    #[test]
    fn canonical_reparametrisation_is_invisible() {
        for n in 1..6 {
            let a = closed(&SymmetricGauge::ky_fan(n, 1).unwrap());
            let b = closed(&SymmetricGauge::lp(n, Exponent::INFINITY).unwrap());
            assert_eq!(a.estimate, b.estimate);
            let c = closed(&SymmetricGauge::ky_fan(n, n).unwrap());
            let d = closed(&SymmetricGauge::lp(n, Exponent::ONE).unwrap());
            assert_eq!(c.estimate, d.estimate);
        }
    }

    #[test]
    fn algorithmic_path_is_consistent() {
        for n in 2..=4 {
            for g in [SymmetricGauge::lp(n, Exponent::TWO).unwrap(), SymmetricGauge::ky_fan(n, 2).unwrap()] {
                let c = closed(&g);
                let a = sep_estimate(&g, DiamMode::AlgP, 0.5, &AlgOptions::default()).unwrap();
                assert!((a.estimate - c.estimate).abs() <= 0.5 * c.estimate);
                assert_eq!(a.diam_source, DiamMode::AlgP);
            }
        }
    }
}
