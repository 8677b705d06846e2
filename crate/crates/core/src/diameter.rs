//! ℓ_p diameters of symmetric unit balls.
//!
//! By duality, `diam_{ℓ_p}(B_E) = 2·sup { ‖y‖_{E*} : ‖y‖_q ≤ 1 }` with `q`
//! the conjugate of `p`. For a symmetric `E` the supremum may be taken over
//! nonincreasing nonnegative `y`, so [`alg_p`] maximises a dual evaluation
//! over the net of [`crate::net`]. The dual norm is coordinatewise monotone
//! there, which lets the search skip every net point dominated by another.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ellipsoid::eval_dual;
use crate::error::{Error, Result};
use crate::gauge::{Exponent, GaugeFamily, SymmetricGauge};
use crate::net::{build_maximal_net, build_net, GreedyCover, NetParams, DEFAULT_BUDGET};
use crate::oracle::{NormAccess, SandwichBounds};

const CHUNK: usize = 4096;

/// Hölder conjugate of `p`, rejecting `p < 1`.
pub fn dual_exponent(p: f64) -> Result<Exponent> {
    Ok(Exponent::new(p)?.conjugate())
}

/// Which net points are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetReduction {
    /// Every point of the net.
    Full,
    /// Only coordinatewise-maximal points.
    Dominance,
    /// Maximal points, further thinned to a cover whose radius uses up the
    /// slack between the grid's rounding distance and `δ/2`.
    DominanceCover,
}

/// How each dual value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualEvaluator {
    Ellipsoid,
    /// Exact dual from the access's closed form; for testing the search.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgOptions {
    pub budget: u64,
    pub reduction: NetReduction,
    pub evaluator: DualEvaluator,
}

impl Default for AlgOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, reduction: NetReduction::Dominance, evaluator: DualEvaluator::Ellipsoid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamReport {
    pub value: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub delta: f64,
    pub net_points_evaluated: u64,
    pub oracle_calls: u64,
    pub argmax_net_point: Vec<f64>,
}

/// Sandwich radii of a symmetric gauge: `‖e₁‖ = u` gives
/// `B₂/(u√n) ⊆ B_E ⊆ (√n/u)·B₂`.
pub fn gauge_bounds(g: &SymmetricGauge) -> Result<SandwichBounds> {
    let mut e1 = vec![0.0; g.dim()];
    e1[0] = 1.0;
    SandwichBounds::from_unit_norm(g.dim(), g.eval(&e1)?)
}

/// Approximates `diam_{ℓ_p}(B_E)` within a factor `1 ± δ`, `δ ∈ (0, 1/2]`.
///
/// Dual values are evaluated at relative accuracy `δ/2`, in parallel, and
/// reduced by a max with ties broken towards the earlier net point, so the
/// report does not depend on the thread count.
pub fn alg_p(
    access: &dyn NormAccess,
    bounds: &SandwichBounds,
    p: Exponent,
    delta: f64,
    opts: &AlgOptions,
) -> Result<DiamReport> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidInput(format!("δ must lie in (0, 1/2], got {delta}")));
    }
    let n = access.dim();
    let q = p.conjugate();
    let params = NetParams::new(n, q, delta)?;

    let evaluate = |a: &[f64]| -> Result<(f64, u64)> {
        if a.iter().all(|v| *v == 0.0) {
            return Ok((0.0, 0));
        }
        match opts.evaluator {
            DualEvaluator::Ellipsoid => {
                let r = eval_dual(a, access, bounds, delta / 2.0)?;
                Ok((r.value, r.oracle_calls))
            }
            DualEvaluator::ClosedForm => access
                .closed_dual(a)
                .map(|v| (v, 0))
                .ok_or_else(|| Error::UnsupportedClosedForm("dual norm of this access".into())),
        }
    };

    let mut best = Best::default();
    let mut index = 0u64;
    let mut run_chunk = |chunk: &mut Vec<Vec<f64>>, best: &mut Best| -> Result<()> {
        let results: Vec<Result<(f64, u64)>> = chunk.par_iter().map(|a| evaluate(a)).collect();
        for (a, r) in chunk.drain(..).zip(results) {
            let (value, calls) = r?;
            best.offer(value, index, a);
            best.calls += calls;
            index += 1;
        }
        Ok(())
    };

    let mut chunk = Vec::with_capacity(CHUNK);
    if q.is_infinite() && opts.reduction != NetReduction::Full {
        // the all-ones vector dominates the whole cube
        chunk.push(vec![1.0; n]);
        run_chunk(&mut chunk, &mut best)?;
    } else {
        match opts.reduction {
            NetReduction::Full => {
                for point in build_net(&params, opts.budget)? {
                    chunk.push(point?);
                    if chunk.len() == CHUNK {
                        run_chunk(&mut chunk, &mut best)?;
                    }
                }
            }
            NetReduction::Dominance => {
                for point in build_maximal_net(&params, opts.budget) {
                    chunk.push(point?);
                    if chunk.len() == CHUNK {
                        run_chunk(&mut chunk, &mut best)?;
                    }
                }
            }
            NetReduction::DominanceCover => {
                let radius = (delta / 2.0 - params.density_bound()).max(0.0);
                let mut cover = GreedyCover::new(q, radius);
                for point in build_maximal_net(&params, opts.budget) {
                    cover.offer(point?);
                }
                for point in cover.into_centers() {
                    chunk.push(point);
                    if chunk.len() == CHUNK {
                        run_chunk(&mut chunk, &mut best)?;
                    }
                }
            }
        }
        run_chunk(&mut chunk, &mut best)?;
    }

    Ok(DiamReport {
        value: 2.0 * best.value,
        p,
        q,
        delta,
        net_points_evaluated: index,
        oracle_calls: best.calls,
        argmax_net_point: best.point,
    })
}

#[derive(Default)]
struct Best {
    value: f64,
    index: u64,
    point: Vec<f64>,
    calls: u64,
}

impl Best {
    fn offer(&mut self, value: f64, index: u64, point: Vec<f64>) {
        if self.point.is_empty() || value > self.value || (value == self.value && index < self.index) {
            self.value = value;
            self.index = index;
            self.point = point;
        }
    }
}

/// [`alg_p`] on a gauge with its exact sandwich radii.
pub fn alg_p_gauge(g: &SymmetricGauge, p: Exponent, delta: f64, opts: &AlgOptions) -> Result<DiamReport> {
    alg_p(g, &gauge_bounds(g)?, p, delta, opts)
}

/// Exact `diam_{ℓ_p}(B_E)` for the built-in families:
/// `2·max(1, n^{1/p − 1/r})` for ℓ_r and `2·max(1, n^{1/p}/m)` for Ky Fan
/// `m`, whose unit ball is the convex hull of `B_{ℓ₁} ∪ (1/m)·B_{ℓ∞}`.
pub fn closed_form_diam(g: &SymmetricGauge, p: Exponent) -> Result<f64> {
    let n = g.dim() as f64;
    let inv = |e: Exponent| if e.is_infinite() { 0.0 } else { 1.0 / e.value() };
    match g.family() {
        GaugeFamily::Lp(r) => Ok(2.0 * n.powf(inv(p) - inv(*r)).max(1.0)),
        GaugeFamily::KyFan(m) => Ok(2.0 * (n.powf(inv(p)) / *m as f64).max(1.0)),
        GaugeFamily::Custom(c) => Err(Error::UnsupportedClosedForm(format!("diameter of custom gauge `{}`", c.name()))),
    }
}
