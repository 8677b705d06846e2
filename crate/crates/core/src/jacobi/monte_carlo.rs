//! Monte Carlo twins of the Rayleigh quotient.
//!
//! Samples are processed in fixed-size blocks, block `b` drawing from stream
//! `b + 1` of the seed. Block statistics are merged in block order, so the
//! output depends on `(seed, samples)` only, not on the thread count.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed::{rayleigh_closed, to_f64, JacobiParams};
use super::test_function::grad_norm_sq_from_singular;
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::rng::{stream, BoxMuller};

const BLOCK: u64 = 1024;
const MAX_REJECTION_RATE: f64 = 0.01;
const MIN_ACCEPTANCE: f64 = 1e-4;
/// Agreement band, in standard errors.
pub const Z_BAND: f64 = 3.0;

/// Running mean/covariance of a pair of variables (Chan et al. merging).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean_x: f64,
    mean_y: f64,
    cxx: f64,
    cyy: f64,
    cxy: f64,
}

impl Moments {
    fn push(&mut self, x: f64, y: f64) {
        self.count += 1.0;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / self.count;
        self.mean_y += dy / self.count;
        self.cxx += dx * (x - self.mean_x);
        self.cyy += dy * (y - self.mean_y);
        self.cxy += dx * (y - self.mean_y);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0.0 {
            return o;
        }
        if o.count == 0.0 {
            return self;
        }
        let count = self.count + o.count;
        let dx = o.mean_x - self.mean_x;
        let dy = o.mean_y - self.mean_y;
        let w = self.count * o.count / count;
        Moments {
            count,
            mean_x: self.mean_x + dx * o.count / count,
            mean_y: self.mean_y + dy * o.count / count,
            cxx: self.cxx + o.cxx + dx * dx * w,
            cyy: self.cyy + o.cyy + dy * dy * w,
            cxy: self.cxy + o.cxy + dx * dy * w,
        }
    }

    fn var_x(&self) -> f64 {
        if self.count > 1.0 {
            self.cxx / (self.count - 1.0)
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    moments: Moments,
    /// Draws excluded (solver failure, or rejected by the sampler).
    skipped: u64,
}

/// Runs `per_draw` over `samples` draws in parallel blocks.
fn run_blocks<F>(samples: u64, seed: u64, per_draw: F) -> BlockStats
where
    F: Fn(&mut ChaCha8Rng, &mut BoxMuller, &mut Moments) -> bool + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let stats: Vec<BlockStats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b + 1);
            let mut normal = BoxMuller::new();
            let mut out = BlockStats::default();
            let len = BLOCK.min(samples - b * BLOCK);
            for _ in 0..len {
                if !per_draw(&mut rng, &mut normal, &mut out.moments) {
                    out.skipped += 1;
                }
            }
            out
        })
        .collect();
    stats.into_iter().fold(BlockStats::default(), |acc, s| BlockStats {
        moments: acc.moments.merge(s.moments),
        skipped: acc.skipped + s.skipped,
    })
}

/// A Monte Carlo estimate next to the exact Rayleigh quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    pub closed: f64,
    /// `(estimate − closed)/stderr`.
    pub z_score: f64,
    pub samples: u64,
    /// Draws used in the estimate.
    pub used: u64,
    pub rejected: u64,
    pub pass: bool,
}

impl McReport {
    fn new(estimate: f64, stderr: f64, closed: f64, samples: u64, used: u64, rejected: u64) -> Self {
        let z_score = (estimate - closed) / stderr;
        let pass = (estimate - closed).abs() <= Z_BAND * stderr;
        Self { estimate, stderr, closed, z_score, samples, used, rejected, pass }
    }
}

fn gaussian_block(rows: usize, cols: usize, normal: &mut BoxMuller, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

/// Eigenvalues of `W₁(W₁ + W₂)⁻¹` for Gaussian `G₁ ((n+4p+1)×n)` and
/// `G₂ (n×n)`, `Wᵢ = GᵢᵀGᵢ`; `None` when the factorisation fails or a value
/// leaves `(0, 1]`.
fn manova_eigenvalues(j: JacobiParams, normal: &mut BoxMuller, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let n = j.n as usize;
    let g1 = gaussian_block(n + 4 * j.p as usize + 1, n, normal, rng);
    let g2 = gaussian_block(n, n, normal, rng);
    let w1 = g1.tr_mul(&g1);
    let total = &w1 + g2.tr_mul(&g2);
    let chol = total.cholesky()?;
    let l = chol.l();
    // L⁻¹ W₁ L⁻ᵀ, symmetric with the same spectrum as W₁(W₁+W₂)⁻¹
    let left = l.solve_lower_triangular(&w1)?;
    let mut m = l.solve_lower_triangular(&left.transpose())?;
    m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000)?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().all(|x| *x > 0.0 && *x <= 1.0 + 1e-12 && x.is_finite()) {
        Some(values)
    } else {
        None
    }
}

/// Estimates `4p²·E[Σ_k (1 − x_k)/x_k²]` with the eigenvalues `x` of a MANOVA
/// matrix, whose law is the Jacobi density with weight
/// `x^{2p}(1 − x)^{−1/2}`. The result targets [`rayleigh_closed`].
///
/// The statistic has infinite variance when `p = 1`; the standard error is
/// then not meaningful.
pub fn mc_jacobi_expectations(j: JacobiParams, samples: u64, seed: u64) -> Result<McReport> {
    if samples < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 samples, got {samples}")));
    }
    let stats = run_blocks(samples, seed, |rng, normal, acc| match manova_eigenvalues(j, normal, rng) {
        Some(x) => {
            let stat: f64 = x.iter().map(|v| (1.0 - v) / (v * v)).sum();
            acc.push(stat, 0.0);
            true
        }
        None => false,
    });
    if stats.skipped as f64 > MAX_REJECTION_RATE * samples as f64 {
        return Err(Error::Rejections { rejected: stats.skipped, total: samples });
    }
    let m = stats.moments;
    let scale = 4.0 * (j.p as f64).powi(2);
    let stderr = scale * (m.var_x() / m.count).sqrt();
    Ok(McReport::new(
        scale * m.mean_x,
        stderr,
        to_f64(&rayleigh_closed(j)),
        samples,
        m.count as u64,
        stats.skipped,
    ))
}

/// Estimates `∫‖∇f‖²/∫f²` over the operator-norm ball by drawing `A`
/// uniformly from `[−1, 1]^{n²}` and keeping draws with `s₁(A) ≤ 1`. The
/// ratio of means carries a delta-method standard error.
pub fn mc_matrix_rayleigh(j: JacobiParams, samples: u64, seed: u64) -> Result<McReport> {
    if !(2..=3).contains(&j.n) {
        return Err(Error::InvalidInput(format!(
            "the cube sampler runs for n in {{2, 3}} (acceptance collapses beyond), got n={}",
            j.n
        )));
    }
    if samples < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 samples, got {samples}")));
    }
    let n = j.n as usize;
    let p = j.p;
    let stats = run_blocks(samples, seed, |rng, _, acc| {
        let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let a = RealMatrix::from_row_major(n, data).expect("finite entries");
        let s = a.singular_values();
        if s.largest() < 1.0 {
            let f: f64 = s.values().iter().map(|v| 1.0 - v * v).product::<f64>().powi(p as i32);
            let g = grad_norm_sq_from_singular(s.values(), p).unwrap_or(0.0);
            acc.push(g, f * f);
            true
        } else {
            acc.push(0.0, 0.0);
            false
        }
    });
    let accepted = samples - stats.skipped;
    let rate = accepted as f64 / samples as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(Error::LowAcceptance { rate });
    }
    let m = stats.moments;
    let ratio = m.mean_x / m.mean_y;
    let dof = m.count - 1.0;
    let var = (m.cxx - 2.0 * ratio * m.cxy + ratio * ratio * m.cyy) / dof;
    let stderr = (var / m.count).sqrt() / m.mean_y;
    Ok(McReport::new(ratio, stderr, to_f64(&rayleigh_closed(j)), samples, accepted, stats.skipped))
}

/// Volume of the operator-norm ball of 2×2 real matrices, by rejection from
/// `[−1, 1]⁴`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub samples: u64,
    pub acceptance_rate: f64,
    pub volume: f64,
    pub stderr: f64,
    /// `vol^{1/4}·√n·‖Id‖_op` with `n = 2`; of order one.
    pub normalized: f64,
    pub pass: bool,
}

pub fn mc_volume_check(seed: u64, samples: u64) -> Result<VolumeReport> {
    if samples < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 samples, got {samples}")));
    }
    let stats = run_blocks(samples, seed, |rng, _, acc| {
        let data: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let a = RealMatrix::from_row_major(2, data).expect("finite entries");
        let inside = a.singular_values().largest() <= 1.0;
        acc.push(if inside { 1.0 } else { 0.0 }, 0.0);
        true
    });
    let rate = stats.moments.mean_x;
    let volume = 16.0 * rate;
    let stderr = 16.0 * (rate * (1.0 - rate) / samples as f64).sqrt();
    let normalized = volume.powf(0.25) * 2f64.sqrt();
    Ok(VolumeReport {
        samples,
        acceptance_rate: rate,
        volume,
        stderr,
        normalized,
        pass: (0.25..=4.0).contains(&normalized),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(n: u32, p: u32) -> JacobiParams {
        JacobiParams::new(n, p).unwrap()
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<(f64, f64)> = (0..1000).map(|i| ((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|(x, y)| whole.push(*x, *y));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..377].iter().for_each(|(x, y)| a.push(*x, *y));
        xs[377..].iter().for_each(|(x, y)| b.push(*x, *y));
        let m = a.merge(b);
        assert!((m.mean_x - whole.mean_x).abs() < 1e-14);
        assert!((m.cxy - whole.cxy).abs() < 1e-10);
        assert!((m.cyy - whole.cyy).abs() < 1e-10);
    }

    #[test]
    fn manova_spectrum_in_unit_interval() {
        let mut rng = stream(1, 0);
        let mut normal = BoxMuller::new();
        for _ in 0..200 {
            let x = manova_eigenvalues(jp(4, 2), &mut normal, &mut rng).unwrap();
            assert_eq!(x.len(), 4);
            assert!(x.iter().all(|v| *v > 0.0 && *v <= 1.0));
        }
    }

    #[test]
    fn jacobi_mc_small() {
        let r = mc_jacobi_expectations(jp(2, 2), 20_000, 5).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.rejected, 0);
    }

    #[test]
    fn reproducible() {
        let a = mc_jacobi_expectations(jp(3, 2), 3000, 9).unwrap();
        let b = mc_jacobi_expectations(jp(3, 2), 3000, 9).unwrap();
        assert_eq!(a, b);
        let c = mc_matrix_rayleigh(jp(2, 1), 5000, 9).unwrap();
        let d = mc_matrix_rayleigh(jp(2, 1), 5000, 9).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn matrix_mc_p2() {
        let r = mc_matrix_rayleigh(jp(2, 2), 200_000, 11).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.closed - 800.0 / 54.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_mc_guards() {
        assert!(mc_matrix_rayleigh(jp(4, 1), 1000, 0).is_err());
        assert!(mc_jacobi_expectations(jp(2, 1), 10, 0).is_err());
    }

    #[test]
    fn volume_is_order_one() {
        let r = mc_volume_check(0, 100_000).unwrap();
        assert!(r.pass);
        assert!(r.volume > 0.0 && r.volume < 16.0);
        let r2 = mc_volume_check(1, 200_000).unwrap();
        assert!((r.volume - r2.volume).abs() <= 3.0 * (r.stderr.powi(2) + r2.stderr.powi(2)).sqrt());
    }
}
