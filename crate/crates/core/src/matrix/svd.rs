//! One-sided Jacobi singular values.
//!
//! Columns of a working copy are rotated pairwise until mutually orthogonal;
//! the singular values are then the column norms. Each rotation is an exact
//! orthogonal transformation applied on the right, so the method is backward
//! stable and preserves small singular values to high relative accuracy.

use super::RealMatrix;

const MAX_SWEEPS: usize = 80;
/// Pairs with |⟨a_i, a_j⟩| below this fraction of ‖a_i‖‖a_j‖ count as orthogonal.
const PAIR_TOL: f64 = 1e-15;
/// Global stopping threshold on the off-diagonal Gram mass relative to ‖A‖²_F.
const GRAM_TOL: f64 = 1e-14;

/// Singular values of `a`, in nonincreasing order.
pub(crate) fn jacobi_singular_values(a: &RealMatrix) -> Vec<f64> {
    let n = a.n();
    // column-major working copy: cols[j] is column j
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a.get(i, j)).collect()).collect();
    let frob_sq: f64 = a.data().iter().map(|v| v * v).sum();
    if frob_sq == 0.0 {
        return vec![0.0; n];
    }
    let mut norms_sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        let mut off_sq = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let gamma = dot(&cols[i], &cols[j]);
                let (alpha, beta) = (norms_sq[i], norms_sq[j]);
                off_sq += gamma * gamma;
                if gamma == 0.0 || gamma.abs() <= PAIR_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for k in 0..n {
                    let x = ci[k];
                    let y = cj[k];
                    ci[k] = c * x - s * y;
                    cj[k] = s * x + c * y;
                }
                norms_sq[i] = dot(ci, ci);
                norms_sq[j] = dot(cj, cj);
            }
        }
        if !rotated || off_sq.sqrt() <= GRAM_TOL * frob_sq {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
