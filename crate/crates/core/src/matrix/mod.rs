//! Square matrices, singular values and unitarily invariant norms.
//!
//! A unitarily invariant norm on `M_n` is a symmetric gauge applied to the
//! singular-value vector: `‖A‖ = ‖(s₁(A), …, s_n(A))‖_E`. Complex matrices
//! are handled through the real embedding `[[Re, -Im], [Im, Re]]`, whose
//! spectrum is the complex spectrum with every value repeated twice.

mod io;
mod svd;

pub use io::{read_complex_json, read_real_csv, read_real_json, write_real_csv, ComplexMatrixJson, RealMatrixJson};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::gauge::SymmetricGauge;
use crate::rng::BoxMuller;

/// Dense `n × n` real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        check_finite(&data)?;
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// Entries drawn i.i.d. standard normal.
    pub fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut g = BoxMuller::new();
        let mut data = vec![0.0; n * n];
        g.fill(rng, &mut data);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, t: f64) -> RealMatrix {
        RealMatrix { n: self.n, data: self.data.iter().map(|v| v * t).collect() }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))
                .unwrap_or(col);
            let pv = a[pivot * n + col];
            if pv == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= pv;
            for r in (col + 1)..n {
                let f = a[r * n + col] / pv;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    pub fn singular_values(&self) -> SingularSpectrum {
        SingularSpectrum { values: svd::jacobi_singular_values(self) }
    }
}

/// `n × n` complex matrix stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    re: RealMatrix,
    im: RealMatrix,
}

impl ComplexMatrix {
    pub fn new(re: RealMatrix, im: RealMatrix) -> Result<Self> {
        if re.n != im.n {
            return Err(Error::DimensionMismatch { expected: re.n, got: im.n });
        }
        Ok(Self { re, im })
    }

    pub fn n(&self) -> usize {
        self.re.n
    }

    pub fn re(&self) -> &RealMatrix {
        &self.re
    }

    pub fn im(&self) -> &RealMatrix {
        &self.im
    }

    /// The `2n × 2n` real embedding `[[Re, -Im], [Im, Re]]`.
    pub fn realify(&self) -> RealMatrix {
        let n = self.n();
        let m = 2 * n;
        let mut out = RealMatrix::zeros(m);
        for i in 0..n {
            for j in 0..n {
                let (r, c) = (self.re.get(i, j), self.im.get(i, j));
                out.set(i, j, r);
                out.set(i, j + n, -c);
                out.set(i + n, j, c);
                out.set(i + n, j + n, r);
            }
        }
        out
    }

    /// Complex singular values: every value of the real embedding appears
    /// twice, and the first of each pair is kept.
    pub fn singular_values(&self) -> Result<SingularSpectrum> {
        let doubled = self.realify().singular_values().values;
        let scale = doubled.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let mut values = Vec::with_capacity(self.n());
        for (k, pair) in doubled.chunks_exact(2).enumerate() {
            let gap = (pair[0] - pair[1]).abs();
            if gap > PAIRING_TOL * scale {
                return Err(Error::Numerical(format!(
                    "realified spectrum fails to pair at index {k}: {} vs {} (gap {gap:.3e})",
                    pair[0], pair[1]
                )));
            }
            values.push(pair[0]);
        }
        Ok(SingularSpectrum { values })
    }
}

const PAIRING_TOL: f64 = 1e-8;

/// Nonincreasing nonnegative singular values `s₁ ≥ … ≥ s_n ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Operator norm `s₁`.
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn singular_values(a: &RealMatrix) -> SingularSpectrum {
    a.singular_values()
}

/// `‖A‖_{S_E} = ‖s(A)‖_E`.
pub fn ideal_norm(g: &SymmetricGauge, a: &RealMatrix) -> Result<f64> {
    if g.dim() != a.n() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: a.n() });
    }
    g.eval(a.singular_values().values())
}

/// `‖Id_n‖_X = ‖(1, …, 1)‖_E`.
pub fn identity_norm(g: &SymmetricGauge) -> f64 {
    g.eval_unchecked(&vec![1.0; g.dim()])
}

pub fn complex_ideal_norm(g: &SymmetricGauge, a: &ComplexMatrix) -> Result<f64> {
    if g.dim() != a.n() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: a.n() });
    }
    g.eval(a.singular_values()?.values())
}

/// Haar-distributed orthogonal matrix: modified Gram–Schmidt on a Gaussian
/// matrix, with column signs fixed by the diagonal of R.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    let g = RealMatrix::gaussian(n, rng);
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: f64 = (0..n).map(|i| q[j][i] * q[k][i]).sum();
            for i in 0..n {
                q[j][i] -= proj * q[k][i];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut out = RealMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            out.set(i, j, q[j][i]);
        }
    }
    out
}
