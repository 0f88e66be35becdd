use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Inner products may exceed [0, 1] by this much before a model is rejected;
/// inside the slack they are clamped.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// n × d matrix of latent positions; row `i` is `X_iᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPositionMatrix {
    x: DMatrix<f64>,
}

impl LatentPositionMatrix {
    /// Validates that every inner product `X_iᵀ X_j` lies in [0, 1].
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let rows = row_major(&x);
        let (n, d) = x.shape();
        for i in 0..n {
            let xi = &rows[i * d..(i + 1) * d];
            for j in i..n {
                let p = dot(xi, &rows[j * d..(j + 1) * d]);
                if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) || p.is_nan() {
                    return Err(Error::ProbabilityOutOfRange { i, j, value: p });
                }
            }
        }
        Ok(LatentPositionMatrix { x })
    }

    /// For positions whose Gram matrix is known to be valid by construction.
    pub(crate) fn from_trusted(x: DMatrix<f64>) -> Self {
        LatentPositionMatrix { x }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    /// Row-major copy of the positions.
    pub fn rows(&self) -> Vec<f64> {
        row_major(&self.x)
    }

    /// Dense `P = X Xᵀ`. O(n² d) memory and time.
    pub fn probability_matrix(&self) -> DMatrix<f64> {
        &self.x * self.x.transpose()
    }

    /// Singular values of X, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.x.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Number of singular values above `1e-10 × σ_max`.
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let top = s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        s.iter().filter(|v| **v > 1e-10 * top).count()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.d()
    }
}

pub(crate) fn row_major(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, d) = x.shape();
    let mut out = Vec::with_capacity(n * d);
    for i in 0..n {
        for j in 0..d {
            out.push(x[(i, j)]);
        }
    }
    out
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
