use nalgebra::DMatrix;

use super::dense::symmetric_eigen;
use super::lanczos::{lanczos, LanczosOptions, Which};
use super::operator::SymmetricOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense below `dense_threshold` vertices, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    pub method: EigenMethod,
    pub dense_threshold: usize,
    /// Required `‖Mv − λv‖ / ‖M‖₂` for every returned pair.
    pub residual_tol: f64,
    pub lanczos: LanczosOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            method: EigenMethod::Auto,
            dense_threshold: 512,
            residual_tol: 1e-8,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl EigenOptions {
    pub fn with_start_seed(mut self, seed: u64) -> Self {
        self.lanczos.start_seed = seed;
        self
    }

    pub fn with_method(mut self, method: EigenMethod) -> Self {
        self.method = method;
        self
    }

    fn use_dense(&self, n: usize) -> bool {
        match self.method {
            EigenMethod::Dense => true,
            EigenMethod::Lanczos => false,
            EigenMethod::Auto => n <= self.dense_threshold,
        }
    }
}

/// Selected eigenpairs of a symmetric operator.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// n × d, orthonormal columns.
    pub vectors: DMatrix<f64>,
    /// Largest eigenvalue magnitude seen by the solver, an estimate of `‖M‖₂`.
    pub norm_estimate: f64,
}

/// Flips each column so that its first non-negligible entry is positive.
pub fn canonical_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-10 * scale).copied() {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// The `d` algebraically largest eigenvalues of `m` (descending) and their
/// orthonormal eigenvectors.
pub fn eig_sym(m: &dyn SymmetricOperator, d: usize, opts: &EigenOptions) -> Result<EigenPairs> {
    eig_sym_which(m, d, Which::LargestAlgebraic, opts)
}

pub fn eig_sym_which(
    m: &dyn SymmetricOperator,
    d: usize,
    which: Which,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = m.dim();
    if d == 0 || d > n {
        return Err(Error::param("d", d, format!("must lie in [1, n = {n}]")));
    }
    let (values, mut vectors, norm_estimate) = if opts.use_dense(n) {
        let full = symmetric_eigen(&m.to_dense())?;
        let norm = full.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut idx: Vec<usize> = (0..n).collect();
        match which {
            Which::LargestAlgebraic => idx.reverse(),
            Which::SmallestAlgebraic => {}
            Which::LargestMagnitude => {
                idx.sort_by(|&a, &b| full.values[b].abs().total_cmp(&full.values[a].abs()))
            }
        }
        idx.truncate(d);
        let values: Vec<f64> = idx.iter().map(|&k| full.values[k]).collect();
        let vectors = DMatrix::from_fn(n, d, |i, j| full.vectors[(i, idx[j])]);
        (values, vectors, norm)
    } else {
        let mut lopts = opts.lanczos.clone();
        lopts.which = which;
        let out = lanczos(m, d, &lopts)?;
        let norm = out.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        (out.values, out.vectors, norm)
    };
    canonical_signs(&mut vectors);

    let norm_estimate = norm_estimate.max(f64::MIN_POSITIVE);
    let mut mv = vec![0.0; n];
    let mut worst: f64 = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let v: Vec<f64> = vectors.column(j).iter().copied().collect();
        m.apply(&v, &mut mv);
        let r: f64 = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r / norm_estimate);
    }
    if worst > opts.residual_tol {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: worst,
        });
    }
    Ok(EigenPairs {
        values,
        vectors,
        norm_estimate,
    })
}

/// `‖M‖₂` as the largest eigenvalue magnitude. Iterative solves use the
/// looser `tol` because only the value is needed; the Ritz value is then
/// within `tol · ‖M‖₂` of an eigenvalue.
pub fn spectral_norm(m: &dyn SymmetricOperator, tol: f64, opts: &EigenOptions) -> Result<f64> {
    let mut o = opts.clone();
    o.lanczos.tol = tol;
    o.residual_tol = o.residual_tol.max(10.0 * tol);
    let pairs = eig_sym_which(m, 1, Which::LargestMagnitude, &o)?;
    Ok(pairs.values[0].abs())
}
