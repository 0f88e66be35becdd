use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::constants::{beta, check_eta, model_constants, Beta, ModelConstants};
use crate::error::{Error, Result};
use crate::graph_models::LatentPositionMatrix;
use crate::spectral::dense::symmetric_eigen;
use crate::spectral::{
    align, project_sphere, spectral_norm, two_to_infty_norm, Difference, EigenOptions,
    GramOperator, SpectralEmbedding, SymmetricOperator,
};

/// Tolerance for the `‖A − P‖₂` Lanczos solve; only the value is needed.
pub const NORM_TOL: f64 = 1e-6;

pub mod names {
    pub const SPECTRAL_NORM: &str = "spectral_norm_a_minus_p";
    pub const EIGVEC_FROBENIUS: &str = "eigvec_frobenius_sq";
    pub const EIGVAL_DEVIATION: &str = "eigval_deviation";
    pub const EIGVEC_INNER_PRODUCT: &str = "eigvec_inner_product";
    pub const PROJECTED_EMBEDDING: &str = "projected_embedding";
    pub const EIGVAL_MAGNITUDE: &str = "eigval_magnitude";
    pub const TWO_TO_INFINITY: &str = "two_to_infinity";
    pub const SPHERE_TWO_TO_INFINITY: &str = "sphere_two_to_infinity";

    pub const ALL: [&str; 8] = [
        SPECTRAL_NORM,
        EIGVEC_FROBENIUS,
        EIGVAL_DEVIATION,
        EIGVEC_INNER_PRODUCT,
        PROJECTED_EMBEDDING,
        EIGVAL_MAGNITUDE,
        TWO_TO_INFINITY,
        SPHERE_TWO_TO_INFINITY,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundEntry {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        BoundEntry {
            name: name.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub eta: f64,
    pub constants: ModelConstants,
    pub beta: Beta,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// True eigenpairs of `P = X Xᵀ`: `V = X U Λ^{-1/2}` where `Xᵀ X = U Λ Uᵀ`.
pub fn population_eigenpairs(x: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let d = x.ncols();
    let eig = symmetric_eigen(&(x.transpose() * x))?;
    let order: Vec<usize> = (0..d).rev().collect();
    let values: Vec<f64> = order.iter().map(|&j| eig.values[j]).collect();
    let top = values.first().copied().unwrap_or(0.0);
    if let Some((index, &value)) = values
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v > 1e-10 * top && v > 0.0))
    {
        return Err(Error::NonPositiveSpectrum { index, value });
    }
    let u = DMatrix::from_fn(d, d, |i, j| eig.vectors[(i, order[j])]);
    let mut v = x * u;
    for (j, lambda) in values.iter().enumerate() {
        v.column_mut(j).scale_mut(1.0 / lambda.sqrt());
    }
    Ok((values, v))
}

/// Evaluates the concentration bounds behind perfect clustering against the
/// measured quantities of one sample: `adj` is A, `latent` the true X (so
/// P = X Xᵀ) and `embedding` the ASE of A.
pub fn bound_report(
    adj: &dyn SymmetricOperator,
    latent: &LatentPositionMatrix,
    tau: &[usize],
    embedding: &SpectralEmbedding,
    eta: f64,
    degree_corrected: bool,
    opts: &EigenOptions,
) -> Result<BoundReport> {
    check_eta(eta)?;
    let n = latent.n();
    let d = embedding.d();
    if adj.dim() != n || embedding.n() != n || latent.d() != d {
        return Err(Error::DimensionMismatch(format!(
            "A is {}×{}, X is {}×{}, embedding is {}×{}",
            adj.dim(),
            adj.dim(),
            n,
            latent.d(),
            embedding.n(),
            d
        )));
    }
    if let Some((index, &value)) = embedding
        .eigenvalues
        .iter()
        .enumerate()
        .find(|(_, &v)| v <= 0.0)
    {
        return Err(Error::NonPositiveSpectrum { index, value });
    }
    let constants = model_constants(latent, tau)?;
    let b = beta(d, n, eta, constants.delta, constants.gamma)?;
    let log = (n as f64 / eta).ln();
    let (delta, gn, df) = (constants.delta, constants.gamma_n, d as f64);

    let x = latent.matrix();
    let p = GramOperator::new(x);
    let noise = spectral_norm(&Difference::new(adj, &p), NORM_TOL, opts)?;

    let (s, mut v) = population_eigenpairs(x)?;
    let vhat = &embedding.vhat;
    for j in 0..d {
        if v.column(j).dot(&vhat.column(j)) < 0.0 {
            v.column_mut(j).neg_mut();
        }
    }
    let shat = &embedding.eigenvalues;

    let eigvec_sq = (vhat - &v).norm_squared();
    let eigval_dev = shat
        .iter()
        .zip(&s)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let inner = (v.transpose() * vhat - DMatrix::identity(d, d)).norm();

    let mut av = DMatrix::zeros(n, d);
    let mut out = vec![0.0; n];
    for j in 0..d {
        let col: Vec<f64> = v.column(j).iter().copied().collect();
        adj.apply(&col, &mut out);
        let scale = 1.0 / shat[j].sqrt();
        for i in 0..n {
            av[(i, j)] = out[i] * scale;
        }
    }
    let projected = (av - &embedding.xhat).norm();

    let alignment = align(&embedding.xhat, x)?;

    let mut entries = vec![
        BoundEntry::new(names::SPECTRAL_NORM, noise, 2.0 * (delta * log).sqrt()),
        BoundEntry::new(
            names::EIGVEC_FROBENIUS,
            eigvec_sq,
            4.0 * df * delta * log / (gn * gn),
        ),
        BoundEntry::new(
            names::EIGVAL_DEVIATION,
            eigval_dev,
            18.0 * df * delta * delta * log / (gn * gn),
        ),
        BoundEntry::new(
            names::EIGVEC_INNER_PRODUCT,
            inner,
            10.0 * df * delta * log / (gn * gn),
        ),
        BoundEntry::new(
            names::PROJECTED_EMBEDDING,
            projected,
            24.0 * 2f64.sqrt() * df * delta * delta * log / gn.powf(2.5),
        ),
        BoundEntry::new(
            names::EIGVAL_MAGNITUDE,
            shat[0],
            (2.0 * delta).min(n as f64),
        ),
        BoundEntry::new(names::TWO_TO_INFINITY, alignment.residual_2inf, b.value),
    ];
    if degree_corrected {
        let c_min = crate::spectral::row_norms(x).fold(f64::INFINITY, f64::min);
        let yhat = project_sphere(&embedding.xhat)?;
        let ytilde = project_sphere(&alignment.apply(x))?;
        entries.push(BoundEntry::new(
            names::SPHERE_TWO_TO_INFINITY,
            two_to_infty_norm(&(yhat - ytilde)),
            2.0 * b.value / c_min,
        ));
    }
    Ok(BoundReport {
        eta,
        constants,
        beta: b,
        entries,
    })
}
