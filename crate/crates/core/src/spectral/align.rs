use nalgebra::DMatrix;
use serde::Serialize;

use super::two_to_infty_norm;
use crate::error::{Error, Result};

/// Orthogonal Procrustes fit of ground truth onto an embedding.
#[derive(Debug, Clone, Serialize)]
pub struct AlignmentResult {
    /// d × d orthogonal matrix minimizing `‖X̂ − X W‖_F`.
    pub w: DMatrix<f64>,
    /// `‖X̂ − X W‖_{2→∞}`
    pub residual_2inf: f64,
    /// `‖X̂ − X W‖_F`
    pub residual_f: f64,
}

impl AlignmentResult {
    /// `X W`, the ground truth expressed in the embedding's frame.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        x * &self.w
    }
}

/// `W = U Vᵀ` from the SVD `Xᵀ X̂ = U Σ Vᵀ`.
pub fn procrustes(xhat: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if xhat.shape() != x.shape() {
        return Err(Error::DimensionMismatch(format!(
            "cannot align {:?} embedding with {:?} positions",
            xhat.shape(),
            x.shape()
        )));
    }
    let cross = x.transpose() * xhat;
    let svd = cross.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    Ok(u * v_t)
}

pub fn align(xhat: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<AlignmentResult> {
    let w = procrustes(xhat, x)?;
    let diff = xhat - x * &w;
    Ok(AlignmentResult {
        residual_2inf: two_to_infty_norm(&diff),
        residual_f: diff.norm(),
        w,
    })
}
