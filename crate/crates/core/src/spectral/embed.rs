use nalgebra::DMatrix;
use serde::Serialize;

use super::eigen::{eig_sym, EigenOptions};
use super::operator::SymmetricOperator;
use crate::error::{Error, Result};

/// `X̂ = V̂ Ŝ^{1/2}` from the `d` algebraically largest eigenpairs.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEmbedding {
    /// n × d embedded coordinates, one row per vertex.
    pub xhat: DMatrix<f64>,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// n × d orthonormal eigenvectors.
    pub vhat: DMatrix<f64>,
}

impl SpectralEmbedding {
    pub fn n(&self) -> usize {
        self.xhat.nrows()
    }

    pub fn d(&self) -> usize {
        self.xhat.ncols()
    }
}

/// Adjacency spectral embedding of `a` into `d` dimensions.
///
/// Fails with [`Error::NonPositiveSpectrum`] when any retained eigenvalue is
/// not strictly positive; no coordinates are fabricated in that case.
pub fn ase(a: &dyn SymmetricOperator, d: usize, opts: &EigenOptions) -> Result<SpectralEmbedding> {
    let pairs = eig_sym(a, d, opts)?;
    if let Some((index, &value)) = pairs.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositiveSpectrum { index, value });
    }
    let mut xhat = pairs.vectors.clone();
    for (j, lambda) in pairs.values.iter().enumerate() {
        xhat.column_mut(j).scale_mut(lambda.sqrt());
    }
    Ok(SpectralEmbedding {
        xhat,
        eigenvalues: pairs.values,
        vhat: pairs.vectors,
    })
}
