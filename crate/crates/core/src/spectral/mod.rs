//! Symmetric eigensolvers, adjacency spectral embedding, Procrustes alignment
//! and the unit-sphere projection used for degree-corrected models.

mod align;
pub mod dense;
mod eigen;
mod embed;
pub mod lanczos;
mod operator;

use nalgebra::DMatrix;

pub use align::{align, procrustes, AlignmentResult};
pub use eigen::{
    canonical_signs, eig_sym, eig_sym_which, spectral_norm, EigenMethod, EigenOptions, EigenPairs,
};
pub use embed::{ase, SpectralEmbedding};
pub use lanczos::{LanczosOptions, Which};
pub use operator::{Difference, GramOperator, SymmetricOperator};

use crate::error::{Error, Result};

/// Maximum Euclidean row norm.
pub fn two_to_infty_norm(m: &DMatrix<f64>) -> f64 {
    row_norms(m).fold(0.0, f64::max)
}

pub(crate) fn row_norms(m: &DMatrix<f64>) -> impl Iterator<Item = f64> + '_ {
    m.row_iter().map(|r| r.norm())
}

/// Divides every row by its Euclidean norm: `Ŷ = diag(X̂ X̂ᵀ)^{-1/2} X̂`.
pub fn project_sphere(xhat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = xhat.clone();
    for (index, mut row) in out.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm <= 1e-12 {
            return Err(Error::ZeroRow { index });
        }
        row /= norm;
    }
    Ok(out)
}
