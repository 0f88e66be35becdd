use nalgebra::DMatrix;

use super::latent::LatentPositionMatrix;
use crate::error::{Error, Result};
use crate::spectral::{canonical_signs, dense::symmetric_eigen};

/// Eigenvalues of B below this (relative to the largest) are dropped when
/// factoring B into latent positions.
pub const RANK_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of B.
pub const PSD_TOL: f64 = -1e-10;

/// K-block model: block probability matrix, memberships and, for the
/// degree-corrected variant, per-vertex scaling factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModelSpec {
    b: DMatrix<f64>,
    tau: Vec<usize>,
    degree_factors: Option<Vec<f64>>,
}

impl BlockModelSpec {
    pub fn new(b: DMatrix<f64>, tau: Vec<usize>, degree_factors: Option<Vec<f64>>) -> Result<Self> {
        let k = b.nrows();
        if k == 0 || b.ncols() != k {
            return Err(Error::InvalidModel(format!(
                "B must be a non-empty square matrix, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let v = b[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidModel(format!(
                        "B[{i}][{j}] = {v} is not a probability"
                    )));
                }
                if (v - b[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidModel(format!(
                        "B is not symmetric: B[{i}][{j}] = {v} but B[{j}][{i}] = {}",
                        b[(j, i)]
                    )));
                }
            }
        }
        let min_eigenvalue = symmetric_eigen(&b)?.values[0];
        if min_eigenvalue < PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }

        let mut sizes = vec![0usize; k];
        for (index, &label) in tau.iter().enumerate() {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
            sizes[label] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidModel(format!("block {empty} has no members")));
        }

        if let Some(c) = &degree_factors {
            if c.len() != tau.len() {
                return Err(Error::InvalidModel(format!(
                    "{} degree factors for {} vertices",
                    c.len(),
                    tau.len()
                )));
            }
            if let Some((i, v)) = c
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v > 0.0 && **v < 1.0))
            {
                return Err(Error::InvalidModel(format!(
                    "degree factor c[{i}] = {v} is outside (0, 1)"
                )));
            }
            if let Some(kk) = (0..k).find(|&kk| (b[(kk, kk)] - 1.0).abs() > 1e-10) {
                return Err(Error::InvalidModel(format!(
                    "degree-corrected models need unit block directions, but B[{kk}][{kk}] = {}",
                    b[(kk, kk)]
                )));
            }
        }
        Ok(BlockModelSpec {
            b,
            tau,
            degree_factors,
        })
    }

    /// Contiguous blocks: the first `sizes[0]` vertices in block 0, and so on.
    pub fn with_block_sizes(
        b: DMatrix<f64>,
        sizes: &[usize],
        degree_factors: Option<Vec<f64>>,
    ) -> Result<Self> {
        if sizes.len() != b.nrows() {
            return Err(Error::InvalidModel(format!(
                "{} block sizes for K = {}",
                sizes.len(),
                b.nrows()
            )));
        }
        let tau = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
            .collect();
        Self::new(b, tau, degree_factors)
    }

    pub fn k(&self) -> usize {
        self.b.nrows()
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn degree_factors(&self) -> Option<&[f64]> {
        self.degree_factors.as_deref()
    }

    pub fn is_degree_corrected(&self) -> bool {
        self.degree_factors.is_some()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &t in &self.tau {
            sizes[t] += 1;
        }
        sizes
    }

    /// Numerical rank of B, the latent dimension d.
    pub fn rank(&self) -> usize {
        self.block_vectors().ncols()
    }

    /// K × d matrix whose rows reproduce B as a Gram matrix. For
    /// degree-corrected models the rows are normalized to unit length.
    pub fn block_vectors(&self) -> DMatrix<f64> {
        let mut nu = factor_psd(&self.b);
        if self.is_degree_corrected() {
            for mut row in nu.row_iter_mut() {
                let norm = row.norm();
                row /= norm;
            }
        }
        nu
    }

    /// The latent positions; see [`sbm_to_latent`].
    pub fn latent_positions(&self) -> Result<LatentPositionMatrix> {
        sbm_to_latent(self)
    }
}

/// `V_B Λ_B^{1/2}` over the eigenpairs of B above [`RANK_TOL`] (relative),
/// eigenvalues descending.
fn factor_psd(b: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = symmetric_eigen(b).expect("validated at construction");
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&i| eig.values[i] > RANK_TOL * top && eig.values[i] > 0.0)
        .collect();
    let k = b.nrows();
    let mut vecs = DMatrix::from_fn(k, kept.len(), |r, c| eig.vectors[(r, kept[c])]);
    canonical_signs(&mut vecs);
    for (c, &i) in kept.iter().enumerate() {
        vecs.column_mut(c).scale_mut(eig.values[i].sqrt());
    }
    vecs
}

/// Latent positions with `X_iᵀ X_j = c_i c_j B[τ(i), τ(j)]` (c ≡ 1 without
/// degree correction). The result differs from any other factorization of
/// B only by an orthogonal transform.
pub fn sbm_to_latent(spec: &BlockModelSpec) -> Result<LatentPositionMatrix> {
    let nu = spec.block_vectors();
    let d = nu.ncols();
    let n = spec.n();
    let mut x = DMatrix::zeros(n, d);
    for (i, &t) in spec.tau.iter().enumerate() {
        let c = spec.degree_factors.as_ref().map_or(1.0, |c| c[i]);
        for j in 0..d {
            x[(i, j)] = c * nu[(t, j)];
        }
    }
    Ok(LatentPositionMatrix::from_trusted(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn rejects_indefinite_b() {
        let b = dmatrix![0.1, 0.9; 0.9, 0.1];
        assert!(matches!(
            BlockModelSpec::with_block_sizes(b, &[2, 2], None),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn rejects_empty_blocks_and_bad_factors() {
        let b = dmatrix![0.5, 0.1; 0.1, 0.5];
        assert!(BlockModelSpec::with_block_sizes(b.clone(), &[3, 0], None).is_err());
        assert!(BlockModelSpec::new(b.clone(), vec![0, 2], None).is_err());
        let unit = dmatrix![1.0, 0.2; 0.2, 1.0];
        assert!(BlockModelSpec::new(unit.clone(), vec![0, 1], Some(vec![0.5, 1.0])).is_err());
        assert!(BlockModelSpec::new(unit, vec![0, 1], Some(vec![0.5, 0.3])).is_ok());
        // Degree correction needs unit-norm directions.
        assert!(BlockModelSpec::new(b, vec![0, 1], Some(vec![0.5, 0.3])).is_err());
    }

    #[test]
    fn single_block_all_ones() {
        let spec = BlockModelSpec::with_block_sizes(dmatrix![1.0], &[3], None).unwrap();
        let x = spec.latent_positions().unwrap();
        assert_eq!(x.d(), 1);
        let p = x.probability_matrix();
        assert!((p - DMatrix::from_element(3, 3, 1.0)).abs().max() < 1e-15);
        assert!(x.matrix().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rank_deficient_b_gives_lower_dimension() {
        // Rank-one B: every block row is a multiple of the same vector.
        let b = dmatrix![0.36, 0.24; 0.24, 0.16];
        let spec = BlockModelSpec::with_block_sizes(b, &[2, 2], None).unwrap();
        assert_eq!(spec.rank(), 1);
    }
}
