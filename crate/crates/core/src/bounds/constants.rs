use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_models::LatentPositionMatrix;
use crate::spectral::dense::symmetric_eigen;

/// Eigenvalues of P below this fraction of the largest count as zero.
pub const ZERO_EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues within this relative distance are treated as equal.
pub const DISTINCT_EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub n: usize,
    /// `Δ = max_i Σ_{j≠i} P_ij`
    pub delta: f64,
    /// Minimum gap among the distinct eigenvalues of P (including 0), over n.
    pub gamma: f64,
    pub gamma_n: f64,
    /// Rank of P.
    pub d: usize,
    pub k: usize,
    pub n_min: usize,
    pub block_sizes: Vec<usize>,
    /// Nonzero eigenvalues of P, descending, with multiplicity.
    pub nonzero_eigenvalues: Vec<f64>,
    /// Distinct eigenvalues of P, descending; ends with 0 when `d < n`.
    pub eigenvalues_p: Vec<f64>,
    /// `min_i (λ_i − λ_{i+1}) / λ_i` over consecutive nonzero eigenvalues;
    /// `None` when `d < 2`.
    pub min_relative_gap: Option<f64>,
}

/// Eigenvalues of `P = X Xᵀ` via the d × d Gram matrix `Xᵀ X`, which has the
/// same nonzero spectrum. Returned descending.
pub fn gram_eigenvalues(x: &LatentPositionMatrix) -> Result<Vec<f64>> {
    let m = x.matrix();
    let mut values = symmetric_eigen(&(m.transpose() * m))?.values;
    values.reverse();
    Ok(values)
}

pub fn block_sizes(tau: &[usize]) -> Vec<usize> {
    let k = tau.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; k];
    for &t in tau {
        sizes[t] += 1;
    }
    sizes
}

/// Exact Δ, γ, d and block sizes of the model with latent positions `x` and
/// memberships `tau`.
pub fn model_constants(x: &LatentPositionMatrix, tau: &[usize]) -> Result<ModelConstants> {
    let (n, d) = (x.n(), x.d());
    if tau.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} vertices",
            tau.len(),
            n
        )));
    }
    let rows = x.rows();
    let mut total = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            total[j] += rows[i * d + j];
        }
    }
    // Row sum of P without the diagonal: X_iᵀ Σ_j X_j − ‖X_i‖².
    let delta = (0..n)
        .map(|i| {
            let r = &rows[i * d..(i + 1) * d];
            let s: f64 = r.iter().zip(&total).map(|(a, b)| a * b).sum();
            let own: f64 = r.iter().map(|a| a * a).sum();
            s - own
        })
        .fold(0.0f64, f64::max);

    let all = gram_eigenvalues(x)?;
    let top = all.first().copied().unwrap_or(0.0).max(0.0);
    let nonzero: Vec<f64> = all
        .iter()
        .copied()
        .filter(|&v| top > 0.0 && v > ZERO_EIGEN_TOL * top)
        .collect();
    let rank = nonzero.len();

    let min_relative_gap = nonzero
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .reduce(f64::min);

    let mut distinct: Vec<f64> = Vec::with_capacity(rank + 1);
    for &v in &nonzero {
        match distinct.last() {
            Some(&last) if last - v <= DISTINCT_EIGEN_TOL * last => {}
            _ => distinct.push(v),
        }
    }
    let gamma_n = if distinct.is_empty() {
        0.0
    } else {
        distinct
            .iter()
            .zip(distinct.iter().skip(1).chain(std::iter::once(&0.0)))
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min)
    };
    if rank < n {
        distinct.push(0.0);
    }

    let sizes = block_sizes(tau);
    let present: Vec<usize> = sizes.iter().copied().filter(|&s| s > 0).collect();
    Ok(ModelConstants {
        n,
        delta,
        gamma: if n > 0 { gamma_n / n as f64 } else { 0.0 },
        gamma_n,
        d: rank,
        k: present.len(),
        n_min: present.iter().copied().min().unwrap_or(0),
        block_sizes: sizes,
        nonzero_eigenvalues: nonzero,
        eigenvalues_p: distinct,
        min_relative_gap,
    })
}

/// The 2→∞ error bound `β = 85 d Δ³ log(n/η) / (γn)^{7/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta {
    pub value: f64,
    /// Set when `γn < 4 √(Δ log(n/η))`; the value is still the formula.
    pub hypothesis_violated: bool,
}

pub fn beta(d: usize, n: usize, eta: f64, delta: f64, gamma: f64) -> Result<Beta> {
    check_eta(eta)?;
    if n == 0 {
        return Err(Error::param("n", n, "need at least one vertex"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param("delta", delta, "must be positive"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", gamma, "must be positive"));
    }
    let log = (n as f64 / eta).ln();
    let gn = gamma * n as f64;
    Ok(Beta {
        value: 85.0 * d as f64 * delta.powi(3) * log / gn.powf(3.5),
        hypothesis_violated: gn < 4.0 * (delta * log).sqrt(),
    })
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 0.5 {
        Ok(())
    } else {
        Err(Error::param("eta", eta, "must lie in (0, 1/2)"))
    }
}
