use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::latent::{LatentPositionMatrix, PROBABILITY_SLACK};
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Compactly supported latent-position distributions for i.i.d. sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentDistribution {
    /// Mixture of point masses: `atoms[k]` drawn with probability `weights[k]`.
    PointMasses {
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    /// Uniform on the segment between two points.
    Segment { start: Vec<f64>, end: Vec<f64> },
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LatentDistribution {
    /// Two equally weighted atoms at `(0.5, ±0.4)`.
    pub fn two_point() -> Self {
        LatentDistribution::PointMasses {
            atoms: vec![vec![0.5, 0.4], vec![0.5, -0.4]],
            weights: vec![0.5, 0.5],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LatentDistribution::PointMasses { atoms, .. } => atoms.first().map_or(0, Vec::len),
            LatentDistribution::Segment { start, .. } => start.len(),
        }
    }

    /// Rank of the support's span (atoms with positive weight, or the
    /// segment endpoints).
    pub fn rank(&self) -> usize {
        let rows: Vec<&Vec<f64>> = match self {
            LatentDistribution::PointMasses { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(a, _)| a)
                .collect(),
            LatentDistribution::Segment { start, end } => vec![start, end],
        };
        let d = self.dim();
        let m = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        let s = m.singular_values();
        let top = s.max();
        if top == 0.0 {
            return 0;
        }
        s.iter().filter(|v| **v > 1e-10 * top).count()
    }

    /// Support must keep every inner product inside [0, 1].
    pub fn validate(&self) -> Result<()> {
        let check = |p: f64, what: &str| -> Result<()> {
            if (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "support violates the inner-product constraint: {what} = {p}"
                )))
            }
        };
        match self {
            LatentDistribution::PointMasses { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(Error::InvalidModel(format!(
                        "{} atoms with {} weights",
                        atoms.len(),
                        weights.len()
                    )));
                }
                let d = atoms[0].len();
                if d == 0 || atoms.iter().any(|a| a.len() != d) {
                    return Err(Error::InvalidModel("atoms differ in dimension".into()));
                }
                if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
                    return Err(Error::InvalidModel("negative mixture weight".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidModel(format!(
                        "mixture weights sum to {total}, not 1"
                    )));
                }
                for (i, a) in atoms.iter().enumerate() {
                    for (j, b) in atoms.iter().enumerate().skip(i) {
                        check(inner(a, b), &format!("<atom {i}, atom {j}>"))?;
                    }
                }
            }
            LatentDistribution::Segment { start, end } => {
                if start.is_empty() || start.len() != end.len() {
                    return Err(Error::InvalidModel(
                        "segment endpoints differ in dimension".into(),
                    ));
                }
                // (s + u δ)ᵀ(s + v δ) is bilinear in (u, v) ∈ [0,1]², so its
                // extremes sit at the corners.
                check(inner(start, start), "<start, start>")?;
                check(inner(start, end), "<start, end>")?;
                check(inner(end, end), "<end, end>")?;
            }
        }
        Ok(())
    }
}

/// `n` i.i.d. draws from `dist`, plus the mixture component of each draw
/// (all zero for a segment).
pub fn sample_iid_labeled(
    dist: &LatentDistribution,
    n: usize,
    seed: u64,
) -> Result<(LatentPositionMatrix, Vec<usize>)> {
    dist.validate()?;
    let d = dist.dim();
    let mut rng = rng_from(seed);
    let mut x = DMatrix::zeros(n, d);
    let mut labels = vec![0usize; n];
    match dist {
        LatentDistribution::PointMasses { atoms, weights } => {
            for i in 0..n {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut k = weights.len() - 1;
                for (idx, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        k = idx;
                        break;
                    }
                }
                // Zero-weight atoms are never chosen, even by rounding.
                while weights[k] == 0.0 && k > 0 {
                    k -= 1;
                }
                labels[i] = k;
                for j in 0..d {
                    x[(i, j)] = atoms[k][j];
                }
            }
        }
        LatentDistribution::Segment { start, end } => {
            for i in 0..n {
                let t: f64 = rng.gen();
                for j in 0..d {
                    x[(i, j)] = start[j] + t * (end[j] - start[j]);
                }
            }
        }
    }
    Ok((LatentPositionMatrix::from_trusted(x), labels))
}

pub fn sample_iid_latent(
    dist: &LatentDistribution,
    n: usize,
    seed: u64,
) -> Result<LatentPositionMatrix> {
    sample_iid_labeled(dist, n, seed).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_mixture_repeats_first_atom() {
        let dist = LatentDistribution::PointMasses {
            atoms: vec![vec![0.5, 0.4], vec![0.5, -0.4]],
            weights: vec![1.0, 0.0],
        };
        let x = sample_iid_latent(&dist, 50, 9).unwrap();
        assert!(x.matrix().row_iter().all(|r| r[0] == 0.5 && r[1] == 0.4));
        assert_eq!(dist.rank(), 1);
    }

    #[test]
    fn rejects_infeasible_support() {
        let dist = LatentDistribution::Segment {
            start: vec![0.3, 0.1],
            end: vec![1.5, 0.3],
        };
        assert!(dist.validate().is_err());
        let dist = LatentDistribution::PointMasses {
            atoms: vec![vec![0.5, 0.4], vec![-0.5, 0.1]],
            weights: vec![0.5, 0.5],
        };
        assert!(sample_iid_latent(&dist, 4, 0).is_err());
    }
}
