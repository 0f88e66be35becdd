use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{mse_cluster, phi_objective, Loss, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::graph_models::{sample_adjacency, sample_iid_labeled, LatentDistribution};
use crate::rng::{derive_seed, StageSeeds};
use crate::spectral::{ase, EigenOptions};

#[derive(Debug, Clone)]
pub struct ConsistencyOptions {
    pub restarts: usize,
    pub loss: Loss,
    pub eigen: EigenOptions,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions {
            restarts: DEFAULT_RESTARTS,
            loss: Loss::Square,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub degenerate: bool,
    /// `Φ(C_n, F_n)` at the clustering of the true positions.
    pub phi_true: Option<f64>,
    /// `Φ(Ĉ_n, F̂_n)` at the clustering of the embedded positions.
    pub phi_embedded: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub k: usize,
    pub base_seed: u64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    /// Sorted by `(n, trial)`.
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn row(&self, n: usize, trial: usize) -> Option<&ConsistencyRow> {
        self.rows.iter().find(|r| r.n == n && r.trial == trial)
    }

    /// Mean gap over non-degenerate trials at `n`.
    pub fn mean_gap(&self, n: usize) -> Option<f64> {
        let gaps: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.gap)
            .collect();
        (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
    }
}

/// Seed of trial `trial` at `n`. Trials with the same index share the
/// first-level seed across n, which pairs them.
pub fn paired_seed(base_seed: u64, trial: usize, n: usize) -> u64 {
    derive_seed(derive_seed(base_seed, &[trial as u64]), &[n as u64])
}

/// For each n and trial: draw X i.i.d. from `dist`, embed a sampled graph,
/// and compare the K-cluster objective of the true and embedded positions.
pub fn consistency_experiment(
    dist: &LatentDistribution,
    n_grid: &[usize],
    k: usize,
    trials: usize,
    seed: u64,
    opts: &ConsistencyOptions,
) -> Result<ConsistencyReport> {
    dist.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", 0, "need at least one trial"));
    }
    let d = dist.rank();
    let tasks: Vec<(usize, usize)> = n_grid
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    let mut rows = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let seed = paired_seed(seed, trial, n);
            let s = StageSeeds::new(seed);
            let (x, _) = sample_iid_labeled(dist, n, s.model)?;
            let degenerate = ConsistencyRow {
                n,
                trial,
                seed,
                degenerate: true,
                phi_true: None,
                phi_embedded: None,
                gap: None,
            };
            let truth = match mse_cluster(x.matrix(), k, opts.restarts, s.cluster) {
                Ok(f) => f,
                Err(Error::TooFewDistinctRows { .. }) => return Ok(degenerate),
                Err(e) => return Err(e),
            };
            let a = sample_adjacency(&x, s.graph)?;
            let emb = match ase(&a, d, &opts.eigen) {
                Ok(e) => e,
                Err(Error::NonPositiveSpectrum { .. }) => return Ok(degenerate),
                Err(e) => return Err(e),
            };
            let fit = match mse_cluster(&emb.xhat, k, opts.restarts, s.cluster) {
                Ok(f) => f,
                Err(Error::TooFewDistinctRows { .. }) => return Ok(degenerate),
                Err(e) => return Err(e),
            };
            let phi_true = phi_objective(x.matrix(), &truth.centroids, opts.loss)?;
            let phi_embedded = phi_objective(&emb.xhat, &fit.centroids, opts.loss)?;
            Ok(ConsistencyRow {
                n,
                trial,
                seed,
                degenerate: false,
                phi_true: Some(phi_true),
                phi_embedded: Some(phi_embedded),
                gap: Some((phi_embedded - phi_true).abs()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));
    Ok(ConsistencyReport {
        k,
        base_seed: seed,
        n_grid: n_grid.to_vec(),
        trials,
        rows,
    })
}
