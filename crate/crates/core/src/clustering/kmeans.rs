use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_models::LatentPositionMatrix;
use crate::rng::{derive_seed, rng_from};

pub const DEFAULT_RESTARTS: usize = 32;

#[derive(Debug, Clone)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            max_iter: 500,
        }
    }
}

/// Best MSE clustering found over the restarts.
#[derive(Debug, Clone, Serialize)]
pub struct ClusteringResult {
    /// K × d; row k is the mean of the points labeled k.
    pub centroids: DMatrix<f64>,
    pub labels: Vec<usize>,
    /// `‖Ĉ − X̂‖_F²`
    pub sse: f64,
    pub restarts_used: usize,
    pub converged: bool,
    pub iterations: usize,
    /// SSE after each Lloyd update of the winning restart.
    pub sse_history: Vec<f64>,
    /// Other restarts that reached the same SSE (within 1e-12) with a
    /// different partition.
    pub ties: usize,
}

struct Run {
    centroids: Vec<f64>,
    labels: Vec<usize>,
    sse: f64,
    converged: bool,
    iterations: usize,
    history: Vec<f64>,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Number of distinct rows (exact comparison).
pub fn count_distinct_rows(points: &DMatrix<f64>) -> usize {
    let (n, d) = points.shape();
    let mut keys: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..d).map(|j| (points[(i, j)] + 0.0).to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Relabels so that labels appear in order of first occurrence.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// MSE (K-means) clustering of the rows of `points` into `k` clusters.
pub fn mse_cluster(
    points: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusteringResult> {
    mse_cluster_with(
        points,
        k,
        &KMeansOptions {
            restarts,
            seed,
            ..KMeansOptions::default()
        },
    )
}

pub fn mse_cluster_with(
    points: &DMatrix<f64>,
    k: usize,
    opts: &KMeansOptions,
) -> Result<ClusteringResult> {
    let (n, d) = points.shape();
    if k == 0 {
        return Err(Error::param("k", k, "need at least one cluster"));
    }
    if opts.restarts == 0 {
        return Err(Error::param("restarts", 0, "need at least one restart"));
    }
    let distinct = count_distinct_rows(points);
    if k > distinct {
        return Err(Error::TooFewDistinctRows { k, distinct });
    }
    let rows = LatentPositionMatrix::from_trusted(points.clone()).rows();

    let runs: Vec<Run> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| lloyd(&rows, n, d, k, derive_seed(opts.seed, &[r as u64]), opts))
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.sse.total_cmp(&b.1.sse).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best_partition = canonical_labels(&runs[best].labels);
    let tie_tol = 1e-12 * runs[best].sse.max(1.0);
    let ties = runs
        .iter()
        .enumerate()
        .filter(|(i, r)| {
            *i != best
                && (r.sse - runs[best].sse).abs() <= tie_tol
                && canonical_labels(&r.labels) != best_partition
        })
        .count();

    let run = runs.into_iter().nth(best).expect("index in range");
    Ok(ClusteringResult {
        centroids: DMatrix::from_row_slice(k, d, &run.centroids),
        labels: run.labels,
        sse: run.sse,
        restarts_used: opts.restarts,
        converged: run.converged,
        iterations: run.iterations,
        sse_history: run.history,
        ties,
    })
}

fn kmeans_plus_plus(rows: &[f64], n: usize, d: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k * d);
    let first = rng.gen_range(0..n);
    centroids.extend_from_slice(&rows[first * d..(first + 1) * d]);
    let mut dist: Vec<f64> = (0..n)
        .map(|i| sq_dist(&rows[i * d..(i + 1) * d], &centroids[0..d]))
        .collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in dist.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
        }
        // k <= distinct rows guarantees some positive weight remains.
        let pick = pick.expect("a point not yet chosen as a center");
        centroids.extend_from_slice(&rows[pick * d..(pick + 1) * d]);
        let new = &centroids[c * d..(c + 1) * d];
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(&rows[i * d..(i + 1) * d], new));
        }
    }
    centroids
}

/// Nearest centroid with lowest index winning ties; returns whether any
/// label changed.
fn assign(rows: &[f64], d: usize, k: usize, centroids: &[f64], labels: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, label) in labels.iter_mut().enumerate() {
        let x = &rows[i * d..(i + 1) * d];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let dc = sq_dist(x, &centroids[c * d..(c + 1) * d]);
            if dc < best_d {
                best_d = dc;
                best = c;
            }
        }
        if *label != best {
            *label = best;
            changed = true;
        }
    }
    changed
}

/// Reseeds each empty cluster at the point farthest from its current
/// centroid, taken from a cluster with at least two members.
fn repair_empty(rows: &[f64], d: usize, k: usize, centroids: &mut [f64], labels: &mut [usize]) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &l) in labels.iter().enumerate() {
            if counts[l] < 2 {
                continue;
            }
            let dist = sq_dist(&rows[i * d..(i + 1) * d], &centroids[l * d..(l + 1) * d]);
            if dist > far_d {
                far_d = dist;
                far = Some(i);
            }
        }
        let Some(p) = far else { return };
        labels[p] = empty;
        centroids[empty * d..(empty + 1) * d].copy_from_slice(&rows[p * d..(p + 1) * d]);
    }
}

/// Cluster means, accumulated as offsets from each cluster's first member so
/// that a cluster of identical rows has that row as its exact mean.
pub(crate) fn means(rows: &[f64], d: usize, k: usize, labels: &[usize], centroids: &mut [f64]) {
    let mut first = vec![usize::MAX; k];
    let mut counts = vec![0usize; k];
    let mut acc = vec![0.0; k * d];
    for (i, &l) in labels.iter().enumerate() {
        if first[l] == usize::MAX {
            first[l] = i;
        }
        counts[l] += 1;
        let f = first[l];
        for j in 0..d {
            acc[l * d + j] += rows[i * d + j] - rows[f * d + j];
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let f = first[c];
            for j in 0..d {
                centroids[c * d + j] = rows[f * d + j] + acc[c * d + j] / counts[c] as f64;
            }
        }
    }
}

pub(crate) fn sse_of(rows: &[f64], d: usize, labels: &[usize], centroids: &[f64]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(&rows[i * d..(i + 1) * d], &centroids[l * d..(l + 1) * d]))
        .sum()
}

fn lloyd(rows: &[f64], n: usize, d: usize, k: usize, seed: u64, opts: &KMeansOptions) -> Run {
    let mut rng = rng_from(seed);
    let mut centroids = kmeans_plus_plus(rows, n, d, k, &mut rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut prev: Option<(Vec<usize>, Vec<f64>)> = None;
    let mut prev_sse = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let changed = assign(rows, d, k, &centroids, &mut labels);
        repair_empty(rows, d, k, &mut centroids, &mut labels);
        means(rows, d, k, &labels, &mut centroids);
        let sse = sse_of(rows, d, &labels, &centroids);
        if sse > prev_sse {
            // Rounding noise at a fixed point: keep the previous state so the
            // recorded sequence stays monotone.
            let (l, c) = prev.take().expect("previous state exists after first pass");
            labels = l;
            centroids = c;
            converged = true;
            break;
        }
        history.push(sse);
        // Stop at a fixed point of the assignment step, so that every label
        // is a nearest-centroid assignment.
        if !changed {
            converged = true;
            break;
        }
        prev_sse = sse;
        prev = Some((labels.clone(), centroids.clone()));
    }
    let sse = *history.last().expect("at least one Lloyd pass");
    Run {
        centroids,
        labels,
        sse,
        converged,
        iterations,
        history,
    }
}
