use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::latent::{dot, LatentPositionMatrix, PROBABILITY_SLACK};
use crate::error::{Error, Result};
use crate::spectral::SymmetricOperator;

/// Largest vertex count stored as a dense bit matrix.
pub const DENSE_STORAGE_MAX: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageKind {
    /// Bit-packed for `n <= DENSE_STORAGE_MAX`, edge list beyond.
    Auto,
    Bits,
    EdgeList,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Full symmetric bit matrix, `words` u64 per row.
    Bits { words: usize, bits: Vec<u64> },
    /// Sorted upper-triangular edges plus a CSR neighbor index.
    EdgeList {
        edges: Vec<(u32, u32)>,
        offsets: Vec<usize>,
        neighbors: Vec<u32>,
    },
}

/// Symmetric, hollow, binary adjacency matrix together with the seed that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencySample {
    n: usize,
    seed: u64,
    storage: Storage,
}

impl AdjacencySample {
    /// Builds a sample from undirected edges. Duplicates and either
    /// orientation are accepted; self-loops and out-of-range endpoints are not.
    pub fn from_edges(
        n: usize,
        seed: u64,
        edges: impl IntoIterator<Item = (usize, usize)>,
        kind: StorageKind,
    ) -> Result<Self> {
        let mut upper = Vec::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidModel(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidModel(format!(
                    "edge ({i}, {j}) has an endpoint outside [0, {n})"
                )));
            }
            upper.push((i.min(j) as u32, i.max(j) as u32));
        }
        upper.sort_unstable();
        upper.dedup();
        Ok(Self::from_sorted_upper(n, seed, upper, kind))
    }

    fn from_sorted_upper(n: usize, seed: u64, edges: Vec<(u32, u32)>, kind: StorageKind) -> Self {
        let use_bits = match kind {
            StorageKind::Auto => n <= DENSE_STORAGE_MAX,
            StorageKind::Bits => true,
            StorageKind::EdgeList => false,
        };
        let storage = if use_bits {
            let words = n.div_ceil(64);
            let mut bits = vec![0u64; n * words];
            for &(i, j) in &edges {
                let (i, j) = (i as usize, j as usize);
                bits[i * words + j / 64] |= 1 << (j % 64);
                bits[j * words + i / 64] |= 1 << (i % 64);
            }
            Storage::Bits { words, bits }
        } else {
            let mut degree = vec![0usize; n];
            for &(i, j) in &edges {
                degree[i as usize] += 1;
                degree[j as usize] += 1;
            }
            let mut offsets = vec![0usize; n + 1];
            for i in 0..n {
                offsets[i + 1] = offsets[i] + degree[i];
            }
            let mut fill = offsets.clone();
            let mut neighbors = vec![0u32; offsets[n]];
            for &(i, j) in &edges {
                neighbors[fill[i as usize]] = j;
                fill[i as usize] += 1;
                neighbors[fill[j as usize]] = i;
                fill[j as usize] += 1;
            }
            for i in 0..n {
                neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
            }
            Storage::EdgeList {
                edges,
                offsets,
                neighbors,
            }
        };
        AdjacencySample { n, seed, storage }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_bit_packed(&self) -> bool {
        matches!(self.storage, Storage::Bits { .. })
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match &self.storage {
            Storage::Bits { words, bits } => bits[i * words + j / 64] >> (j % 64) & 1 == 1,
            Storage::EdgeList {
                offsets, neighbors, ..
            } => neighbors[offsets[i]..offsets[i + 1]]
                .binary_search(&(j as u32))
                .is_ok(),
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        match &self.storage {
            Storage::Bits { words, bits } => bits[i * words..(i + 1) * words]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum(),
            Storage::EdgeList { offsets, .. } => offsets[i + 1] - offsets[i],
        }
    }

    /// Neighbors of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        match &self.storage {
            Storage::Bits { words, bits } => {
                let mut out = Vec::new();
                for (w, &word) in bits[i * words..(i + 1) * words].iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        out.push(w * 64 + word.trailing_zeros() as usize);
                        word &= word - 1;
                    }
                }
                out
            }
            Storage::EdgeList {
                offsets, neighbors, ..
            } => neighbors[offsets[i]..offsets[i + 1]]
                .iter()
                .map(|&j| j as usize)
                .collect(),
        }
    }

    /// Upper-triangular edges `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match &self.storage {
            Storage::Bits { .. } => (0..self.n)
                .flat_map(|i| {
                    self.neighbors(i)
                        .into_iter()
                        .filter(move |&j| j > i)
                        .map(move |j| (i, j))
                })
                .collect(),
            Storage::EdgeList { edges, .. } => edges
                .iter()
                .map(|&(i, j)| (i as usize, j as usize))
                .collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match &self.storage {
            Storage::Bits { bits, .. } => {
                bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
            }
            Storage::EdgeList { edges, .. } => edges.len(),
        }
    }
}

impl SymmetricOperator for AdjacencySample {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.storage {
            Storage::Bits { words, bits } => {
                y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                    let mut acc = 0.0;
                    for (w, &word) in bits[i * words..(i + 1) * words].iter().enumerate() {
                        let mut word = word;
                        let base = w * 64;
                        while word != 0 {
                            acc += x[base + word.trailing_zeros() as usize];
                            word &= word - 1;
                        }
                    }
                    *yi = acc;
                });
            }
            Storage::EdgeList {
                offsets, neighbors, ..
            } => {
                y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                    *yi = neighbors[offsets[i]..offsets[i + 1]]
                        .iter()
                        .map(|&j| x[j as usize])
                        .sum();
                });
            }
        }
    }
}

/// One row's random stream: ChaCha8 keyed by `seed`, stream id = row index.
/// Rows are therefore independent of the order in which they are generated.
fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Draws `A ~ RDPG(X)`: each `A_ij`, `i < j`, is an independent
/// Bernoulli(`X_iᵀ X_j`). Deterministic in `(X, seed)`.
pub fn sample_adjacency(x: &LatentPositionMatrix, seed: u64) -> Result<AdjacencySample> {
    sample_adjacency_with(x, seed, StorageKind::Auto)
}

pub fn sample_adjacency_with(
    x: &LatentPositionMatrix,
    seed: u64,
    kind: StorageKind,
) -> Result<AdjacencySample> {
    let n = x.n();
    let d = x.d();
    let rows = x.rows();
    let per_row: Vec<Result<Vec<u32>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = row_rng(seed, i);
            let xi = &rows[i * d..(i + 1) * d];
            let mut out = Vec::new();
            for j in (i + 1)..n {
                let p = dot(xi, &rows[j * d..(j + 1) * d]);
                if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) || p.is_nan() {
                    return Err(Error::ProbabilityOutOfRange { i, j, value: p });
                }
                let u: f64 = rng.gen();
                if u < p.clamp(0.0, 1.0) {
                    out.push(j as u32);
                }
            }
            Ok(out)
        })
        .collect();
    let mut edges = Vec::new();
    for (i, row) in per_row.into_iter().enumerate() {
        edges.extend(row?.into_iter().map(|j| (i as u32, j)));
    }
    Ok(AdjacencySample::from_sorted_upper(n, seed, edges, kind))
}
