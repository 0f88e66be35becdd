//! Latent-position graph models (RDPG, SBM, DCSBM), the block-to-latent
//! factorization, and seeded adjacency sampling.

mod adjacency;
mod block;
mod config;
mod distribution;
mod latent;

pub use adjacency::{
    sample_adjacency, sample_adjacency_with, AdjacencySample, StorageKind, DENSE_STORAGE_MAX,
};
pub use block::{sbm_to_latent, BlockModelSpec, PSD_TOL, RANK_TOL};
pub use config::{presets, scale_block_sizes, DegreeFactors, Membership, ModelConfig};
pub use distribution::{sample_iid_labeled, sample_iid_latent, LatentDistribution};
pub use latent::{LatentPositionMatrix, PROBABILITY_SLACK};
