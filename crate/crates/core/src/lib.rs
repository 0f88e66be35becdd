//! # asecluster
//!
//! Adjacency spectral embedding (ASE) and mean-square-error clustering for
//! stochastic blockmodel (SBM), degree-corrected blockmodel (DCSBM) and random
//! dot product graphs (RDPG), plus the concentration bounds that certify
//! error-free clustering and a seeded Monte-Carlo harness to check them.
//!
//! ## Pipeline
//!
//! ```text
//! BlockModelSpec --sbm_to_latent--> LatentPositionMatrix X
//!     --sample_adjacency(seed)--> AdjacencySample A
//!     --ase(d)--> SpectralEmbedding (X̂ = V̂ Ŝ^{1/2})
//!     --[project_sphere]--> Ŷ           (degree-corrected models)
//!     --mse_cluster(K)--> labels τ̂
//!     --misclustering_count--> min over π of |{i : τ(i) ≠ π(τ̂(i))}|
//! ```
//!
//! The [`bounds`] module evaluates the model constants (maximum expected
//! degree Δ and eigengap γn), the 2→∞ error bound β and the separation and
//! eigengap assumptions that guarantee perfect clustering. [`harness`] runs
//! the whole pipeline over seeds and vertex counts.
//!
//! ## Quick start
//!
//! ```rust
//! use asecluster::graph_models::{presets, sample_adjacency};
//! use asecluster::spectral::{ase, EigenOptions};
//! use asecluster::clustering::{mse_cluster, misclustering_count};
//!
//! let spec = presets::dense_two_block().build(200, 0).unwrap();
//! let x = spec.latent_positions().unwrap();
//! let a = sample_adjacency(&x, 42).unwrap();
//! let emb = ase(&a, 2, &EigenOptions::default()).unwrap();
//! let fit = mse_cluster(&emb.xhat, 2, 8, 1).unwrap();
//! let report = misclustering_count(spec.tau(), &fit.labels, 2).unwrap();
//! assert!(report.count <= 5);
//! ```

pub mod bounds;
pub mod clustering;
pub mod error;
pub mod graph_models;
pub mod harness;
pub mod io;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};

pub use bounds::{AssumptionReport, BoundEntry, BoundReport, ModelConstants};
pub use clustering::{ClusteringResult, Loss, MisclusterReport};
pub use graph_models::{
    AdjacencySample, BlockModelSpec, LatentDistribution, LatentPositionMatrix, ModelConfig,
};
pub use harness::{SweepSummary, TrialConfig, TrialRecord};
pub use spectral::{AlignmentResult, EigenOptions, SpectralEmbedding, SymmetricOperator};
