//! Mean-square-error clustering, misclustering error under the optimal label
//! permutation, and the empirical clustering objective Φ.

mod assignment;
mod kmeans;
mod objective;

pub use assignment::{confusion_table, min_cost_assignment, misclustering_count, MisclusterReport};
pub use kmeans::{
    canonical_labels, count_distinct_rows, mse_cluster, mse_cluster_with, ClusteringResult,
    KMeansOptions, DEFAULT_RESTARTS,
};
pub use objective::{phi_objective, Loss};
