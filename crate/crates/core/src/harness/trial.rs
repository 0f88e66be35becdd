use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundEntry};
use crate::clustering::{misclustering_count, mse_cluster, ClusteringResult, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::graph_models::{sample_adjacency, BlockModelSpec, LatentPositionMatrix, ModelConfig};
use crate::rng::StageSeeds;
use crate::spectral::{
    align, ase, project_sphere, EigenOptions, SpectralEmbedding, SymmetricOperator,
};

pub const DEFAULT_ETA: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub model: ModelConfig,
    pub eta: f64,
    pub restarts: usize,
    /// Embedding dimension; defaults to the model's.
    pub d: Option<usize>,
    /// Embed P itself instead of a sampled A.
    pub noiseless: bool,
    pub compute_bounds: bool,
    pub eigen: EigenOptions,
}

impl TrialConfig {
    pub fn new(model: ModelConfig) -> Self {
        TrialConfig {
            model,
            eta: DEFAULT_ETA,
            restarts: DEFAULT_RESTARTS,
            d: None,
            noiseless: false,
            compute_bounds: true,
            eigen: EigenOptions::default(),
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_bounds(mut self, on: bool) -> Self {
        self.compute_bounds = on;
        self
    }

    pub fn noiseless(mut self, on: bool) -> Self {
        self.noiseless = on;
        self
    }
}

/// Wall-clock seconds per stage. Kept out of the records file so that it
/// stays byte-identical across runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub sample: f64,
    pub embed: f64,
    pub cluster: f64,
    pub bounds: f64,
}

/// Measurements of one seeded trial. Fields other than the identifiers are
/// `None` when the trial is degenerate. Equality ignores `timings`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub model_id: String,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub degenerate: bool,
    pub degenerate_reason: Option<String>,
    pub eigenvalues: Vec<f64>,
    /// `‖X̂ − X W‖_{2→∞}`
    pub err_2inf: Option<f64>,
    /// `‖X̂ − X W‖_F`
    pub err_frobenius: Option<f64>,
    pub miscluster_count: Option<usize>,
    pub sse: Option<f64>,
    /// `‖Ĉ − Z‖_F` for the clustered points Z (X̂, or Ŷ when degree-corrected).
    pub cluster_residual: Option<f64>,
    /// `‖Z* − Z‖_F` for the aligned truth Z* (X W, or its sphere projection).
    pub certificate_rhs: Option<f64>,
    pub beta: Option<f64>,
    pub bound_entries: Vec<BoundEntry>,
    #[serde(skip)]
    pub timings: StageTimings,
}

impl PartialEq for TrialRecord {
    fn eq(&self, o: &Self) -> bool {
        self.model_id == o.model_id
            && self.n == o.n
            && self.trial == o.trial
            && self.seed == o.seed
            && self.degenerate == o.degenerate
            && self.degenerate_reason == o.degenerate_reason
            && self.eigenvalues == o.eigenvalues
            && self.err_2inf == o.err_2inf
            && self.err_frobenius == o.err_frobenius
            && self.miscluster_count == o.miscluster_count
            && self.sse == o.sse
            && self.cluster_residual == o.cluster_residual
            && self.certificate_rhs == o.certificate_rhs
            && self.beta == o.beta
            && self.bound_entries == o.bound_entries
    }
}

impl TrialRecord {
    fn degenerate(
        model_id: &str,
        n: usize,
        seed: u64,
        reason: String,
        eigenvalues: Vec<f64>,
    ) -> Self {
        TrialRecord {
            model_id: model_id.to_string(),
            n,
            trial: 0,
            seed,
            degenerate: true,
            degenerate_reason: Some(reason),
            eigenvalues,
            err_2inf: None,
            err_frobenius: None,
            miscluster_count: None,
            sse: None,
            cluster_residual: None,
            certificate_rhs: None,
            beta: None,
            bound_entries: Vec::new(),
            timings: StageTimings::default(),
        }
    }

    /// `‖Ĉ − Z‖_F ≤ ‖Z* − Z‖_F`: the clustering is at least as good as the
    /// truth. `None` for degenerate trials.
    pub fn certificate_holds(&self) -> Option<bool> {
        let (lhs, rhs) = (self.cluster_residual?, self.certificate_rhs?);
        Some(lhs <= rhs * (1.0 + 1e-12) + 1e-15)
    }

    pub fn perfect(&self) -> Option<bool> {
        self.miscluster_count.map(|c| c == 0)
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.bound_entries.iter().find(|e| e.name == name)
    }
}

/// Produces one record per `(n, seed)`; implemented by [`TrialConfig`] and by
/// test stubs.
pub trait TrialRunner: Sync {
    fn model_id(&self) -> String;
    fn run(&self, n: usize, seed: u64) -> Result<TrialRecord>;
}

impl TrialRunner for TrialConfig {
    fn model_id(&self) -> String {
        self.model.id.clone()
    }

    fn run(&self, n: usize, seed: u64) -> Result<TrialRecord> {
        run_trial(self, n, seed)
    }
}

/// Intermediate products of a trial, for callers that need more than the
/// record.
#[derive(Debug, Clone)]
pub struct TrialArtifacts {
    pub record: TrialRecord,
    pub spec: BlockModelSpec,
    pub latent: LatentPositionMatrix,
    pub embedding: Option<SpectralEmbedding>,
    /// The rows that were clustered.
    pub points: Option<DMatrix<f64>>,
    pub clustering: Option<ClusteringResult>,
}

pub fn run_trial(config: &TrialConfig, n: usize, seed: u64) -> Result<TrialRecord> {
    run_trial_detailed(config, n, seed).map(|a| a.record)
}

/// build X → sample A → ASE → align → (sphere projection) → MSE clustering →
/// misclustering count → bounds. Stage seeds derive from `seed`.
pub fn run_trial_detailed(config: &TrialConfig, n: usize, seed: u64) -> Result<TrialArtifacts> {
    let seeds = StageSeeds::new(seed);
    let spec = config.model.build(n, seeds.model)?;
    let latent = spec.latent_positions()?;
    let d = config.d.unwrap_or_else(|| config.model.embed_dim(&spec));
    let k = spec.k();
    let dcsbm = spec.is_degree_corrected();
    let id = config.model.id.as_str();
    let mut timings = StageTimings::default();

    let clock = Instant::now();
    let adj: Box<dyn SymmetricOperator> = if config.noiseless {
        Box::new(latent.probability_matrix())
    } else {
        Box::new(sample_adjacency(&latent, seeds.graph)?)
    };
    timings.sample = clock.elapsed().as_secs_f64();

    let degenerate = |reason: String, eigenvalues: Vec<f64>, timings| {
        let mut record = TrialRecord::degenerate(id, n, seed, reason, eigenvalues);
        record.timings = timings;
        Ok(TrialArtifacts {
            record,
            spec: spec.clone(),
            latent: latent.clone(),
            embedding: None,
            points: None,
            clustering: None,
        })
    };

    let clock = Instant::now();
    let embedding = match ase(adj.as_ref(), d, &config.eigen) {
        Ok(e) => e,
        Err(e @ Error::NonPositiveSpectrum { .. }) => {
            return degenerate(e.to_string(), vec![], timings)
        }
        Err(e) => return Err(e),
    };
    let alignment = align(&embedding.xhat, latent.matrix())?;
    timings.embed = clock.elapsed().as_secs_f64();
    let eigenvalues = embedding.eigenvalues.clone();

    let clock = Instant::now();
    let truth = alignment.apply(latent.matrix());
    let (points, target) = if dcsbm {
        match (project_sphere(&embedding.xhat), project_sphere(&truth)) {
            (Ok(p), Ok(t)) => (p, t),
            (Err(e), _) | (_, Err(e)) => return degenerate(e.to_string(), eigenvalues, timings),
        }
    } else {
        (embedding.xhat.clone(), truth)
    };
    let fit = match mse_cluster(&points, k, config.restarts, seeds.cluster) {
        Ok(f) => f,
        Err(e @ Error::TooFewDistinctRows { .. }) => {
            return degenerate(e.to_string(), eigenvalues, timings)
        }
        Err(e) => return Err(e),
    };
    let mis = misclustering_count(spec.tau(), &fit.labels, k)?;
    timings.cluster = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let (beta, bound_entries) = if config.compute_bounds {
        let report = bound_report(
            adj.as_ref(),
            &latent,
            spec.tau(),
            &embedding,
            config.eta,
            dcsbm,
            &config.eigen,
        )?;
        (Some(report.beta.value), report.entries)
    } else {
        (None, Vec::new())
    };
    timings.bounds = clock.elapsed().as_secs_f64();

    let record = TrialRecord {
        model_id: id.to_string(),
        n,
        trial: 0,
        seed,
        degenerate: false,
        degenerate_reason: None,
        eigenvalues,
        err_2inf: Some(alignment.residual_2inf),
        err_frobenius: Some(alignment.residual_f),
        miscluster_count: Some(mis.count),
        sse: Some(fit.sse),
        cluster_residual: Some(fit.sse.sqrt()),
        certificate_rhs: Some((&target - &points).norm()),
        beta,
        bound_entries,
        timings,
    };
    Ok(TrialArtifacts {
        record,
        spec,
        latent,
        embedding: Some(embedding),
        points: Some(points),
        clustering: Some(fit),
    })
}
