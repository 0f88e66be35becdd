use serde::{Deserialize, Serialize};

use super::constants::{beta, model_constants, Beta, ModelConstants};
use crate::error::Result;
use crate::graph_models::BlockModelSpec;

/// Relative eigengap below which eigenvalues count as repeated.
pub const A0_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDistinctness {
    pub holds: bool,
    /// `None` when P has fewer than two nonzero eigenvalues.
    pub min_relative_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub holds: bool,
    /// `None` for a single block (nothing to separate).
    pub min_distance: Option<f64>,
    /// `6 β √(n / n_min)`
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigengap {
    pub holds: bool,
    pub gamma_n: f64,
    /// `4 √(Δ log(n/η))`
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSeparation {
    pub holds: bool,
    /// `min_{k≠l} ‖y_k − y_l‖ / 6`; `None` for a single block.
    pub r: Option<f64>,
    pub c_min: f64,
    /// `2 β √(n / n_min) / c_min`
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub n: usize,
    pub eta: f64,
    pub constants: ModelConstants,
    pub beta: Beta,
    pub a0_distinct_eigenvalues: EigenDistinctness,
    /// Absent for degree-corrected models, where `dcsbm_condition` replaces it.
    pub a1_separation: Option<Separation>,
    pub a2_gap: Eigengap,
    pub dcsbm_condition: Option<SphereSeparation>,
}

impl AssumptionReport {
    /// All applicable conditions hold.
    pub fn all_hold(&self) -> bool {
        self.a0_distinct_eigenvalues.holds
            && self.a2_gap.holds
            && self.a1_separation.as_ref().is_none_or(|a| a.holds)
            && self.dcsbm_condition.as_ref().is_none_or(|c| c.holds)
    }
}

fn min_pairwise_distance(rows: &nalgebra::DMatrix<f64>) -> Option<f64> {
    let k = rows.nrows();
    let mut best: Option<f64> = None;
    for a in 0..k {
        for b in a + 1..k {
            let dist = (rows.row(a) - rows.row(b)).norm();
            best = Some(best.map_or(dist, |m: f64| m.min(dist)));
        }
    }
    best
}

/// Evaluates the eigenvalue distinctness, separation and eigengap conditions
/// for `spec` with the exact model constants.
pub fn check_assumptions(spec: &BlockModelSpec, eta: f64) -> Result<AssumptionReport> {
    let latent = spec.latent_positions()?;
    let n = spec.n();
    let constants = model_constants(&latent, spec.tau())?;
    let b = beta(constants.d, n, eta, constants.delta, constants.gamma)?;
    let log = (n as f64 / eta).ln();
    let spread = (n as f64 / constants.n_min as f64).sqrt();

    let a0 = EigenDistinctness {
        holds: constants.min_relative_gap.is_none_or(|g| g > A0_TOL),
        min_relative_gap: constants.min_relative_gap,
    };
    let a2_threshold = 4.0 * (constants.delta * log).sqrt();
    let a2 = Eigengap {
        holds: constants.gamma_n > a2_threshold,
        gamma_n: constants.gamma_n,
        threshold: a2_threshold,
    };

    let (a1, dcsbm) = match spec.degree_factors() {
        None => {
            // The distinct rows of X are the K block rows.
            let min_distance = min_pairwise_distance(&spec.block_vectors());
            let threshold = 6.0 * b.value * spread;
            let a1 = Separation {
                holds: min_distance.is_none_or(|m| m > threshold),
                min_distance,
                threshold,
            };
            (Some(a1), None)
        }
        Some(c) => {
            let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
            let r = min_pairwise_distance(&spec.block_vectors()).map(|m| m / 6.0);
            let threshold = 2.0 * b.value * spread / c_min;
            let cond = SphereSeparation {
                holds: r.is_none_or(|r| r > threshold),
                r,
                c_min,
                threshold,
            };
            (None, Some(cond))
        }
    };
    Ok(AssumptionReport {
        n,
        eta,
        constants,
        beta: b,
        a0_distinct_eigenvalues: a0,
        a1_separation: a1,
        a2_gap: a2,
        dcsbm_condition: dcsbm,
    })
}
