use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::trial::{TrialRecord, TrialRunner};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub const DEFAULT_N_GRID: [usize; 5] = [250, 500, 1000, 2000, 4000];
pub const DEFAULT_TRIALS: usize = 50;

/// Seed of trial `trial` at vertex count `n`; independent of the grid and of
/// the trial count.
pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    derive_seed(base_seed, &[n as u64, trial as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerNSummary {
    pub n: usize,
    pub trials: usize,
    pub degenerate: usize,
    /// Over non-degenerate trials; `None` if there are none.
    pub mean_err_2inf: Option<f64>,
    /// Sample standard deviation over √trials; `None` below two trials.
    pub se_err_2inf: Option<f64>,
    pub perfect_frequency: Option<f64>,
    pub certificate_failures: usize,
    /// Fraction of trials in which each bound held.
    pub bound_hold_frequency: BTreeMap<String, f64>,
}

/// Least-squares fit of `log mean err_2inf = intercept + slope · log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% t-interval for the slope; needs at least three points.
    pub slope_ci: Option<(f64, f64)>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub model_id: String,
    pub base_seed: u64,
    pub trials_per_n: usize,
    pub n_grid: Vec<usize>,
    pub per_n: Vec<PerNSummary>,
    pub slope: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub summary: SweepSummary,
    /// Sorted by `(n, trial)`.
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` records for each n on a pool of `parallelism` threads. The
/// output does not depend on `parallelism`.
pub fn sweep(
    runner: &dyn TrialRunner,
    n_grid: &[usize],
    trials: usize,
    base_seed: u64,
    parallelism: usize,
) -> Result<SweepOutput> {
    if n_grid.is_empty() {
        return Err(Error::param(
            "n_grid",
            "[]",
            "need at least one vertex count",
        ));
    }
    if let Some(w) = n_grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::param(
            "n_grid",
            format!("{n_grid:?}"),
            format!("must be strictly ascending ({} then {})", w[0], w[1]),
        ));
    }
    if trials == 0 {
        return Err(Error::param("trials", 0, "need at least one trial"));
    }
    if parallelism == 0 {
        return Err(Error::param("threads", 0, "need at least one thread"));
    }
    let tasks: Vec<(usize, usize)> = n_grid
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::param("threads", parallelism, e.to_string()))?;
    let mut records: Vec<TrialRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, t)| {
                let mut r = runner.run(n, trial_seed(base_seed, n, t))?;
                r.trial = t;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| (r.n, r.trial));
    let summary = summarize(&runner.model_id(), base_seed, trials, n_grid, &records);
    Ok(SweepOutput { summary, records })
}

pub fn summarize(
    model_id: &str,
    base_seed: u64,
    trials: usize,
    n_grid: &[usize],
    records: &[TrialRecord],
) -> SweepSummary {
    let per_n: Vec<PerNSummary> = n_grid
        .iter()
        .map(|&n| summarize_n(n, records.iter().filter(|r| r.n == n)))
        .collect();
    let pts: Vec<(f64, f64)> = per_n
        .iter()
        .filter_map(|s| {
            s.mean_err_2inf
                .filter(|m| *m > 0.0)
                .map(|m| ((s.n as f64).ln(), m.ln()))
        })
        .collect();
    SweepSummary {
        model_id: model_id.to_string(),
        base_seed,
        trials_per_n: trials,
        n_grid: n_grid.to_vec(),
        per_n,
        slope: fit_line(&pts),
    }
}

fn summarize_n<'a>(n: usize, records: impl Iterator<Item = &'a TrialRecord>) -> PerNSummary {
    let records: Vec<&TrialRecord> = records.collect();
    let good: Vec<&TrialRecord> = records.iter().copied().filter(|r| !r.degenerate).collect();
    let errs: Vec<f64> = good.iter().filter_map(|r| r.err_2inf).collect();
    let m = errs.len() as f64;
    let mean = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / m);
    let se = mean.filter(|_| errs.len() >= 2).map(|mu| {
        let var = errs.iter().map(|e| (e - mu).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    });
    let perfect = (!good.is_empty()).then(|| {
        good.iter().filter(|r| r.perfect() == Some(true)).count() as f64 / good.len() as f64
    });
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in &good {
        for e in &r.bound_entries {
            let c = counts.entry(e.name.clone()).or_default();
            c.0 += e.holds as usize;
            c.1 += 1;
        }
    }
    PerNSummary {
        n,
        trials: records.len(),
        degenerate: records.len() - good.len(),
        mean_err_2inf: mean,
        se_err_2inf: se,
        perfect_frequency: perfect,
        certificate_failures: good
            .iter()
            .filter(|r| r.certificate_holds() == Some(false))
            .count(),
        bound_hold_frequency: counts
            .into_iter()
            .map(|(k, (h, t))| (k, h as f64 / t as f64))
            .collect(),
    }
}

/// Ordinary least squares on `(x, y)` pairs.
pub fn fit_line(pts: &[(f64, f64)]) -> Option<SlopeFit> {
    let k = pts.len();
    if k < 2 {
        return None;
    }
    let kf = k as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_ci = (k >= 3).then(|| {
        let rss: f64 = pts
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        let se = (rss / (kf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, kf - 2.0)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        (slope - t * se, slope + t * se)
    });
    Some(SlopeFit {
        slope,
        intercept,
        slope_ci,
        points: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_slope() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let f = fit_line(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 2.0).abs() < 1e-12);
        let (lo, hi) = f.slope_ci.unwrap();
        assert!(lo <= f.slope && f.slope <= hi && hi - lo < 1e-9);
    }

    #[test]
    fn t_quantile_for_three_points() {
        // One degree of freedom: t_{0.975} = tan(0.475 π).
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)];
        let f = fit_line(&pts).unwrap();
        let (lo, hi) = f.slope_ci.unwrap();
        let rss: f64 = 1.0 / 6.0;
        let se = (rss / 2.0).sqrt();
        let t = (0.475 * std::f64::consts::PI).tan();
        assert!(((hi - lo) / 2.0 - t * se).abs() < 1e-8);
    }
}
