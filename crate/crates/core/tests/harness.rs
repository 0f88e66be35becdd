mod common;

use asecluster::bounds::names;
use asecluster::error::Result;
use asecluster::graph_models::{presets, LatentDistribution};
use asecluster::harness::{
    consistency_experiment, records_csv, records_header, run_trial, summary_json, sweep,
    ConsistencyOptions, TrialConfig, TrialRecord, TrialRunner, RECORD_COLUMNS,
};
use asecluster::spectral::{EigenMethod, EigenOptions};

/// FNV-1a, enough to pin an artifact.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

#[test]
fn noiseless_trials_are_exact() {
    for model in presets::all() {
        let cfg = TrialConfig::new(model).noiseless(true);
        let r = run_trial(&cfg, 200, 3).unwrap();
        assert!(!r.degenerate, "{}", r.model_id);
        assert!(
            r.err_2inf.unwrap() <= 1e-8,
            "{}: {:?}",
            r.model_id,
            r.err_2inf
        );
        assert_eq!(r.miscluster_count, Some(0), "{}", r.model_id);
        assert_eq!(r.certificate_holds(), Some(true));
    }
}

#[test]
fn trial_is_reproducible_across_runs_and_threads() {
    let cfg = TrialConfig::new(presets::dense_two_block());
    let first = run_trial(&cfg, 1000, 42).unwrap();
    let again = run_trial(&cfg, 1000, 42).unwrap();
    assert_eq!(first, again);
    let pooled = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_trial(&cfg, 1000, 42).unwrap());
    assert_eq!(first, pooled);
    let text = records_csv(std::slice::from_ref(&first));
    assert_eq!(fnv1a(text.as_bytes()), 0x13f2_43e6_1318_5f08);
}

#[test]
fn degree_corrected_preset_separates_blocks() {
    let cfg = TrialConfig::new(presets::degree_corrected_two_block()).with_bounds(false);
    // 100 per block: the two arcs separate, with a few low-degree vertices
    // on the wrong side.
    for s in 0..10u64 {
        let count = run_trial(&cfg, 200, s).unwrap().miscluster_count.unwrap();
        assert!(count < 30, "seed {s}: {count}");
    }
    let perfect = (0..10u64)
        .filter(|&s| run_trial(&cfg, 1000, s).unwrap().perfect() == Some(true))
        .count();
    assert!(perfect > 5, "{perfect} of 10");
}

struct PowerLaw;

impl TrialRunner for PowerLaw {
    fn model_id(&self) -> String {
        "power_law".into()
    }

    fn run(&self, n: usize, seed: u64) -> Result<TrialRecord> {
        Ok(TrialRecord {
            model_id: self.model_id(),
            n,
            trial: 0,
            seed,
            degenerate: false,
            degenerate_reason: None,
            eigenvalues: vec![],
            err_2inf: Some(3.0 / (n as f64).sqrt()),
            err_frobenius: None,
            miscluster_count: Some(0),
            sse: None,
            cluster_residual: None,
            certificate_rhs: None,
            beta: None,
            bound_entries: vec![],
            timings: Default::default(),
        })
    }
}

#[test]
fn exact_power_law_slope() {
    let out = sweep(&PowerLaw, &[100, 400, 1600, 6400], 3, 0, 2).unwrap();
    let fit = out.summary.slope.unwrap();
    assert!((fit.slope + 0.5).abs() <= 1e-10, "{}", fit.slope);
    assert!((fit.intercept - 3f64.ln()).abs() <= 1e-10);
    for s in &out.summary.per_n {
        assert_eq!(s.se_err_2inf, Some(0.0));
        assert_eq!(s.perfect_frequency, Some(1.0));
    }
}

#[test]
fn sweep_rejects_bad_grids() {
    assert!(sweep(&PowerLaw, &[500, 250], 1, 0, 1).is_err());
    assert!(sweep(&PowerLaw, &[250, 250], 1, 0, 1).is_err());
    assert!(sweep(&PowerLaw, &[250], 0, 0, 1).is_err());
    assert!(sweep(&PowerLaw, &[250], 1, 0, 0).is_err());
}

#[test]
fn sweep_is_independent_of_parallelism() {
    let cfg = TrialConfig::new(presets::dense_two_block()).with_restarts(8);
    let one = sweep(&cfg, &[100, 200], 6, 9, 1).unwrap();
    let many = sweep(&cfg, &[100, 200], 6, 9, 8).unwrap();
    assert_eq!(one.records, many.records);
    assert_eq!(records_csv(&one.records), records_csv(&many.records));
    assert_eq!(summary_json(&one).unwrap(), summary_json(&many).unwrap());
}

#[test]
fn adding_trials_keeps_existing_records() {
    let cfg = TrialConfig::new(presets::dense_two_block()).with_bounds(false);
    let small = sweep(&cfg, &[120], 2, 5, 1).unwrap();
    let large = sweep(&cfg, &[120], 4, 5, 1).unwrap();
    assert_eq!(small.records[..], large.records[..2]);
}

#[test]
fn records_header_layout() {
    let header = records_header();
    let cols: Vec<&str> = header.split(',').collect();
    assert_eq!(cols.len(), RECORD_COLUMNS.len() + 3 * names::ALL.len());
    assert_eq!(&cols[..RECORD_COLUMNS.len()], &RECORD_COLUMNS[..]);
    assert_eq!(cols[RECORD_COLUMNS.len()], "spectral_norm_a_minus_p_lhs");
    let csv = records_csv(&sweep(&PowerLaw, &[10], 2, 0, 1).unwrap().records);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(header.as_str()));
    for line in lines {
        assert_eq!(line.split(',').count(), cols.len());
    }
}

#[test]
fn single_point_mass_has_zero_objective() {
    let dist = LatentDistribution::PointMasses {
        atoms: vec![vec![1.0, 0.0]],
        weights: vec![1.0],
    };
    let rep =
        consistency_experiment(&dist, &[50, 200], 1, 2, 4, &ConsistencyOptions::default()).unwrap();
    for row in &rep.rows {
        assert!(!row.degenerate);
        assert_eq!(row.phi_true, Some(0.0));
        assert!(row.phi_embedded.unwrap() <= 1e-20, "{:?}", row.phi_embedded);
    }
}

#[test]
fn two_point_masses() {
    let dist = LatentDistribution::two_point();
    let grid = [200, 800, 3200];
    let rep =
        consistency_experiment(&dist, &grid, 2, 4, 1, &ConsistencyOptions::default()).unwrap();
    for row in &rep.rows {
        assert_eq!(row.phi_true, Some(0.0));
    }
    let means: Vec<f64> = grid.iter().map(|&n| rep.mean_gap(n).unwrap()).collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}

#[test]
fn no_degenerate_trials_at_moderate_n() {
    let mut cfg = TrialConfig::new(presets::dense_two_block())
        .with_bounds(false)
        .with_restarts(1);
    cfg.eigen = EigenOptions {
        method: EigenMethod::Lanczos,
        ..EigenOptions::default()
    };
    let out = sweep(&cfg, &[250], 1000, 77, 1).unwrap();
    assert_eq!(out.summary.per_n[0].degenerate, 0);
}
