use std::fmt::Write as _;

use super::consistency::ConsistencyReport;
use super::sweep::SweepOutput;
use super::trial::TrialRecord;
use crate::bounds::names;
use crate::error::Result;
use crate::io::{fmt_f64, to_json_17};

/// Columns of the records CSV, in order. Each bound contributes
/// `<name>_lhs,<name>_rhs,<name>_holds`; `eigenvalues` is `;`-separated.
pub const RECORD_COLUMNS: [&str; 14] = [
    "model_id",
    "n",
    "trial",
    "seed",
    "degenerate",
    "eigenvalues",
    "err_2inf",
    "err_frobenius",
    "miscluster_count",
    "sse",
    "cluster_residual",
    "certificate_rhs",
    "certificate_holds",
    "beta",
];

pub fn records_header() -> String {
    let mut cols: Vec<String> = RECORD_COLUMNS.iter().map(|c| c.to_string()).collect();
    for name in names::ALL {
        for suffix in ["lhs", "rhs", "holds"] {
            cols.push(format!("{name}_{suffix}"));
        }
    }
    cols.join(",")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn record_row(r: &TrialRecord) -> String {
    let eig: Vec<String> = r.eigenvalues.iter().map(|v| fmt_f64(*v)).collect();
    let mut cells = vec![
        r.model_id.clone(),
        r.n.to_string(),
        r.trial.to_string(),
        r.seed.to_string(),
        r.degenerate.to_string(),
        eig.join(";"),
        opt_f64(r.err_2inf),
        opt_f64(r.err_frobenius),
        opt(r.miscluster_count),
        opt_f64(r.sse),
        opt_f64(r.cluster_residual),
        opt_f64(r.certificate_rhs),
        opt(r.certificate_holds()),
        opt_f64(r.beta),
    ];
    for name in names::ALL {
        match r.entry(name) {
            Some(e) => {
                cells.push(fmt_f64(e.lhs));
                cells.push(fmt_f64(e.rhs));
                cells.push(e.holds.to_string());
            }
            None => cells.extend(std::iter::repeat_n(String::new(), 3)),
        }
    }
    cells.join(",")
}

/// One row per trial, sorted as given.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = records_header();
    out.push('\n');
    for r in records {
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}

pub fn timings_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("n,trial,sample_s,embed_s,cluster_s,bounds_s\n");
    for r in records {
        let t = r.timings;
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            r.n, r.trial, t.sample, t.embed, t.cluster, t.bounds
        );
    }
    out
}

pub fn summary_json(output: &SweepOutput) -> Result<String> {
    to_json_17(&output.summary)
}

pub fn consistency_csv(report: &ConsistencyReport) -> String {
    let mut out = String::from("n,trial,seed,degenerate,phi_true,phi_embedded,gap\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.trial,
            r.seed,
            r.degenerate,
            opt_f64(r.phi_true),
            opt_f64(r.phi_embedded),
            opt_f64(r.gap)
        );
    }
    out
}
