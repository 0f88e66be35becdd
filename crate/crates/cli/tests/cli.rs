use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asecluster::graph_models::presets;
use asecluster::harness::{records_header, run_trial_detailed, TrialConfig};
use asecluster::io::read_label_column;

const RECORDS_HEADER: &str = "model_id,n,trial,seed,degenerate,eigenvalues,err_2inf,err_frobenius,\
miscluster_count,sse,cluster_residual,certificate_rhs,certificate_holds,beta,\
spectral_norm_a_minus_p_lhs,spectral_norm_a_minus_p_rhs,spectral_norm_a_minus_p_holds,\
eigvec_frobenius_sq_lhs,eigvec_frobenius_sq_rhs,eigvec_frobenius_sq_holds,\
eigval_deviation_lhs,eigval_deviation_rhs,eigval_deviation_holds,\
eigvec_inner_product_lhs,eigvec_inner_product_rhs,eigvec_inner_product_holds,\
projected_embedding_lhs,projected_embedding_rhs,projected_embedding_holds,\
eigval_magnitude_lhs,eigval_magnitude_rhs,eigval_magnitude_holds,\
two_to_infinity_lhs,two_to_infinity_rhs,two_to_infinity_holds,\
sphere_two_to_infinity_lhs,sphere_two_to_infinity_rhs,sphere_two_to_infinity_holds";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asecluster"))
        .args(args)
        .env_remove("ASECLUSTER_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn round_trip(model: &str, n: usize, seed: u64, project: bool) {
    let dir = tempfile::tempdir().unwrap();
    let (edges, truth, emb, labels) = (
        dir.path().join("edges.txt"),
        dir.path().join("truth.csv"),
        dir.path().join("emb.csv"),
        dir.path().join("labels.csv"),
    );
    let (n_s, seed_s) = (n.to_string(), seed.to_string());
    ok(&[
        "sample",
        "--model",
        model,
        "--n",
        &n_s,
        "--seed",
        &seed_s,
        "--out",
        p(&edges),
        "--truth",
        p(&truth),
    ]);
    ok(&["embed", "--input", p(&edges), "--d", "2", "--out", p(&emb)]);
    let mut args = vec![
        "cluster",
        "--input",
        p(&emb),
        "--k",
        "2",
        "--seed",
        &seed_s,
        "--out",
        p(&labels),
    ];
    if project {
        args.push("--project-sphere");
    }
    ok(&args);

    let cfg = TrialConfig::new(presets::by_name(model).unwrap()).with_bounds(false);
    let art = run_trial_detailed(&cfg, n, seed).unwrap();
    let cli_labels = read_label_column(&fs::read_to_string(&labels).unwrap(), "label_hat").unwrap();
    assert_eq!(cli_labels, art.clustering.unwrap().labels);
    let cli_truth = read_label_column(&fs::read_to_string(&truth).unwrap(), "label_true").unwrap();
    assert_eq!(cli_truth, art.spec.tau());
}

#[test]
fn round_trip_matches_library_trial() {
    round_trip("dense-two-block", 300, 11, false);
    // Above the dense-solver threshold, so the Lanczos path is exercised.
    round_trip("dense-two-block", 700, 12, false);
    round_trip("degree-corrected-two-block", 400, 13, true);
}

#[test]
fn sweep_header_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("stub.json");
    fs::write(&model, "{\"K\": 1, \"B\": [[0.5]], \"id\": \"stub\"}\n").unwrap();
    let out = dir.path().join("out");
    ok(&[
        "sweep",
        "--model",
        p(&model),
        "--n",
        "20,40",
        "--trials",
        "2",
        "--threads",
        "1",
        "--out",
        p(&out),
    ]);
    let records = fs::read_to_string(out.join("records.csv")).unwrap();
    let header = records.lines().next().unwrap();
    assert_eq!(header, RECORDS_HEADER);
    assert_eq!(header, records_header());
    assert_eq!(records.lines().count(), 5);
    assert!(out.join("summary.json").exists());
    assert!(out.join("timings.csv").exists());
}

#[test]
fn sweep_output_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let read = |threads: &str| {
        let out = dir.path().join(format!("t{threads}"));
        ok(&[
            "sweep",
            "--n",
            "60,120",
            "--trials",
            "3",
            "--seed",
            "4",
            "--threads",
            threads,
            "--out",
            p(&out),
        ]);
        (
            fs::read(out.join("records.csv")).unwrap(),
            fs::read(out.join("summary.json")).unwrap(),
        )
    };
    assert_eq!(read("1"), read("3"));
}

fn verdict_of<'a>(table: &'a str, row: &str) -> &'a str {
    let line = table
        .lines()
        .find(|l| l.starts_with(row))
        .unwrap_or_else(|| panic!("no `{row}` row:\n{table}"));
    line.split_whitespace().last().unwrap()
}

#[test]
fn check_table() {
    let at = |n: &str| String::from_utf8(ok(&["check", "--n", n, "--eta", "0.05"]).stdout).unwrap();
    let small = at("4000");
    assert_eq!(verdict_of(&small, "A0 distinct eigenvalues"), "PASS");
    // The exact eigengap (0.09 n) first clears its threshold near n = 5800.
    assert_eq!(verdict_of(&small, "A2 eigengap"), "FAIL");
    let large = at("8000");
    assert_eq!(verdict_of(&large, "A0 distinct eigenvalues"), "PASS");
    assert_eq!(verdict_of(&large, "A2 eigengap"), "PASS");

    let dc = String::from_utf8(
        ok(&[
            "check",
            "--model",
            "degree-corrected-two-block",
            "--n",
            "1000",
        ])
        .stdout,
    )
    .unwrap();
    assert!(dc.contains("sphere separation"));
    assert!(!dc.contains("A1 separation"));
}

#[test]
fn embedding_scatter_has_one_group_per_block() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, truth, emb, svg) = (
        dir.path().join("e.txt"),
        dir.path().join("t.csv"),
        dir.path().join("x.csv"),
        dir.path().join("s.svg"),
    );
    ok(&[
        "sample",
        "--model",
        "degree-corrected-two-block",
        "--n",
        "200",
        "--seed",
        "2",
        "--out",
        p(&edges),
        "--truth",
        p(&truth),
    ]);
    ok(&["embed", "--input", p(&edges), "--d", "2", "--out", p(&emb)]);
    ok(&[
        "plot",
        "--embedding",
        p(&emb),
        "--labels",
        p(&truth),
        "--out",
        p(&svg),
    ]);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    let panels: Vec<&str> = text.split("<g class=\"panel\"").skip(1).collect();
    assert_eq!(panels.len(), 2);
    assert!(panels[0].starts_with(" data-panel=\"embedding\""));
    assert!(panels[1].starts_with(" data-panel=\"projected\""));
    for panel in panels {
        let groups: Vec<&str> = panel.split("<g class=\"group\"").skip(1).collect();
        assert_eq!(groups.len(), 2);
        for g in groups {
            let body = &g[..g.find("</g>").unwrap()];
            assert_eq!(body.matches("<circle").count(), 100);
        }
    }
}

#[test]
fn decay_plot_from_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    ok(&[
        "sweep",
        "--n",
        "50,100,200",
        "--trials",
        "3",
        "--no-bounds",
        "--threads",
        "1",
        "--out",
        p(&out),
        "--plot",
    ]);
    let svg = fs::read_to_string(out.join("decay.svg")).unwrap();
    assert_eq!(svg.matches("class=\"mean-point\"").count(), 3);
    let again =
        String::from_utf8(ok(&["plot", "--records", p(&out.join("records.csv"))]).stdout).unwrap();
    assert_eq!(again, svg);
}

#[test]
fn consistency_table() {
    let out = ok(&[
        "consistency",
        "--n",
        "100,200",
        "--trials",
        "2",
        "--threads",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,trial,seed,degenerate,phi_true,phi_embedded,gap")
    );
    assert_eq!(lines.count(), 4);
}

fn fails_with(args: &[&str], code: i32, needles: &[&str]) {
    let out = run(args);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {err}");
    for needle in needles {
        assert!(
            err.contains(needle),
            "{args:?}: `{needle}` missing from `{err}`"
        );
    }
}

#[test]
fn errors_name_the_precondition() {
    fails_with(
        &["check", "--n", "100", "--eta", "0.7"],
        1,
        &["--eta", "0.7", "(0, 0.5)"],
    );
    fails_with(&["check", "--n", "0"], 1, &["--n", "0"]);
    fails_with(&["sample"], 1, &["--n", "block proportions"]);
    fails_with(
        &["check", "--model", "no-such-model.json", "--n", "10"],
        1,
        &["no-such-model.json"],
    );
    fails_with(
        &[
            "sweep", "--n", "200,100", "--trials", "1", "--out", "unused",
        ],
        1,
        &["n_grid", "ascending"],
    );
    fails_with(&["plot"], 1, &["--records", "--embedding"]);

    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("e.txt");
    fs::write(&edges, "# n=4\n0 1\n1 2\n2 3\nx y\n").unwrap();
    fails_with(
        &["embed", "--input", p(&edges), "--d", "1"],
        1,
        &["line 5", "x y"],
    );
    fs::write(&edges, "0 1\n").unwrap();
    fails_with(
        &["embed", "--input", p(&edges), "--d", "3"],
        1,
        &["--d", "3", "vertex count 2"],
    );

    let out = Command::new(env!("CARGO_BIN_EXE_asecluster"))
        .args([
            "sweep",
            "--n",
            "20",
            "--trials",
            "1",
            "--out",
            p(&dir.path().join("o")),
        ])
        .env("ASECLUSTER_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--threads"));
}

#[test]
fn degenerate_outcomes_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // A single edge: the second eigenvalue is -1.
    let edges = dir.path().join("e.txt");
    fs::write(&edges, "0 1\n").unwrap();
    fails_with(
        &["embed", "--input", p(&edges), "--d", "2"],
        2,
        &["eigenvalue", "not positive"],
    );

    let emb = dir.path().join("x.csv");
    fs::write(&emb, "vertex,x1,x2\n0,1,0\n1,1,0\n2,1,0\n").unwrap();
    fails_with(
        &["cluster", "--input", p(&emb), "--k", "2"],
        2,
        &["2 clusters", "1 distinct"],
    );
    fs::write(&emb, "vertex,x1,x2\n0,1,0\n1,0,0\n").unwrap();
    fails_with(
        &[
            "cluster",
            "--input",
            p(&emb),
            "--k",
            "1",
            "--project-sphere",
        ],
        2,
        &["row 1", "zero norm"],
    );
}
