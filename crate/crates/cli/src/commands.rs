use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use asecluster::bounds::check_assumptions;
use asecluster::clustering::{misclustering_count, mse_cluster};
use asecluster::graph_models::{sample_adjacency, LatentDistribution, Membership, ModelConfig};
use asecluster::harness::{
    consistency_csv, consistency_experiment, records_csv, summary_json, sweep as run_sweep,
    timings_csv, ConsistencyOptions, TrialConfig,
};
use asecluster::io::{
    read_edge_list, read_embedding_csv, read_label_column, to_json_17, write_edge_list,
    write_eigenvalues_csv, write_embedding_csv, write_labels_csv,
};
use asecluster::rng::StageSeeds;
use asecluster::spectral::{ase, project_sphere, EigenOptions};
use asecluster::Error;

use crate::plot;
use crate::{CheckArgs, ClusterArgs, ConsistencyArgs, EmbedArgs, PlotArgs, SampleArgs, SweepArgs};

fn invalid(name: &'static str, value: impl ToString, reason: impl Into<String>) -> anyhow::Error {
    Error::InvalidParameter {
        name,
        value: value.to_string(),
        reason: reason.into(),
    }
    .into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())).into())
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())).into())
        }
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_model(name: &str) -> Result<ModelConfig> {
    ModelConfig::load(name).with_context(|| format!("loading model `{name}`"))
}

fn resolve_n(model: &ModelConfig, n: Option<u64>) -> Result<usize> {
    match (n, &model.membership) {
        (Some(n), _) => Ok(n as usize),
        (None, Membership::Tau(t)) => Ok(t.len()),
        (None, Membership::BlockSizes(_)) => Err(invalid(
            "--n",
            "(missing)",
            format!(
                "model `{}` gives block proportions, so the vertex count is required",
                model.id
            ),
        )),
    }
}

fn check_grid(n: &[u64]) -> Result<Vec<usize>> {
    if let Some(&bad) = n.iter().find(|&&v| v == 0) {
        return Err(invalid("--n", bad, "vertex counts must be positive"));
    }
    Ok(n.iter().map(|&v| v as usize).collect())
}

pub(crate) fn sample(a: &SampleArgs) -> Result<()> {
    let model = load_model(&a.model.model)?;
    let n = resolve_n(&model, a.n)?;
    let seeds = StageSeeds::new(a.seed);
    let spec = model.build(n, seeds.model)?;
    let graph = sample_adjacency(&spec.latent_positions()?, seeds.graph)?;
    emit(a.out.as_deref(), &write_edge_list(&graph))?;
    if let Some(path) = &a.truth {
        let mut text = String::from("vertex,label_true\n");
        for (i, t) in spec.tau().iter().enumerate() {
            let _ = writeln!(text, "{i},{t}");
        }
        emit(Some(path), &text)?;
    }
    eprintln!("{}: n = {n}, {} edges", model.id, graph.edge_count());
    Ok(())
}

pub(crate) fn embed(a: &EmbedArgs) -> Result<()> {
    let graph = read_edge_list(&read(&a.input)?, a.one_indexed)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let d = a.d as usize;
    if d > graph.n() {
        return Err(invalid(
            "--d",
            d,
            format!("must not exceed the vertex count {}", graph.n()),
        ));
    }
    let emb = ase(&graph, d, &EigenOptions::default())?;
    emit(a.out.as_deref(), &write_embedding_csv(&emb.xhat))?;
    if let Some(path) = &a.eigenvalues {
        emit(Some(path), &write_eigenvalues_csv(&emb))?;
    }
    Ok(())
}

pub(crate) fn cluster(a: &ClusterArgs) -> Result<()> {
    let mut points = read_embedding_csv(&read(&a.input)?)
        .with_context(|| format!("reading {}", a.input.display()))?;
    if a.project_sphere {
        points = project_sphere(&points)?;
    }
    let k = a.k as usize;
    if k > points.nrows() {
        return Err(invalid(
            "--k",
            k,
            format!("must not exceed the vertex count {}", points.nrows()),
        ));
    }
    let fit = mse_cluster(
        &points,
        k,
        a.restarts as usize,
        StageSeeds::new(a.seed).cluster,
    )?;
    let truth = match &a.truth {
        Some(path) => {
            let t = read_label_column(&read(path)?, "label_true")
                .with_context(|| format!("reading {}", path.display()))?;
            if t.len() != fit.labels.len() {
                return Err(invalid(
                    "--truth",
                    path.display(),
                    format!("has {} labels for {} vertices", t.len(), fit.labels.len()),
                ));
            }
            Some(t)
        }
        None => None,
    };
    emit(
        a.out.as_deref(),
        &write_labels_csv(truth.as_deref(), &fit.labels),
    )?;
    if let Some(t) = &truth {
        let blocks = t.iter().max().map_or(0, |m| m + 1).max(k);
        let report = misclustering_count(t, &fit.labels, blocks)?;
        eprintln!("misclustered {} of {}", report.count, t.len());
        if let Some(path) = &a.report {
            emit(Some(path), &to_json_17(&report)?)?;
        }
    } else if a.report.is_some() {
        bail!(invalid(
            "--report",
            "(given)",
            "a misclustering report needs --truth"
        ));
    }
    Ok(())
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "PASS"
    } else {
        "FAIL"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6e}"))
}

pub(crate) fn check(a: &CheckArgs) -> Result<()> {
    let model = load_model(&a.model.model)?;
    let n = resolve_n(&model, a.n)?;
    let spec = model.build(n, StageSeeds::new(a.seed).model)?;
    let r = check_assumptions(&spec, a.eta)?;
    let c = &r.constants;
    let mut t = String::new();
    let _ = writeln!(t, "model {}  n = {}  eta = {}", model.id, r.n, r.eta);
    let _ = writeln!(
        t,
        "delta = {:.6e}  gamma*n = {:.6e}  d = {}  K = {}  n_min = {}",
        c.delta, c.gamma_n, c.d, c.k, c.n_min
    );
    let _ = writeln!(
        t,
        "beta = {:.6e}{}",
        r.beta.value,
        if r.beta.hypothesis_violated {
            "  (eigengap hypothesis violated)"
        } else {
            ""
        }
    );
    let _ = writeln!(t);
    let _ = writeln!(
        t,
        "{:<24} {:>14} {:>14}  verdict",
        "assumption", "value", "threshold"
    );
    let a0 = &r.a0_distinct_eigenvalues;
    let _ = writeln!(
        t,
        "{:<24} {:>14} {:>14}  {}",
        "A0 distinct eigenvalues",
        opt(a0.min_relative_gap),
        format!("{:.6e}", asecluster::bounds::A0_TOL),
        verdict(a0.holds)
    );
    if let Some(s) = &r.a1_separation {
        let _ = writeln!(
            t,
            "{:<24} {:>14} {:>14.6e}  {}",
            "A1 separation",
            opt(s.min_distance),
            s.threshold,
            verdict(s.holds)
        );
    }
    let g = &r.a2_gap;
    let _ = writeln!(
        t,
        "{:<24} {:>14.6e} {:>14.6e}  {}",
        "A2 eigengap",
        g.gamma_n,
        g.threshold,
        verdict(g.holds)
    );
    if let Some(s) = &r.dcsbm_condition {
        let _ = writeln!(
            t,
            "{:<24} {:>14} {:>14.6e}  {}",
            "sphere separation",
            opt(s.r),
            s.threshold,
            verdict(s.holds)
        );
    }
    print!("{t}");
    if let Some(path) = &a.out {
        emit(Some(path), &to_json_17(&r)?)?;
    }
    Ok(())
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid("--threads", threads, e.to_string()))
}

pub(crate) fn sweep(a: &SweepArgs) -> Result<()> {
    let model = load_model(&a.model.model)?;
    let grid = check_grid(&a.n)?;
    let mut cfg = TrialConfig::new(model)
        .with_eta(a.eta)
        .with_restarts(a.restarts as usize)
        .with_bounds(!a.no_bounds);
    cfg.d = a.d.map(|d| d as usize);
    let out = run_sweep(&cfg, &grid, a.trials as usize, a.seed, a.threads.get())?;
    fs::create_dir_all(&a.out).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    let records = records_csv(&out.records);
    emit(Some(&a.out.join("records.csv")), &records)?;
    emit(Some(&a.out.join("timings.csv")), &timings_csv(&out.records))?;
    emit(Some(&a.out.join("summary.json")), &summary_json(&out)?)?;
    if a.plot {
        emit(
            Some(&a.out.join("decay.svg")),
            &plot::decay_chart(&plot::parse_records(&records)?)?,
        )?;
    }
    println!(
        "{:>8} {:>7} {:>11} {:>14} {:>14} {:>8}",
        "n", "trials", "degenerate", "mean_err_2inf", "se", "perfect"
    );
    for s in &out.summary.per_n {
        println!(
            "{:>8} {:>7} {:>11} {:>14} {:>14} {:>8}",
            s.n,
            s.trials,
            s.degenerate,
            opt(s.mean_err_2inf),
            opt(s.se_err_2inf),
            s.perfect_frequency
                .map_or_else(|| "-".into(), |f| format!("{f:.3}"))
        );
    }
    if let Some(f) = &out.summary.slope {
        match f.slope_ci {
            Some((lo, hi)) => println!("slope {:.4}  95% CI [{lo:.4}, {hi:.4}]", f.slope),
            None => println!("slope {:.4}", f.slope),
        }
    }
    Ok(())
}

pub(crate) fn consistency(a: &ConsistencyArgs) -> Result<()> {
    let dist = if a.dist == "two-point" {
        LatentDistribution::two_point()
    } else {
        let path = Path::new(&a.dist);
        serde_json::from_str(&read(path)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    };
    let grid = check_grid(&a.n)?;
    let opts = ConsistencyOptions {
        restarts: a.restarts as usize,
        ..ConsistencyOptions::default()
    };
    let k = a.k as usize;
    let rep = pool(a.threads.get())?
        .install(|| consistency_experiment(&dist, &grid, k, a.trials as usize, a.seed, &opts))?;
    emit(a.out.as_deref(), &consistency_csv(&rep))?;
    for &n in &grid {
        eprintln!("n = {n:>7}  mean gap {}", opt(rep.mean_gap(n)));
    }
    Ok(())
}

pub(crate) fn plot(a: &PlotArgs) -> Result<()> {
    let svg = if let Some(path) = &a.source.records {
        let rows = plot::parse_records(&read(path)?)
            .with_context(|| format!("reading {}", path.display()))?;
        plot::decay_chart(&rows)?
    } else {
        let path = a
            .source
            .embedding
            .as_ref()
            .expect("clap requires one source");
        let xhat = read_embedding_csv(&read(path)?)
            .with_context(|| format!("reading {}", path.display()))?;
        let labels = match &a.labels {
            Some(p) => {
                let text = read(p)?;
                let l = read_label_column(&text, "label_true")
                    .or_else(|_| read_label_column(&text, "label_hat"))
                    .with_context(|| format!("reading {}", p.display()))?;
                if l.len() != xhat.nrows() {
                    return Err(invalid(
                        "--labels",
                        p.display(),
                        format!("has {} labels for {} rows", l.len(), xhat.nrows()),
                    ));
                }
                l
            }
            None => vec![0; xhat.nrows()],
        };
        plot::embedding_scatter(&xhat, &labels)?
    };
    emit(a.out.as_deref(), &svg)
}
