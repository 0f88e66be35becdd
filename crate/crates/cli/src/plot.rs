//! Hand-written SVG: a log-log error-decay chart and an embedding scatter.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use asecluster::harness::fit_line;
use asecluster::spectral::project_sphere;
use asecluster::Error;
use nalgebra::DMatrix;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Mean and standard error of the 2→∞ error at one vertex count.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayPoint {
    pub n: usize,
    pub trials: usize,
    pub degenerate: usize,
    pub mean: Option<f64>,
    pub se: Option<f64>,
}

/// Groups a records CSV by `n`, using the `n`, `degenerate` and `err_2inf`
/// columns.
pub fn parse_records(text: &str) -> Result<Vec<DecayPoint>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("records CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Parse(format!("records CSV header has no `{name}` column")))
    };
    let (cn, cd, ce) = (col("n")?, col("degenerate")?, col("err_2inf")?);
    let mut groups: BTreeMap<usize, (usize, usize, Vec<f64>)> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Parse(format!(
                "records line {}: {} cells, header has {}",
                i + 2,
                cells.len(),
                cols.len()
            ))
            .into());
        }
        let n: usize = cells[cn]
            .parse()
            .map_err(|_| Error::Parse(format!("records line {}: n = `{}`", i + 2, cells[cn])))?;
        let g = groups.entry(n).or_default();
        g.0 += 1;
        if cells[cd] == "true" {
            g.1 += 1;
        } else if !cells[ce].is_empty() {
            let e: f64 = cells[ce].parse().map_err(|_| {
                Error::Parse(format!(
                    "records line {}: err_2inf = `{}`",
                    i + 2,
                    cells[ce]
                ))
            })?;
            g.2.push(e);
        }
    }
    Ok(groups
        .into_iter()
        .map(|(n, (trials, degenerate, errs))| {
            let k = errs.len() as f64;
            let mean = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / k);
            let se = mean.filter(|_| errs.len() > 1).map(|m| {
                let var = errs.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            });
            DecayPoint {
                n,
                trials,
                degenerate,
                mean,
                se,
            }
        })
        .collect())
}

/// Maps a data interval onto a pixel interval.
#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    p0: f64,
    p1: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, p0: f64, p1: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        };
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            p0,
            p1,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
    }
}

fn open_svg(w: u32, h: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

fn frame(s: &mut String, x: Axis, y: Axis) {
    let _ = writeln!(
        s,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        x.p0,
        y.p1,
        x.p1 - x.p0,
        y.p0 - y.p1
    );
}

fn short(v: f64) -> String {
    let s = format!("{v:.3e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.')),
        None => s,
    }
}

/// Mean error against n on log-log axes with ±1 standard-error bars and a
/// dashed n^(-1/2) reference through the first point.
pub fn decay_chart(points: &[DecayPoint]) -> Result<String> {
    let pts: Vec<(usize, f64, f64)> = points
        .iter()
        .filter_map(|p| {
            p.mean
                .filter(|m| *m > 0.0)
                .map(|m| (p.n, m, p.se.unwrap_or(0.0)))
        })
        .collect();
    if pts.is_empty() {
        return Err(Error::Parse(
            "records contain no non-degenerate trial with a positive error".into(),
        )
        .into());
    }
    let (w, h) = (640u32, 440u32);
    let lx: Vec<f64> = pts.iter().map(|p| (p.0 as f64).log10()).collect();
    let ly_lo = pts
        .iter()
        .map(|p| (p.1 - p.2).max(p.1 * 0.5).log10())
        .fold(f64::INFINITY, f64::min);
    let ly_hi = pts
        .iter()
        .map(|p| (p.1 + p.2).log10())
        .fold(f64::NEG_INFINITY, f64::max);
    let x = Axis::new(lx[0], lx[lx.len() - 1], 80.0, w as f64 - 30.0);
    let y = Axis::new(ly_lo, ly_hi, h as f64 - 60.0, 40.0);

    let mut s = open_svg(w, h);
    let fit = fit_line(
        &pts.iter()
            .map(|p| ((p.0 as f64).ln(), p.1.ln()))
            .collect::<Vec<_>>(),
    );
    let title = match &fit {
        Some(f) => format!("mean 2-to-infinity error, fitted slope {:.3}", f.slope),
        None => "mean 2-to-infinity error".to_string(),
    };
    let _ = writeln!(s, "<text class=\"title\" x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{title}</text>", w / 2);
    frame(&mut s, x, y);
    for (p, l) in pts.iter().zip(&lx) {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            x.px(*l),
            y.p0 + 16.0,
            p.0
        );
    }
    let (dlo, dhi) = (y.lo.floor() as i32, y.hi.ceil() as i32);
    let mut ticks: Vec<f64> = (dlo..=dhi)
        .map(f64::from)
        .filter(|t| (y.lo..=y.hi).contains(t))
        .collect();
    if ticks.len() < 2 {
        ticks = vec![ly_lo, ly_hi];
    }
    for t in ticks {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            x.p0 - 6.0,
            y.px(t) + 4.0,
            short(10f64.powf(t))
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">n (log scale)</text>",
        w / 2,
        h - 18
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">error (log scale)</text>",
        h / 2,
        h / 2
    );

    // n^(-1/2) through the first point.
    let (x0, y0) = (lx[0], pts[0].1.log10());
    let x1 = lx[lx.len() - 1];
    let _ = writeln!(
        s,
        "<line class=\"reference\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"5 4\"/>",
        x.px(x0),
        y.px(y0),
        x.px(x1),
        y.px(y0 - 0.5 * (x1 - x0))
    );
    let coords: Vec<String> = pts
        .iter()
        .zip(&lx)
        .map(|(p, l)| format!("{:.2},{:.2}", x.px(*l), y.px(p.1.log10())))
        .collect();
    let _ = writeln!(
        s,
        "<polyline class=\"mean\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
        coords.join(" "),
        PALETTE[0]
    );
    for (p, l) in pts.iter().zip(&lx) {
        let cx = x.px(*l);
        if p.2 > 0.0 {
            let top = y.px((p.1 + p.2).log10());
            let bottom = y.px((p.1 - p.2).max(p.1 * 0.5).log10());
            let _ = writeln!(
                s,
                "<line class=\"error-bar\" x1=\"{cx:.2}\" y1=\"{bottom:.2}\" x2=\"{cx:.2}\" y2=\"{top:.2}\" stroke=\"black\"/>"
            );
        }
        let _ = writeln!(
            s,
            "<circle class=\"mean-point\" data-n=\"{}\" cx=\"{cx:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{}\"/>",
            p.0,
            y.px(p.1.log10()),
            PALETTE[0]
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"gray\">n^(-1/2)</text>",
        x.p1 - 60.0,
        y.p1 + 16.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn scatter_panel(
    s: &mut String,
    name: &str,
    title: &str,
    pts: &DMatrix<f64>,
    labels: &[usize],
    left: f64,
) {
    let col = |j: usize| -> Vec<f64> {
        if j < pts.ncols() {
            pts.column(j).iter().copied().collect()
        } else {
            vec![0.0; pts.nrows()]
        }
    };
    let (xs, ys) = (col(0), col(1));
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
                (lo.min(a), hi.max(a))
            })
    };
    let ((xl, xh), (yl, yh)) = (range(&xs), range(&ys));
    let x = Axis::new(xl, xh, left + 50.0, left + 330.0);
    let y = Axis::new(yl, yh, 380.0, 60.0);
    let _ = writeln!(s, "<g class=\"panel\" data-panel=\"{name}\">");
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"40\" text-anchor=\"middle\" font-size=\"13\">{title}</text>",
        (x.p0 + x.p1) / 2.0
    );
    frame(s, x, y);
    for (v, px, py, anchor) in [
        (x.lo, x.p0, y.p0 + 16.0, "start"),
        (x.hi, x.p1, y.p0 + 16.0, "end"),
    ] {
        let _ = writeln!(
            s,
            "<text x=\"{px:.2}\" y=\"{py:.2}\" text-anchor=\"{anchor}\">{}</text>",
            short(v)
        );
    }
    for (v, py) in [(y.lo, y.p0), (y.hi, y.p1 + 8.0)] {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{py:.2}\" text-anchor=\"end\">{}</text>",
            x.p0 - 4.0,
            short(v)
        );
    }
    let groups: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    for g in groups {
        let _ = writeln!(
            s,
            "<g class=\"group\" data-label=\"{g}\" fill=\"{}\" fill-opacity=\"0.7\">",
            PALETTE[g % PALETTE.len()]
        );
        for i in (0..labels.len()).filter(|&i| labels[i] == g) {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\"/>",
                x.px(xs[i]),
                y.px(ys[i])
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n");
}

/// Side-by-side scatter of the first two embedding coordinates before and
/// after projection onto the unit sphere, one colour per label.
pub fn embedding_scatter(xhat: &DMatrix<f64>, labels: &[usize]) -> Result<String> {
    if xhat.nrows() == 0 {
        return Err(Error::Parse("embedding has no rows".into()).into());
    }
    let projected = project_sphere(xhat)?;
    let mut s = open_svg(760, 420);
    scatter_panel(&mut s, "embedding", "embedding rows", xhat, labels, 0.0);
    scatter_panel(
        &mut s,
        "projected",
        "projected onto the unit sphere",
        &projected,
        labels,
        380.0,
    );
    s.push_str("</svg>\n");
    Ok(s)
}
