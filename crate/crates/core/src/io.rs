//! File formats: edge lists, embedding and label CSVs, and JSON with
//! round-trippable floats.

use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_models::{AdjacencySample, StorageKind};
use crate::spectral::SpectralEmbedding;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// serde_json pretty printer whose floats use [`fmt_f64`].
struct Digits17 {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json_17<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = Digits17 {
        pretty: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Upper-triangular edge list, 0-indexed, with a `# n=<n> seed=<seed>` header.
pub fn write_edge_list(a: &AdjacencySample) -> String {
    let mut out = format!("# n={} seed={}\n", a.n(), a.seed());
    for (i, j) in a.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

fn parse_header(line: &str) -> (Option<usize>, Option<u64>) {
    let mut n = None;
    let mut seed = None;
    for tok in line.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("seed=") {
            seed = v.parse().ok();
        }
    }
    (n, seed)
}

/// Parses an edge list. Lines starting with `#` are comments, except that a
/// `n=` / `seed=` header fixes the vertex count and seed; without one, n is
/// one more than the largest index.
pub fn read_edge_list(text: &str, one_indexed: bool) -> Result<AdjacencySample> {
    let mut n = None;
    let mut seed = None;
    let mut edges = Vec::new();
    let offset = one_indexed as usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let (hn, hs) = parse_header(line);
            n = n.or(hn);
            seed = seed.or(hs);
            continue;
        }
        let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
        let (Some(Ok(i)), Some(Ok(j)), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!(
                "edge list line {}: expected two vertex indices, got `{line}`",
                lineno + 1
            )));
        };
        if one_indexed && (i == 0 || j == 0) {
            return Err(Error::Parse(format!(
                "edge list line {}: vertex 0 in a 1-indexed file",
                lineno + 1
            )));
        }
        edges.push((i - offset, j - offset));
    }
    let n = match n {
        Some(n) => n,
        None => edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0),
    };
    AdjacencySample::from_edges(n, seed.unwrap_or(0), edges, StorageKind::Auto)
}

/// `vertex,x1,…,xd,eigval_rank`; the last column holds d, the number of
/// retained eigenvalues.
pub fn write_embedding_csv(xhat: &DMatrix<f64>) -> String {
    let d = xhat.ncols();
    let mut out = String::from("vertex");
    for j in 1..=d {
        out.push_str(&format!(",x{j}"));
    }
    out.push_str(",eigval_rank\n");
    for i in 0..xhat.nrows() {
        out.push_str(&i.to_string());
        for j in 0..d {
            out.push(',');
            out.push_str(&fmt_f64(xhat[(i, j)]));
        }
        out.push_str(&format!(",{d}\n"));
    }
    out
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(cell: &str, lineno: usize) -> Result<f64> {
    cell.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {lineno}: `{cell}` is not a number")))
}

fn parse_usize(cell: &str, lineno: usize) -> Result<usize> {
    cell.trim().parse().map_err(|_| {
        Error::Parse(format!(
            "line {lineno}: `{cell}` is not a non-negative integer"
        ))
    })
}

/// Reads the rows of an embedding CSV (any `x*` columns; the vertex column
/// gives the row).
pub fn read_embedding_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = data_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("embedding CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let vertex_col = cols.iter().position(|c| *c == "vertex");
    let x_cols: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.starts_with('x') && c[1..].parse::<usize>().is_ok())
        .map(|(i, _)| i)
        .collect();
    if x_cols.is_empty() {
        return Err(Error::Parse(format!(
            "embedding CSV header `{header}` has no x1..xd columns"
        )));
    }
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Parse(format!(
                "line {lineno}: {} cells, header has {}",
                cells.len(),
                cols.len()
            )));
        }
        let v = match vertex_col {
            Some(c) => parse_usize(cells[c], lineno)?,
            None => rows.len(),
        };
        let x = x_cols
            .iter()
            .map(|&c| parse_f64(cells[c], lineno))
            .collect::<Result<Vec<_>>>()?;
        rows.push((v, x));
    }
    rows.sort_by_key(|r| r.0);
    if let Some((i, r)) = rows.iter().enumerate().find(|(i, r)| r.0 != *i) {
        return Err(Error::Parse(format!(
            "embedding CSV vertices must be 0..n-1 without gaps; found {} at position {i}",
            r.0
        )));
    }
    let d = x_cols.len();
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i].1[j]))
}

/// `rank,value`, rank starting at 1 for the largest.
pub fn write_eigenvalues_csv(e: &SpectralEmbedding) -> String {
    let mut out = String::from("rank,value\n");
    for (r, v) in e.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{},{}\n", r + 1, fmt_f64(*v)));
    }
    out
}

pub fn read_eigenvalues_csv(text: &str) -> Result<Vec<f64>> {
    data_lines(text)
        .skip(1)
        .map(|(lineno, line)| {
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `rank,value`")))?;
            parse_f64(v, lineno)
        })
        .collect()
}

/// `vertex,label_true,label_hat`; `label_true` is blank when unknown.
pub fn write_labels_csv(truth: Option<&[usize]>, labels: &[usize]) -> String {
    let mut out = String::from("vertex,label_true,label_hat\n");
    for (i, l) in labels.iter().enumerate() {
        let t = truth.map(|t| t[i].to_string()).unwrap_or_default();
        out.push_str(&format!("{i},{t},{l}\n"));
    }
    out
}

/// Reads labels from a CSV whose header names the column; returns them in
/// vertex order.
pub fn read_label_column(text: &str, column: &str) -> Result<Vec<usize>> {
    let mut lines = data_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("label CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let c = cols.iter().position(|h| *h == column).ok_or_else(|| {
        Error::Parse(format!(
            "label CSV header `{header}` has no `{column}` column"
        ))
    })?;
    let v = cols.iter().position(|h| *h == "vertex");
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let cell = cells
            .get(c)
            .ok_or_else(|| Error::Parse(format!("line {lineno}: missing `{column}`")))?;
        let vertex = match v {
            Some(v) => parse_usize(cells.get(v).copied().unwrap_or(""), lineno)?,
            None => rows.len(),
        };
        rows.push((vertex, parse_usize(cell, lineno)?));
    }
    rows.sort_by_key(|r| r.0);
    Ok(rows.into_iter().map(|r| r.1).collect())
}
