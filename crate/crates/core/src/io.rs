//! Line-oriented instance files.
//!
//! Graph files:
//!
//! ```text
//! c optional comment lines start with 'c'
//! p <directed|undirected> <n> <m>
//! e <u> <v> <weight>        (exactly m lines; 0-based vertices; edge id = order)
//! ```
//!
//! Metric files:
//!
//! ```text
//! p metric <n>
//! <n rows of n space-separated rationals>
//! ```
//!
//! Weights and distances accept integers, fractions `p/q`, or decimals. Blank lines
//! and comment lines are ignored anywhere.

use std::fmt::Write as _;

use crate::dispersion::FiniteMetric;
use crate::error::{Error, Result};
use crate::model::Graph;
use crate::rational::{format_rational, parse_rational};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(&"c") | Some(&"#") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("bad {what}: {tok:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    if header.len() != 4 || header[0] != "p" {
        return Err(parse_err(hline, "expected `p <directed|undirected> <n> <m>`"));
    }
    let directed = match header[1] {
        "directed" => true,
        "undirected" => false,
        other => return Err(parse_err(hline, format!("unknown graph kind {other:?}"))),
    };
    let n = parse_usize(hline, header[2], "vertex count")?;
    let m = parse_usize(hline, header[3], "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (line, toks) in lines {
        if toks.len() != 4 || toks[0] != "e" {
            return Err(parse_err(line, "expected `e <u> <v> <weight>`"));
        }
        let u = parse_usize(line, toks[1], "endpoint")?;
        let v = parse_usize(line, toks[2], "endpoint")?;
        let w = parse_rational(toks[3]).map_err(|e| parse_err(line, e.to_string()))?;
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(parse_err(hline, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, directed, edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    let _ = writeln!(out, "p {kind} {} {}", g.vertex_count(), g.edge_count());
    for (id, e) in g.edges().iter().enumerate() {
        let _ = writeln!(out, "e {} {} {}", e.u, e.v, format_rational(g.weight(id)));
    }
    out
}

/// Parses a metric file; `validate_triangle` runs the O(n³) triangle check.
pub fn parse_metric(text: &str, validate_triangle: bool) -> Result<FiniteMetric> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    if header.len() != 3 || header[0] != "p" || header[1] != "metric" {
        return Err(parse_err(hline, "expected `p metric <n>`"));
    }
    let n = parse_usize(hline, header[2], "point count")?;
    let mut rows = Vec::with_capacity(n);
    for (line, toks) in lines {
        if toks.len() != n {
            return Err(parse_err(line, format!("expected {n} entries, found {}", toks.len())));
        }
        let row = toks
            .iter()
            .map(|t| parse_rational(t).map_err(|e| parse_err(line, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_err(hline, format!("header declares {n} rows, found {}", rows.len())));
    }
    FiniteMetric::new(rows, validate_triangle)
}

pub fn write_metric(metric: &FiniteMetric) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p metric {}", metric.len());
    for i in 0..metric.len() {
        let row: Vec<String> = (0..metric.len()).map(|j| format_rational(metric.dist(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
