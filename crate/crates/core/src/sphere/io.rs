//! Plain-text graph files.
//!
//! ```text
//! # n=2 N_lat=64 N_lon=128
//! 1.2271846303085130e-2,0.0000000000000000e0,3.4000000000000002e-1
//! ...
//! ```
//!
//! One row per node in storage order: `theta,phi_value` on S^1 and
//! `theta,phi,phi_value` on S^2. Values carry 17 significant digits, which
//! round-trips every f64 exactly.

use std::path::Path;

use super::grid::{RadialGraph, SphericalGrid};
use crate::error::{Error, Result};

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses a grid header such as `n=1 N=256` or `n=2 N_lat=64 N_lon=128`.
pub fn parse_grid_header(text: &str) -> Result<SphericalGrid> {
    let mut n = None;
    let mut nodes = None;
    let mut n_lat = None;
    let mut n_lon = None;
    for tok in text.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::InvalidGrid(format!("bad header token '{tok}'")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::InvalidGrid(format!("bad header value '{tok}'")))?;
        match key {
            "n" => n = Some(value),
            "N" => nodes = Some(value),
            "N_lat" => n_lat = Some(value),
            "N_lon" => n_lon = Some(value),
            _ => return Err(Error::InvalidGrid(format!("unknown header key '{key}'"))),
        }
    }
    match (n, nodes, n_lat, n_lon) {
        (Some(1), Some(nn), None, None) => SphericalGrid::circle(nn),
        (Some(2), None, Some(a), Some(b)) => SphericalGrid::sphere(a, b),
        _ => Err(Error::InvalidGrid(format!("incomplete grid header '{text}'"))),
    }
}

/// Serializes the graph to text (header plus one row per node).
pub fn write_graph(graph: &RadialGraph) -> String {
    let grid = graph.grid();
    let mut out = format!("# {}\n", grid.header());
    write_rows(graph, &mut out);
    out
}

pub(crate) fn write_rows(graph: &RadialGraph, out: &mut String) {
    let grid = graph.grid();
    for (idx, v) in graph.phi().iter().enumerate() {
        let (t, p) = grid.coords(idx);
        if grid.dim() == 1 {
            out.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(*v)));
        } else {
            out.push_str(&format!("{},{},{}\n", fmt_f64(t), fmt_f64(p), fmt_f64(*v)));
        }
    }
}

/// Parses node rows for a known grid. `first_line` is used for error messages.
pub(crate) fn read_rows<'a>(
    grid: SphericalGrid,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<RadialGraph> {
    let cols = grid.dim() + 1;
    let mut phi = Vec::with_capacity(grid.len());
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::Syntax {
                line: lineno,
                msg: format!("expected {cols} columns, found {}", fields.len()),
            });
        }
        let mut vals = Vec::with_capacity(cols);
        for f in &fields {
            vals.push(f.trim().parse::<f64>().map_err(|e| Error::Syntax {
                line: lineno,
                msg: format!("'{f}': {e}"),
            })?);
        }
        let idx = phi.len();
        if idx >= grid.len() {
            return Err(Error::Syntax {
                line: lineno,
                msg: "more rows than grid nodes".into(),
            });
        }
        let (t, p) = grid.coords(idx);
        let coord_ok = (vals[0] - t).abs() < 1e-9 && (grid.dim() == 1 || (vals[1] - p).abs() < 1e-9);
        if !coord_ok {
            return Err(Error::Syntax {
                line: lineno,
                msg: format!("node coordinates do not match grid node {idx}"),
            });
        }
        phi.push(vals[cols - 1]);
    }
    RadialGraph::new(grid, phi)
}

/// Parses text produced by [`write_graph`].
pub fn read_graph(text: &str) -> Result<RadialGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::Syntax {
        line: 1,
        msg: "empty graph file".into(),
    })?;
    let header = header.trim().strip_prefix('#').ok_or(Error::Syntax {
        line: 1,
        msg: "missing '#' grid header".into(),
    })?;
    let grid = parse_grid_header(header)?;
    read_rows(grid, lines)
}

pub fn save_graph(graph: &RadialGraph, path: &Path) -> Result<()> {
    std::fs::write(path, write_graph(graph)).map_err(|e| Error::io(path, e))
}

pub fn load_graph(path: &Path) -> Result<RadialGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_graph(&text)
}
