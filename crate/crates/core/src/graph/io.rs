//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! 3
//! 0 1 0.5
//! 1 2 0.25
//! ```
//!
//! The first non-comment line is the node count; each following line is
//! `src dst p`. Output is written in `(src, dst)` order with 17 significant
//! digits, which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, ProbGraph};
use crate::error::{Error, Result};

/// 17 significant digits, scientific notation.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn parse_edge_list(text: &str) -> Result<ProbGraph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(n) = n else {
            if fields.len() != 1 {
                return Err(err(format!("expected node count, found {} fields", fields.len())));
            }
            let count: usize = fields[0].parse().map_err(|_| err(format!("bad node count {:?}", fields[0])))?;
            if count == 0 {
                return Err(err("node count must be positive".into()));
            }
            n = Some(count);
            continue;
        };
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields \"src dst p\", found {}", fields.len())));
        }
        let src: usize = fields[0].parse().map_err(|_| err(format!("bad node id {:?}", fields[0])))?;
        let dst: usize = fields[1].parse().map_err(|_| err(format!("bad node id {:?}", fields[1])))?;
        let p: f64 = fields[2].parse().map_err(|_| err(format!("bad probability {:?}", fields[2])))?;
        if !(0.0..1.0).contains(&p) {
            return Err(err(format!("probability {p} outside [0, 1)")));
        }
        if src >= n || dst >= n {
            return Err(err(format!("node id out of range for n = {n}")));
        }
        edges.push(Edge::new(src, dst, p));
    }
    let n = n.ok_or(Error::Parse { line: 1, msg: "missing node count".into() })?;
    ProbGraph::new(n, edges)
}

pub fn render_edge_list(g: &ProbGraph) -> String {
    let mut out = format!("{}\n", g.node_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.src, e.dst, format_f64(e.p));
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<ProbGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_edge_list(&text)
}

pub fn write_edge_list(g: &ProbGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_edge_list(g)).map_err(|source| Error::Io { path: path.display().to_string(), source })
}
