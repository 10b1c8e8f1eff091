//! Edge-list text format.
//!
//! ```text
//! n m
//! u v        (m lines, u < v, lexicographic, 0-indexed)
//! # aux u v  (optional, one line per auxiliary edge)
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list(g: &Graph, with_aux: bool) -> String {
    let mut out = String::with_capacity(12 * (g.m() + 1));
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    if with_aux {
        for &(u, v) in g.aux_edges() {
            writeln!(out, "# aux {u} {v}").unwrap();
        }
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

fn parse_pair(line: usize, fields: &[&str]) -> Result<(u64, u64)> {
    let bad = |msg: String| Error::Parse { line, msg };
    match fields {
        [a, b] => {
            let a = a.parse().map_err(|_| bad(format!("invalid integer {a:?}")))?;
            let b = b.parse().map_err(|_| bad(format!("invalid integer {b:?}")))?;
            Ok((a, b))
        }
        _ => Err(bad(format!("expected two integers, found {} fields", fields.len()))),
    }
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = parse_pair(1, &fields)?;
    let n = usize::try_from(n).ok().filter(|&n| n <= u32::MAX as usize).ok_or(Error::Parse {
        line: 1,
        msg: format!("vertex count {n} too large"),
    })?;

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut aux = Vec::new();
    for (line, text) in lines {
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line, msg };
        let check = |u: u64, v: u64| -> Result<(u32, u32)> {
            if u >= n as u64 || v >= n as u64 {
                return Err(bad(format!("label out of range in ({u}, {v}) for n = {n}")));
            }
            if u == v {
                return Err(bad(format!("self-loop at vertex {u}")));
            }
            Ok((u.min(v) as u32, u.max(v) as u32))
        };
        if let Some(rest) = text.strip_prefix('#') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if let Some((&"aux", pair)) = fields.split_first() {
                let (u, v) = parse_pair(line, pair)?;
                aux.push((line, check(u, v)?));
            }
            continue;
        }
        if !aux.is_empty() {
            return Err(bad("edge line after the auxiliary block".into()));
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let (u, v) = parse_pair(line, &fields)?;
        let e = check(u, v)?;
        if !seen.insert(e) {
            return Err(bad(format!("duplicate edge ({}, {})", e.0, e.1)));
        }
        edges.push(e);
    }
    if edges.len() as u64 != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    for &(line, e) in &aux {
        if !seen.contains(&e) {
            return Err(Error::Parse { line, msg: format!("auxiliary pair ({}, {}) is not an edge", e.0, e.1) });
        }
    }
    Graph::new(n, edges)?.with_aux(aux.into_iter().map(|(_, e)| e).collect())
}
