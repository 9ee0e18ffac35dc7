//! Plain-text interchange formats.
//!
//! * edge list: header `n m`, then `m` lines `u v` with `u < v`, canonical order
//! * DOT: `graph G { ... }` with one `u -- v;` line per edge
//! * orientation sidecar: one `u v` line per arc, meaning `u -> v`
//! * matrix dump: first line the order, then one line of space-separated
//!   entries per row
//!
//! Every writer ends each line with `\n`; parsers accept exactly what the
//! writers emit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::OrientedGraph;
use crate::graph::{FamilyTag, Graph};
use crate::matching::Matching;
use crate::pfaffian::IntMatrix;

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.u, e.v);
    }
    out
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split(' ');
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected two integers".into(),
            })?
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            message: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let (n, m) = parse_pair(header, 1)?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let (u, v) = parse_pair(line, i + 2)?;
        if u >= v {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("edge {u} {v} is not in canonical order"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: edges.len() + 1,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            line: 2,
            message: "edges are not in canonical order".into(),
        });
    }
    Graph::from_edges(n, edges)
}

pub fn write_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.n() {
        match g.meta(v).hub_role {
            Some(role) => {
                let _ = writeln!(out, "  {v} [label=\"{}\"];", role.name());
            }
            None => {
                let _ = writeln!(out, "  {v};");
            }
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "  {} -- {};", e.u, e.v);
    }
    out.push_str("}\n");
    out
}

/// Parses the DOT subset produced by [`write_dot`]. Hub labels are ignored.
pub fn parse_dot(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "graph G {")) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected `graph G {`".into(),
            })
        }
    }
    let mut n = 0usize;
    let mut edges = Vec::new();
    let mut closed = false;
    for (i, line) in lines {
        let lineno = i + 1;
        if line == "}" {
            closed = true;
            continue;
        }
        if closed {
            return Err(Error::Parse {
                line: lineno,
                message: "content after closing brace".into(),
            });
        }
        let body = line
            .strip_prefix("  ")
            .and_then(|l| l.strip_suffix(';'))
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: "malformed statement".into(),
            })?;
        let bad = |m: &str| Error::Parse {
            line: lineno,
            message: m.to_string(),
        };
        if let Some((a, b)) = body.split_once(" -- ") {
            let u = a.parse::<usize>().map_err(|_| bad("bad endpoint"))?;
            let v = b.parse::<usize>().map_err(|_| bad("bad endpoint"))?;
            edges.push((u, v));
        } else {
            let id = body.split(' ').next().unwrap_or_default();
            let v = id.parse::<usize>().map_err(|_| bad("bad vertex id"))?;
            if v != n {
                return Err(bad("vertex declarations must be dense and ordered"));
            }
            n += 1;
        }
    }
    if !closed {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "missing closing brace".into(),
        });
    }
    Graph::from_edges(n, edges)
}

/// Arcs `u v` meaning `u -> v`, in canonical edge order of the base graph.
pub fn write_orientation(og: &OrientedGraph) -> String {
    let mut out = String::new();
    for (tail, head) in og.arcs() {
        let _ = writeln!(out, "{tail} {head}");
    }
    out
}

pub fn parse_orientation(base: Graph, text: &str) -> Result<OrientedGraph> {
    let mut arcs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        arcs.push(parse_pair(line, i + 1)?);
    }
    OrientedGraph::from_arcs(base, &arcs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub m: usize,
    pub family: Option<FamilyTag>,
    pub edges: Vec<[usize; 2]>,
    pub hubs: BTreeMap<String, usize>,
    pub gen_iteration: Vec<u32>,
}

pub fn graph_to_json(g: &Graph) -> GraphJson {
    let hubs = (0..g.n())
        .filter_map(|v| g.meta(v).hub_role.map(|r| (r.name().to_string(), v)))
        .collect();
    GraphJson {
        n: g.n(),
        m: g.edge_count(),
        family: g.family_tag(),
        edges: g.edges().map(|e| [e.u, e.v]).collect(),
        hubs,
        gen_iteration: g.metas().iter().map(|m| m.gen_iteration).collect(),
    }
}

/// Matchings serialize as a JSON list of `[u, v]` pairs.
pub fn matching_to_json(m: &Matching) -> serde_json::Value {
    serde_json::Value::Array(
        m.edges()
            .iter()
            .map(|e| serde_json::json!([e.u, e.v]))
            .collect(),
    )
}

pub fn write_matrix(m: &IntMatrix) -> String {
    let mut out = format!("{}\n", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut lines = text.lines();
    let order: usize = lines
        .next()
        .ok_or(Error::Parse {
            line: 1,
            message: "missing order".into(),
        })?
        .parse()
        .map_err(|_| Error::Parse {
            line: 1,
            message: "order is not an integer".into(),
        })?;
    let mut data = Vec::with_capacity(order * order);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let entries: std::result::Result<Vec<BigInt>, _> =
            line.split(' ').filter(|s| !s.is_empty()).map(str::parse).collect();
        let entries = entries.map_err(|_| Error::Parse {
            line: i + 2,
            message: "bad matrix entry".into(),
        })?;
        if entries.len() != order {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("expected {order} entries, found {}", entries.len()),
            });
        }
        data.extend(entries);
        rows += 1;
    }
    if rows != order {
        return Err(Error::Parse {
            line: rows + 1,
            message: format!("expected {order} rows, found {rows}"),
        });
    }
    Ok(IntMatrix::from_vec(order, order, data))
}
