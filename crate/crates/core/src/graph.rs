//! Simple undirected graphs, colorings, the text/JSON file formats, and the
//! global validity checks every phase relies on.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub type Vertex = usize;
pub type Color = u32;

/// Immutable simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
    delta: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Edge orientation is ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge {
                    u: u.min(w[0]),
                    v: u.max(w[0]),
                });
            }
            m += list.len();
        }
        let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph { adj, m: m / 2, delta })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Maximum degree.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Induced subgraph on `vertices` (must be strictly increasing). Vertex
    /// `i` of the result corresponds to `vertices[i]`.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj: Vec<Vec<Vertex>> = vertices
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
        Graph { adj, m, delta }
    }

    /// Parses the edge-list text format: header `n m delta`, then `m` lines
    /// `u v`. Errors carry 1-based line numbers.
    pub fn read_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields = parse_fields(header, hline + 1, 3)?;
        let (n, m, delta) = (fields[0], fields[1], fields[2]);
        let mut adj = vec![Vec::new(); n];
        let mut count = 0;
        for (i, line) in lines {
            let lineno = i + 1;
            let f = parse_fields(line, lineno, 2)?;
            let (u, v) = (f[0], f[1]);
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("vertex {x} out of range for n = {n}"),
                    });
                }
            }
            if u == v {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("self-loop at vertex {u}"),
                });
            }
            if adj[u].contains(&v) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("duplicate edge {{{}, {}}}", u.min(v), u.max(v)),
                });
            }
            adj[u].push(v);
            adj[v].push(u);
            count += 1;
        }
        if count != m {
            return Err(Error::Parse {
                line: hline + 1,
                message: format!("header declares {m} edges, found {count}"),
            });
        }
        let g = Graph::from_edges(n, adj.iter().enumerate().flat_map(|(u, l)| {
            l.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        }))?;
        if g.delta != delta {
            return Err(Error::Parse {
                line: hline + 1,
                message: format!("header declares delta {delta}, graph has {}", g.delta),
            });
        }
        Ok(g)
    }

    /// Canonical text form: edges sorted, `u < v`, newline-terminated.
    pub fn write_text(&self) -> String {
        let mut s = String::with_capacity(12 * (self.m + 1));
        let _ = writeln!(s, "{} {} {}", self.n(), self.m, self.delta);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

fn parse_fields(line: &str, lineno: usize, expected: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not a non-negative integer: {f:?}"),
            })
        })
        .collect()
}

/// Partial vertex coloring with colors in `[delta]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub delta: usize,
    pub colors: Vec<Option<Color>>,
}

#[derive(Serialize, Deserialize)]
struct ColoringFile {
    delta: usize,
    colors: Vec<i64>,
}

impl Coloring {
    pub fn empty(n: usize, delta: usize) -> Self {
        Coloring {
            delta,
            colors: vec![None; n],
        }
    }

    pub fn get(&self, v: Vertex) -> Option<Color> {
        self.colors[v]
    }

    pub fn set(&mut self, v: Vertex, c: Color) {
        self.colors[v] = Some(c);
    }

    pub fn is_colored(&self, v: Vertex) -> bool {
        self.colors[v].is_some()
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    /// Colors of `[delta]` not used by any colored neighbour of `v`.
    pub fn palette(&self, g: &Graph, v: Vertex) -> Vec<Color> {
        let mut used = vec![false; self.delta];
        for &w in g.neighbors(v) {
            if let Some(c) = self.colors[w] {
                if (c as usize) < self.delta {
                    used[c as usize] = true;
                }
            }
        }
        (0..self.delta as Color).filter(|&c| !used[c as usize]).collect()
    }

    pub fn to_json(&self) -> String {
        let file = ColoringFile {
            delta: self.delta,
            colors: self.colors.iter().map(|c| c.map_or(-1, i64::from)).collect(),
        };
        serde_json::to_string(&file).expect("coloring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ColoringFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let colors = file
            .colors
            .iter()
            .map(|&c| match c {
                -1 => Ok(None),
                c if c >= 0 && c <= Color::MAX as i64 => Ok(Some(c as Color)),
                c => Err(Error::ColoringMismatch {
                    message: format!("invalid color value {c}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coloring {
            delta: file.delta,
            colors,
        })
    }
}

/// Outcome of [`verify_coloring`]; violations are data, not errors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ColoringReport {
    pub monochromatic: Vec<(Vertex, Vertex)>,
    pub uncolored: Vec<Vertex>,
    pub out_of_range: Vec<Vertex>,
    pub size_mismatch: bool,
}

impl ColoringReport {
    pub fn passed(&self) -> bool {
        self.monochromatic.is_empty()
            && self.uncolored.is_empty()
            && self.out_of_range.is_empty()
            && !self.size_mismatch
    }
}

/// Checks properness against `g`, colors in `[g.delta()]`, and optionally
/// totality.
pub fn verify_coloring(g: &Graph, c: &Coloring, require_total: bool) -> ColoringReport {
    let mut report = ColoringReport::default();
    if c.colors.len() != g.n() || c.delta != g.delta() {
        report.size_mismatch = true;
        return report;
    }
    for v in 0..g.n() {
        match c.colors[v] {
            None if require_total => report.uncolored.push(v),
            Some(col) if col as usize >= g.delta() => report.out_of_range.push(v),
            _ => {}
        }
    }
    for (u, v) in g.edges() {
        if let (Some(a), Some(b)) = (c.colors[u], c.colors[v]) {
            if a == b {
                report.monochromatic.push((u, v));
            }
        }
    }
    report
}

/// Returns a clique on `Delta + 1` vertices if one exists. In a graph of
/// maximum degree `Delta`, `v` lies in such a clique iff `deg(v) = Delta`
/// and every neighbour has the same closed neighbourhood as `v`.
pub fn detect_k_delta_plus_one(g: &Graph) -> Option<Vec<Vertex>> {
    let delta = g.delta();
    let closed = |v: Vertex| {
        let mut c = g.neighbors(v).to_vec();
        let pos = c.partition_point(|&w| w < v);
        c.insert(pos, v);
        c
    };
    let hits = par::map_range(g.n(), |v| {
        if g.degree(v) != delta {
            return false;
        }
        let nv = closed(v);
        g.neighbors(v).iter().all(|&u| g.degree(u) == delta && closed(u) == nv)
    });
    hits.iter().position(|&h| h).map(closed)
}
