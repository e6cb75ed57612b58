//! Immutable undirected swarm communication graphs.
//!
//! Nodes carry dense contiguous labels `0..n`; the label order matters
//! because the gossip protocol contacts neighbors in ascending label order.
//! Edges are unordered pairs with a nominal acoustic-path distance in
//! meters. A graph is immutable after construction and safe to share
//! across threads.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default nominal inter-vehicle distance in meters.
pub const DEFAULT_DISTANCE_M: f64 = 150.0;

/// Dense node label in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

/// Undirected edge `{u, v}` with `u < v` and a nominal distance in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub distance_m: f64,
}

/// Immutable undirected graph with per-edge distances.
///
/// Invariants enforced at construction: no self-loops, no duplicate edges,
/// endpoints in range. Connectivity is an invariant of the topology
/// builders, not of this type (subgraphs and hand-built test graphs may be
/// disconnected).
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Build from an edge list; pairs are normalized to `u < v` and sorted.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut normalized: Vec<Edge> = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        for &(a, b, d) in edges {
            if a == b {
                return Err(Error::Parameter(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Parameter(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::Parameter(format!("duplicate edge ({u}, {v})")));
            }
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Parameter(format!(
                    "invalid distance {d} on edge ({u}, {v})"
                )));
            }
            normalized.push(Edge {
                u: NodeId(u as u32),
                v: NodeId(v as u32),
                distance_m: d,
            });
        }
        normalized.sort_by_key(|e| (e.u, e.v));

        let mut adjacency = vec![Vec::new(); n];
        for e in &normalized {
            adjacency[e.u.index()].push(e.v);
            adjacency[e.v.index()].push(e.u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalized,
            adjacency,
        })
    }

    /// Convenience constructor with the default 150 m distance on every edge.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let with_dist: Vec<(usize, usize, f64)> = pairs
            .iter()
            .map(|&(a, b)| (a, b, DEFAULT_DISTANCE_M))
            .collect();
        Self::new(n, &with_dist)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `u` in ascending label order.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).map(|i| NodeId(i as u32))
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u.index()].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Edge set as sorted `(u, v)` index pairs (distances dropped).
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| (e.u.index(), e.v.index()))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.component_of(NodeId(0)).len() == self.n
    }

    /// BFS component containing `start`.
    fn component_of(&self, start: NodeId) -> Vec<NodeId> {
        let mut visited = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        let mut out = Vec::new();
        visited[start.index()] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &w in self.neighbors(u) {
                if !visited[w.index()] {
                    visited[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Induced subgraph on `keep` (relabeled densely in the order given by
    /// ascending original label). Used by spectral node removal.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Graph {
        let mut sorted: Vec<NodeId> = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut relabel = vec![usize::MAX; self.n];
        for (new, old) in sorted.iter().enumerate() {
            relabel[old.index()] = new;
        }
        let edges: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .filter(|e| relabel[e.u.index()] != usize::MAX && relabel[e.v.index()] != usize::MAX)
            .map(|e| (relabel[e.u.index()], relabel[e.v.index()], e.distance_m))
            .collect();
        Graph::new(sorted.len(), &edges).expect("induced subgraph preserves validity")
    }

    /// Eccentricity-based diameter of the largest component (0 for n <= 1).
    fn diameter_largest_component(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        let mut visited = vec![false; self.n];
        let mut largest: Vec<NodeId> = Vec::new();
        for s in 0..self.n {
            if !visited[s] {
                let comp = self.component_of(NodeId(s as u32));
                for &u in &comp {
                    visited[u.index()] = true;
                }
                if comp.len() > largest.len() {
                    largest = comp;
                }
            }
        }
        let mut diameter = 0usize;
        for &s in &largest {
            let dist = self.bfs_distances(s);
            for &u in &largest {
                if let Some(d) = dist[u.index()] {
                    diameter = diameter.max(d);
                }
            }
        }
        diameter
    }

    /// BFS hop distances from `s`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, s: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[s.index()] = Some(0);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap();
            for &w in self.neighbors(u) {
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn stats(&self) -> GraphStats {
        let m = self.edges.len();
        let max_degree = (0..self.n)
            .map(|i| self.adjacency[i].len())
            .max()
            .unwrap_or(0);
        GraphStats {
            n: self.n,
            m,
            avg_degree: if self.n == 0 {
                0.0
            } else {
                2.0 * m as f64 / self.n as f64
            },
            max_degree,
            is_connected: self.is_connected(),
            diameter: self.diameter_largest_component(),
        }
    }
}

/// Summary counters for a graph; `diameter` is taken over the largest
/// component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub is_connected: bool,
    pub diameter: usize,
}

/// Serialize as edge-list text: header `nodes <N>`, then one
/// `<u> <v> <distance_m>` line per edge in sorted order. `#` starts a
/// comment line. Output is byte-deterministic for a given graph.
pub fn save_graph<W: Write>(g: &Graph, mut sink: W) -> Result<()> {
    writeln!(sink, "nodes {}", g.node_count())?;
    for e in g.edges() {
        writeln!(sink, "{} {} {}", e.u, e.v, e.distance_m)?;
    }
    Ok(())
}

/// Parse the edge-list format written by [`save_graph`].
pub fn load_graph<R: Read>(source: R) -> Result<Graph> {
    let reader = BufReader::new(source);
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let content = line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut fields = content.split_whitespace();
        if n.is_none() {
            let tag = fields.next();
            let count = fields.next();
            match (tag, count, fields.next()) {
                (Some("nodes"), Some(c), None) => {
                    n = Some(c.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid node count '{c}'"),
                    })?);
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected header 'nodes <N>'".into(),
                    })
                }
            }
            continue;
        }
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected '<u> <v> <distance_m>', got '{content}'"),
            });
        }
        let u: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid node id '{}'", parts[0]),
        })?;
        let v: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid node id '{}'", parts[1]),
        })?;
        let d: f64 = parts[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid distance '{}'", parts[2]),
        })?;
        let n = n.unwrap();
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("self-loop at node {u}"),
            });
        }
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("node id out of range for {n} nodes"),
            });
        }
        edges.push((u, v, d));
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing 'nodes <N>' header".into(),
    })?;
    // Re-check duplicates here so the error carries a parse context.
    let mut seen = HashSet::new();
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        let key = if u < v { (u, v) } else { (v, u) };
        if !seen.insert(key) {
            return Err(Error::Parse {
                line: i + 2,
                msg: format!("duplicate edge ({u}, {v})"),
            });
        }
    }
    Graph::new(n, &edges)
}
