//! Swarm topology generators.
//!
//! Five configurations are supported: Erdos-Renyi, small-world, cluster
//! (interconnected rings), grid, and galaxy (interconnected stars). Each
//! generator builds a deterministic base structure and then normalizes the
//! edge count to a common target so that configurations are comparable at
//! equal node and edge counts. Normalization adds edges uniformly among
//! absent pairs, or removes edges uniformly among those whose removal keeps
//! the graph connected.
//!
//! Base recipes (node labels matter for the gossip numeration rule):
//! - Erdos-Renyi: uniform random spanning tree (Prufer decode), then random
//!   extra edges up to the target. The tree guarantees connectivity without
//!   rejection loops.
//! - Small-world: ring lattice of the given base degree; normalization
//!   supplies the random shortcuts.
//! - Cluster: consecutive-labeled rings joined into a ring of rings by one
//!   bridge per adjacent ring pair; normalization adds random chords.
//! - Grid: rows x cols lattice in row-major labeling; normalization prunes
//!   down to the target.
//! - Galaxy: hub core on the lowest labels with leaves_per_hub pendant
//!   nodes per hub. Small cores (<= 4 hubs) are complete; larger cores are
//!   the complete graph minus a Hamiltonian cycle, which keeps the hub
//!   cluster dominant while holding its spectral radius inside the range
//!   observed for hub-dominated swarms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, DEFAULT_DISTANCE_M};
use crate::rng::{derive_seed, stream_rng};

/// Topology family plus its structural parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    ErdosRenyi,
    SmallWorld { base_degree: usize },
    Cluster { rings: usize, ring_size: usize },
    Grid { rows: usize, cols: usize },
    Galaxy { hubs: usize, leaves_per_hub: usize },
}

impl TopologyKind {
    /// Short lowercase name used in CLI arguments and report rows.
    pub fn name(&self) -> &'static str {
        match self {
            TopologyKind::ErdosRenyi => "er",
            TopologyKind::SmallWorld { .. } => "sw",
            TopologyKind::Cluster { .. } => "cluster",
            TopologyKind::Grid { .. } => "grid",
            TopologyKind::Galaxy { .. } => "galaxy",
        }
    }

    /// Resolve a kind name to parameters appropriate for `n` nodes.
    ///
    /// Parameter choices: grid picks the most square rows x cols factoring;
    /// cluster picks ring count near sqrt(n) with rings of at least three
    /// nodes; galaxy picks a hub count near sqrt(n) dividing n; small-world
    /// uses base degree 2 (a plain cycle).
    pub fn default_for(name: &str, n: usize) -> Result<TopologyKind> {
        match name {
            "er" | "erdos-renyi" | "erdosrenyi" => Ok(TopologyKind::ErdosRenyi),
            "sw" | "smallworld" | "small-world" => Ok(TopologyKind::SmallWorld { base_degree: 2 }),
            "grid" => {
                let rows = most_square_divisor(n)
                    .ok_or_else(|| Error::Parameter(format!("no grid factoring for n={n}")))?;
                Ok(TopologyKind::Grid {
                    rows,
                    cols: n / rows,
                })
            }
            "cluster" => {
                let rings = (1..=n)
                    .rev()
                    .filter(|r| *r * *r <= n)
                    .find(|r| n.is_multiple_of(*r) && n / r >= 3)
                    .ok_or_else(|| Error::Parameter(format!("no ring factoring for n={n}")))?;
                Ok(TopologyKind::Cluster {
                    rings,
                    ring_size: n / rings,
                })
            }
            "galaxy" => {
                let hubs = (1..=n)
                    .rev()
                    .filter(|h| *h * *h <= n)
                    .find(|h| n.is_multiple_of(*h) && n / h >= 2)
                    .ok_or_else(|| Error::Parameter(format!("no hub factoring for n={n}")))?;
                Ok(TopologyKind::Galaxy {
                    hubs,
                    leaves_per_hub: n / hubs - 1,
                })
            }
            other => Err(Error::Parameter(format!("unknown topology kind '{other}'"))),
        }
    }

    /// The five standard configurations at their default parameters.
    pub fn standard_five(n: usize) -> Result<Vec<TopologyKind>> {
        ["er", "sw", "galaxy", "grid", "cluster"]
            .iter()
            .map(|k| TopologyKind::default_for(k, n))
            .collect()
    }
}

fn most_square_divisor(n: usize) -> Option<usize> {
    (1..=n)
        .rev()
        .filter(|r| *r * *r <= n)
        .find(|r| n.is_multiple_of(*r))
}

/// Build a topology with exactly `n` nodes and `m_target` edges, connected,
/// as a deterministic function of `(kind, n, m_target, seed)`. Every edge
/// carries the nominal 150 m distance.
pub fn build_topology(kind: TopologyKind, n: usize, m_target: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 nodes, got {n}")));
    }
    let max_edges = n * (n - 1) / 2;
    if m_target < n - 1 || m_target > max_edges {
        return Err(Error::InfeasibleEdgeCount {
            requested: m_target,
            nodes: n,
            min: n - 1,
            max: max_edges,
        });
    }
    let base = base_edges(kind, n, seed)?;
    let g = Graph::from_pairs(n, &base)?;
    debug_assert!(g.is_connected(), "base construction must be connected");
    normalize_edge_count(&g, m_target, derive_seed(&[seed, 1]))
}

/// Deterministic base edge set for a kind (ER draws its spanning tree from
/// a stream derived from `seed`).
fn base_edges(kind: TopologyKind, n: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    match kind {
        TopologyKind::ErdosRenyi => Ok(random_spanning_tree(n, derive_seed(&[seed, 0]))),
        TopologyKind::SmallWorld { base_degree } => ring_lattice(n, base_degree),
        TopologyKind::Cluster { rings, ring_size } => cluster_of_rings(n, rings, ring_size),
        TopologyKind::Grid { rows, cols } => grid_lattice(n, rows, cols),
        TopologyKind::Galaxy {
            hubs,
            leaves_per_hub,
        } => galaxy(n, hubs, leaves_per_hub),
    }
}

/// Uniform random labeled spanning tree via Prufer decoding.
fn random_spanning_tree(n: usize, seed: u64) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut rng = stream_rng(&[seed]);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &prufer {
        degree[x] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&i| degree[i] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &prufer {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("prufer decode leaf");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.push(std::cmp::Reverse(x));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}

fn ring_lattice(n: usize, base_degree: usize) -> Result<Vec<(usize, usize)>> {
    if base_degree < 2 || !base_degree.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "small-world base degree must be even and >= 2, got {base_degree}"
        )));
    }
    let half = base_degree / 2;
    if n <= base_degree {
        return Err(Error::Parameter(format!(
            "ring lattice needs n > base_degree ({n} <= {base_degree})"
        )));
    }
    let mut edges = Vec::with_capacity(n * half);
    for i in 0..n {
        for d in 1..=half {
            edges.push((i, (i + d) % n));
        }
    }
    Ok(edges)
}

fn cluster_of_rings(n: usize, rings: usize, ring_size: usize) -> Result<Vec<(usize, usize)>> {
    if rings * ring_size != n {
        return Err(Error::Parameter(format!(
            "cluster parameters {rings} x {ring_size} do not factor n={n}"
        )));
    }
    if ring_size < 3 {
        return Err(Error::Parameter(format!(
            "cluster ring size must be >= 3, got {ring_size}"
        )));
    }
    let mut edges = Vec::new();
    for r in 0..rings {
        let base = r * ring_size;
        for j in 0..ring_size {
            edges.push((base + j, base + (j + 1) % ring_size));
        }
    }
    // One bridge per adjacent ring pair, first member to first member.
    if rings >= 2 {
        let mut seen = std::collections::HashSet::new();
        for r in 0..rings {
            let a = r * ring_size;
            let b = ((r + 1) % rings) * ring_size;
            let key = if a < b { (a, b) } else { (b, a) };
            if seen.insert(key) {
                edges.push(key);
            }
        }
    }
    Ok(edges)
}

fn grid_lattice(n: usize, rows: usize, cols: usize) -> Result<Vec<(usize, usize)>> {
    if rows * cols != n {
        return Err(Error::Parameter(format!(
            "grid dimensions {rows} x {cols} do not factor n={n}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                edges.push((id, id + 1));
            }
            if r + 1 < rows {
                edges.push((id, id + cols));
            }
        }
    }
    Ok(edges)
}

fn galaxy(n: usize, hubs: usize, leaves_per_hub: usize) -> Result<Vec<(usize, usize)>> {
    if hubs == 0 || hubs * (1 + leaves_per_hub) != n {
        return Err(Error::Parameter(format!(
            "galaxy parameters {hubs} hubs x {leaves_per_hub} leaves do not factor n={n}"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..hubs {
        for j in (i + 1)..hubs {
            // Core: complete for small hub counts, complete minus the
            // Hamiltonian cycle otherwise (see module docs).
            if hubs >= 5 {
                let ring_adjacent = j == i + 1 || (i == 0 && j == hubs - 1);
                if ring_adjacent {
                    continue;
                }
            }
            edges.push((i, j));
        }
    }
    for i in 0..hubs {
        for l in 0..leaves_per_hub {
            edges.push((i, hubs + i * leaves_per_hub + l));
        }
    }
    Ok(edges)
}

/// Expected galaxy base edge count for the construction above.
pub fn galaxy_base_edge_count(hubs: usize, leaves_per_hub: usize) -> usize {
    let core = if hubs >= 5 {
        hubs * (hubs - 1) / 2 - hubs
    } else {
        hubs * (hubs - 1) / 2
    };
    core + hubs * leaves_per_hub
}

/// Adjust the edge count of a connected graph to `m_target`.
///
/// Additions pick uniformly among absent pairs, so the original edge set is
/// preserved when growing. Removals pick uniformly among edges whose
/// removal keeps the graph connected (checked per removal). Candidate lists
/// are enumerated in ascending `(u, v)` order, so the result is a
/// deterministic function of `(g, m_target, seed)`.
pub fn normalize_edge_count(g: &Graph, m_target: usize, seed: u64) -> Result<Graph> {
    if !g.is_connected() {
        return Err(Error::Normalization("input graph must be connected".into()));
    }
    let n = g.node_count();
    let mut rng = stream_rng(&[seed]);
    let mut pairs = g.edge_pairs();

    while pairs.len() < m_target {
        let current = Graph::from_pairs(n, &pairs)?;
        let mut absent = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if !current.has_edge(NodeId(u as u32), NodeId(v as u32)) {
                    absent.push((u, v));
                }
            }
        }
        if absent.is_empty() {
            return Err(Error::Normalization(format!(
                "cannot grow to {m_target} edges: graph is complete at {}",
                pairs.len()
            )));
        }
        pairs.push(absent[rng.random_range(0..absent.len())]);
    }

    while pairs.len() > m_target {
        let mut removable = Vec::new();
        for i in 0..pairs.len() {
            let mut trial = pairs.clone();
            trial.swap_remove(i);
            if Graph::from_pairs(n, &trial)?.is_connected() {
                removable.push(i);
            }
        }
        if removable.is_empty() {
            return Err(Error::Normalization(format!(
                "cannot shrink to {m_target} edges without disconnecting (stuck at {})",
                pairs.len()
            )));
        }
        // Candidates sorted by (u, v) to make the index draw reproducible.
        removable.sort_by_key(|&i| pairs[i]);
        let victim = removable[rng.random_range(0..removable.len())];
        pairs.remove(victim);
    }

    let with_dist: Vec<(usize, usize, f64)> = pairs
        .iter()
        .map(|&(u, v)| (u, v, DEFAULT_DISTANCE_M))
        .collect();
    Graph::new(n, &with_dist)
}
