//! Selection of the k nodes that receive high-quality transceivers.
//!
//! Four rankings are available: degree, shortest-path betweenness
//! (Brandes accumulation), greedy spectral-radius reduction, and a uniform
//! random pick as the banal baseline. All ties break toward the lowest
//! node label so every method is deterministic given its inputs.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::stream_rng;
use crate::spectral::lambda_max_adjacency;

/// Residual spectral radii closer than this are treated as tied and
/// resolved by node label, so the greedy choice does not depend on
/// eigensolver noise.
const SPECTRAL_TIE_EPS: f64 = 1e-9;

/// How the transceiver nodes were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Degree,
    Betweenness,
    /// Greedy spectral-radius reduction: repeatedly remove the node whose
    /// deletion most reduces the adjacency lambda_max of what remains.
    #[serde(rename = "spectral")]
    Spectral,
    Random,
    /// Baseline: no nodes selected, no speedup anywhere.
    None,
}

impl SelectionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionMethod::Degree => "degree",
            SelectionMethod::Betweenness => "betweenness",
            SelectionMethod::Spectral => "spectral",
            SelectionMethod::Random => "random",
            SelectionMethod::None => "none",
        }
    }

    pub fn parse(name: &str) -> Result<SelectionMethod> {
        match name {
            "degree" => Ok(SelectionMethod::Degree),
            "betweenness" | "bc" => Ok(SelectionMethod::Betweenness),
            "spectral" | "av11" => Ok(SelectionMethod::Spectral),
            "random" => Ok(SelectionMethod::Random),
            "none" | "baseline" => Ok(SelectionMethod::None),
            other => Err(Error::Parameter(format!("unknown method '{other}'"))),
        }
    }

    /// The four active methods, in canonical report order.
    pub fn all_active() -> [SelectionMethod; 4] {
        [
            SelectionMethod::Degree,
            SelectionMethod::Betweenness,
            SelectionMethod::Spectral,
            SelectionMethod::Random,
        ]
    }
}

/// The selected nodes plus the delay factor applied to their departing
/// links. `speedup_factor` is in (0, 1]; selection constructors return 1.0
/// (no speedup) and [`AllocationPlan::with_speedup`] sets the real factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub method: SelectionMethod,
    pub k: usize,
    pub alpha: f64,
    pub selected: Vec<NodeId>,
}

impl AllocationPlan {
    /// Baseline plan: nothing selected, factor 1.
    pub fn none() -> AllocationPlan {
        AllocationPlan {
            method: SelectionMethod::None,
            k: 0,
            alpha: 1.0,
            selected: Vec::new(),
        }
    }

    pub fn with_speedup(mut self, alpha: f64) -> Result<AllocationPlan> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!(
                "speedup factor must be in (0, 1], got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn is_selected(&self, node: NodeId) -> bool {
        self.selected.contains(&node)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.selected.len() != self.k {
            return Err(Error::Parameter(format!(
                "plan says k={} but selects {} nodes",
                self.k,
                self.selected.len()
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Parameter(format!(
                "alpha {} out of (0, 1]",
                self.alpha
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &node in &self.selected {
            if node.index() >= g.node_count() {
                return Err(Error::Parameter(format!(
                    "selected node {node} out of range"
                )));
            }
            if !seen.insert(node) {
                return Err(Error::Parameter(format!("node {node} selected twice")));
            }
        }
        if self.method == SelectionMethod::None && !self.selected.is_empty() {
            return Err(Error::Parameter(
                "baseline plan must select no nodes".into(),
            ));
        }
        Ok(())
    }
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k > g.node_count() {
        return Err(Error::Parameter(format!(
            "cannot select k={k} nodes from {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Top-k nodes ranked by a score, higher first, ties to the lowest label.
fn top_k_by_score(scores: &[f64], k: usize) -> Vec<NodeId> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    order.truncate(k);
    order.into_iter().map(NodeId::from).collect()
}

/// The k highest-degree nodes.
pub fn select_by_degree(g: &Graph, k: usize) -> Result<AllocationPlan> {
    check_k(g, k)?;
    let scores: Vec<f64> = g.nodes().map(|u| g.degree(u) as f64).collect();
    Ok(AllocationPlan {
        method: SelectionMethod::Degree,
        k,
        alpha: 1.0,
        selected: top_k_by_score(&scores, k),
    })
}

/// Unnormalized shortest-path betweenness over unordered pairs, endpoints
/// excluded, with fractional credit across equal-length shortest paths.
///
/// Brandes accumulation: a BFS from each source builds the shortest-path
/// DAG and path counts sigma, then dependencies are pushed back down the
/// DAG. The per-source sums count each unordered pair from both endpoints,
/// so the total is halved.
pub fn betweenness_scores(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut centrality = vec![0.0f64; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = std::collections::VecDeque::new();

    for s in 0..n {
        stack.clear();
        queue.clear();
        for i in 0..n {
            predecessors[i].clear();
            sigma[i] = 0.0;
            dist[i] = -1;
            delta[i] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(NodeId(v as u32)) {
                let w = w.index();
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    predecessors[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    for c in centrality.iter_mut() {
        *c /= 2.0;
    }
    centrality
}

/// The k highest-betweenness nodes.
pub fn select_by_betweenness(g: &Graph, k: usize) -> Result<AllocationPlan> {
    check_k(g, k)?;
    let scores = betweenness_scores(g);
    Ok(AllocationPlan {
        method: SelectionMethod::Betweenness,
        k,
        alpha: 1.0,
        selected: top_k_by_score(&scores, k),
    })
}

/// Greedy spectral-radius reduction: at each of k steps, remove the node
/// whose deletion leaves the smallest adjacency lambda_max, ties to the
/// lowest label. Selection order is the removal order.
///
/// Removing a node that is already isolated in the residual graph leaves
/// the edge set (hence lambda_max) untouched, so those candidates reuse the
/// residual's own spectral radius without an eigensolve.
pub fn select_spectral(g: &Graph, k: usize) -> Result<AllocationPlan> {
    check_k(g, k)?;
    let mut remaining: Vec<NodeId> = g.nodes().collect();
    let mut selected = Vec::with_capacity(k);
    for _ in 0..k {
        // `remaining` stays sorted, so residual labels map back to original
        // labels order-preservingly and label tie-breaks carry over.
        let residual = g.induced_subgraph(&remaining);
        let current_lam = lambda_max_adjacency(&residual);
        let mut best: Option<(usize, f64)> = None;
        for local in 0..residual.node_count() {
            let candidate = NodeId(local as u32);
            let lam = if residual.degree(candidate) == 0 {
                current_lam
            } else {
                let keep: Vec<NodeId> = residual.nodes().filter(|&u| u != candidate).collect();
                lambda_max_adjacency(&residual.induced_subgraph(&keep))
            };
            let better = match best {
                None => true,
                Some((_, lam_best)) => lam < lam_best - SPECTRAL_TIE_EPS,
            };
            if better {
                best = Some((local, lam));
            }
        }
        let (chosen_local, _) = best.expect("k <= remaining.len()");
        let chosen = remaining[chosen_local];
        selected.push(chosen);
        remaining.remove(chosen_local);
    }
    Ok(AllocationPlan {
        method: SelectionMethod::Spectral,
        k,
        alpha: 1.0,
        selected,
    })
}

/// Uniform sample of k nodes without replacement, deterministic per seed.
pub fn select_random(g: &Graph, k: usize, seed: u64) -> Result<AllocationPlan> {
    check_k(g, k)?;
    let mut rng = stream_rng(&[seed]);
    let mut selected: Vec<NodeId> = sample(&mut rng, g.node_count(), k)
        .into_iter()
        .map(NodeId::from)
        .collect();
    selected.sort_unstable();
    Ok(AllocationPlan {
        method: SelectionMethod::Random,
        k,
        alpha: 1.0,
        selected,
    })
}

/// Number of nodes chosen by both plans.
pub fn selection_overlap(a: &AllocationPlan, b: &AllocationPlan) -> usize {
    a.selected
        .iter()
        .filter(|node| b.selected.contains(node))
        .count()
}
