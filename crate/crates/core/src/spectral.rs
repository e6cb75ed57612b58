//! Adjacency and Laplacian spectra, connectivity indicators, and the
//! maximum-delay stability bound.
//!
//! Eigenvalues come from a dense cyclic-threshold Jacobi iteration, which
//! converges unconditionally on symmetric matrices and is exact to machine
//! precision at the swarm sizes handled here. Isolated nodes are stripped
//! before the dense solve and re-inserted as exact zeros; residual graphs
//! produced by node-removal selection are mostly isolates, and the
//! reduction keeps the solve small. [`lambda_max_power_iteration`] provides
//! an algorithmically independent second route to the spectral radius for
//! cross-checks.
//!
//! The one ambiguous indicator is the "spectral gap": the difference
//! between the two largest eigenvalues, which can be read off either the
//! adjacency or the Laplacian matrix. [`SpectrumSummary`] reports both.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// The three connectivity indicators plus both full spectra (ascending).
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    /// Largest adjacency eigenvalue (spectral radius).
    pub lambda_max_adj: f64,
    /// Difference of the two largest adjacency eigenvalues.
    pub spectral_gap_adj: f64,
    /// Difference of the two largest Laplacian eigenvalues.
    pub spectral_gap_lap: f64,
    /// Second-smallest Laplacian eigenvalue; zero exactly when the graph is
    /// disconnected (and by convention for n < 2).
    pub algebraic_connectivity: f64,
    pub adjacency_eigenvalues: Vec<f64>,
    pub laplacian_eigenvalues: Vec<f64>,
}

/// Largest uniform delay that keeps consensus dynamics stable on a fixed
/// topology: tau_max = pi / (2 lambda_max).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityBound {
    pub tau_max: f64,
}

/// Eigenvalues of a dense symmetric matrix (row-major, `n x n`) by the
/// cyclic Jacobi method with the standard threshold schedule. Rotations
/// annihilate one off-diagonal entry at a time; convergence is quadratic
/// and the off-diagonal mass reaches exactly zero after a handful of
/// sweeps. Only the upper triangle is maintained.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let idx = |r: usize, c: usize| r * n + c;
    let mut d: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    let mut accumulated = d.clone();
    let mut correction = vec![0.0f64; n];

    for sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[idx(p, q)].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                let small = 100.0 * apq.abs();
                // Entries negligible against both diagonals are flushed to
                // zero once the iteration has settled.
                if sweep > 3 && d[p].abs() + small == d[p].abs() && d[q].abs() + small == d[q].abs()
                {
                    a[idx(p, q)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let mut h = d[q] - d[p];
                let t = if h.abs() + small == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                h = t * apq;
                correction[p] -= h;
                correction[q] += h;
                d[p] -= h;
                d[q] += h;
                a[idx(p, q)] = 0.0;
                for j in 0..p {
                    let g = a[idx(j, p)];
                    let w = a[idx(j, q)];
                    a[idx(j, p)] = g - s * (w + g * tau);
                    a[idx(j, q)] = w + s * (g - w * tau);
                }
                for j in (p + 1)..q {
                    let g = a[idx(p, j)];
                    let w = a[idx(j, q)];
                    a[idx(p, j)] = g - s * (w + g * tau);
                    a[idx(j, q)] = w + s * (g - w * tau);
                }
                for j in (q + 1)..n {
                    let g = a[idx(p, j)];
                    let w = a[idx(q, j)];
                    a[idx(p, j)] = g - s * (w + g * tau);
                    a[idx(q, j)] = w + s * (g - w * tau);
                }
            }
        }
        for i in 0..n {
            accumulated[i] += correction[i];
            d[i] = accumulated[i];
            correction[i] = 0.0;
        }
    }
    d.sort_by(|x, y| x.partial_cmp(y).expect("jacobi produces finite values"));
    d
}

/// Non-isolated nodes of `g`, in label order.
fn active_nodes(g: &Graph) -> Vec<NodeId> {
    g.nodes().filter(|&u| g.degree(u) > 0).collect()
}

/// Spectrum of the full graph from the spectrum of its non-isolated core:
/// every isolated node contributes an exact zero eigenvalue to both the
/// adjacency and the Laplacian.
fn pad_with_zeros(mut core: Vec<f64>, isolates: usize) -> Vec<f64> {
    core.extend(std::iter::repeat_n(0.0, isolates));
    core.sort_by(|x, y| x.partial_cmp(y).unwrap());
    core
}

/// Eigenvalues of the adjacency matrix, ascending.
pub fn adjacency_spectrum(g: &Graph) -> Vec<f64> {
    let active = active_nodes(g);
    let isolates = g.node_count() - active.len();
    let core = g.induced_subgraph(&active);
    let n = core.node_count();
    let mut a = vec![0.0f64; n * n];
    for e in core.edges() {
        a[e.u.index() * n + e.v.index()] = 1.0;
        a[e.v.index() * n + e.u.index()] = 1.0;
    }
    pad_with_zeros(jacobi_eigenvalues(a, n), isolates)
}

/// Eigenvalues of the Laplacian L = D - A, ascending.
pub fn laplacian_spectrum(g: &Graph) -> Vec<f64> {
    let active = active_nodes(g);
    let isolates = g.node_count() - active.len();
    let core = g.induced_subgraph(&active);
    let n = core.node_count();
    let mut l = vec![0.0f64; n * n];
    for e in core.edges() {
        l[e.u.index() * n + e.v.index()] = -1.0;
        l[e.v.index() * n + e.u.index()] = -1.0;
        l[e.u.index() * n + e.u.index()] += 1.0;
        l[e.v.index() * n + e.v.index()] += 1.0;
    }
    pad_with_zeros(jacobi_eigenvalues(l, n), isolates)
}

/// Spectral radius of the adjacency matrix (0 for an empty graph).
pub fn lambda_max_adjacency(g: &Graph) -> f64 {
    adjacency_spectrum(g).last().copied().unwrap_or(0.0)
}

pub fn spectral_summary(g: &Graph) -> SpectrumSummary {
    let adj = adjacency_spectrum(g);
    let lap = laplacian_spectrum(g);
    let n = adj.len();
    let gap = |vals: &[f64]| {
        if n >= 2 {
            vals[n - 1] - vals[n - 2]
        } else {
            0.0
        }
    };
    SpectrumSummary {
        lambda_max_adj: adj.last().copied().unwrap_or(0.0),
        spectral_gap_adj: gap(&adj),
        spectral_gap_lap: gap(&lap),
        algebraic_connectivity: if n >= 2 { lap[1] } else { 0.0 },
        adjacency_eigenvalues: adj,
        laplacian_eigenvalues: lap,
    }
}

/// Consensus stability bound tau_max = pi / (2 lambda_max).
// The negated comparison is deliberate: it rejects NaN too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn max_stable_delay(lambda_max: f64) -> Result<StabilityBound> {
    if !(lambda_max > 0.0) {
        return Err(Error::Domain(format!(
            "stability bound needs lambda_max > 0, got {lambda_max}"
        )));
    }
    Ok(StabilityBound {
        tau_max: std::f64::consts::PI / (2.0 * lambda_max),
    })
}

/// Spectral radius by shifted power iteration; an independent cross-check
/// for the dense route. The +1 shift keeps the dominant eigenvalue strictly
/// dominant on bipartite graphs (where lambda_min = -lambda_max). The
/// Rayleigh quotient is returned once it stabilizes within `tol`.
pub fn lambda_max_power_iteration(g: &Graph, tol: f64, max_iters: usize) -> f64 {
    let n = g.node_count();
    if n == 0 || g.edge_count() == 0 {
        return 0.0;
    }
    const SHIFT: f64 = 1.0;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0f64; n];
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..max_iters {
        for yi in y.iter_mut() {
            *yi = 0.0;
        }
        for e in g.edges() {
            y[e.u.index()] += x[e.v.index()];
            y[e.v.index()] += x[e.u.index()];
        }
        for i in 0..n {
            y[i] += SHIFT * x[i];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for yi in y.iter_mut() {
            *yi /= norm;
        }
        // Rayleigh quotient of A itself (shift subtracted back out).
        let mut rayleigh = 0.0;
        for e in g.edges() {
            rayleigh += 2.0 * y[e.u.index()] * y[e.v.index()];
        }
        if (rayleigh - prev).abs() < tol {
            return rayleigh;
        }
        prev = rayleigh;
        std::mem::swap(&mut x, &mut y);
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star(leaves: usize) -> Graph {
        let pairs: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_pairs(leaves + 1, &pairs).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        Graph::from_pairs(n, &pairs).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_pairs(n, &pairs).unwrap()
    }

    #[test]
    fn star_spectral_radius_is_sqrt_degree() {
        let s = adjacency_spectrum(&star(4));
        assert!((s.last().unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn c4_adjacency_spectrum() {
        let s = adjacency_spectrum(&cycle(4));
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (got, want) in s.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{s:?}");
        }
    }

    #[test]
    fn p2_laplacian_spectrum() {
        let g = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        let s = laplacian_spectrum(&g);
        assert!((s[0]).abs() < 1e-8);
        assert!((s[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn isolated_pair_has_zero_algebraic_connectivity() {
        let g = Graph::from_pairs(2, &[]).unwrap();
        let s = laplacian_spectrum(&g);
        assert!(s[0].abs() < 1e-8 && s[1].abs() < 1e-8);
        assert!(spectral_summary(&g).algebraic_connectivity.abs() < 1e-8);
    }

    #[test]
    fn k4_laplacian_spectrum() {
        let s = laplacian_spectrum(&complete(4));
        let expected = [0.0, 4.0, 4.0, 4.0];
        for (got, want) in s.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{s:?}");
        }
        assert!((spectral_summary(&complete(4)).algebraic_connectivity - 4.0).abs() < 1e-8);
    }

    #[test]
    fn star_summary_values() {
        let summary = spectral_summary(&star(4));
        assert!((summary.lambda_max_adj - 2.0).abs() < 1e-8);
        assert!((summary.algebraic_connectivity - 1.0).abs() < 1e-8);
    }

    #[test]
    fn petersen_graph_known_spectrum() {
        // 3-regular strongly regular graph: eigenvalues 3, 1 (x5), -2 (x4).
        let pairs = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (0, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 7),
            (7, 9),
            (9, 6),
            (6, 8),
            (8, 5),
        ];
        let g = Graph::from_pairs(10, &pairs).unwrap();
        let s = adjacency_spectrum(&g);
        let expected = [-2.0, -2.0, -2.0, -2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0];
        for (got, want) in s.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{s:?}");
        }
    }

    #[test]
    fn trace_identities() {
        let g =
            crate::topology::build_topology(crate::TopologyKind::ErdosRenyi, 40, 60, 9).unwrap();
        let adj_sum: f64 = adjacency_spectrum(&g).iter().sum();
        let lap_sum: f64 = laplacian_spectrum(&g).iter().sum();
        assert!(adj_sum.abs() < 1e-6);
        assert!((lap_sum - 2.0 * 60.0).abs() < 1e-6 * 60.0);
    }

    #[test]
    fn stability_bound_formula() {
        let b = max_stable_delay(2.0).unwrap();
        assert!((b.tau_max - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((max_stable_delay(7.9426).unwrap().tau_max - 0.1978).abs() < 5e-5);
        assert!((max_stable_delay(3.3473).unwrap().tau_max - 0.4693).abs() < 5e-5);
        assert!(max_stable_delay(0.0).is_err());
        assert!(max_stable_delay(-1.0).is_err());
    }

    #[test]
    fn stability_bound_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for lam in [0.5, 1.0, 2.0, 3.3473, 5.1077, 7.9426] {
            let tau = max_stable_delay(lam).unwrap().tau_max;
            assert!(tau < prev);
            prev = tau;
        }
    }

    #[test]
    fn disjoint_union_spectrum_is_multiset_union() {
        // K_{1,5} on nodes 0..6 and K_{1,3} on nodes 6..10, no cross edges.
        let mut pairs: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
        pairs.extend((7..=9).map(|i| (6, i)));
        let g = Graph::from_pairs(10, &pairs).unwrap();
        let whole = adjacency_spectrum(&g);

        let mut parts = adjacency_spectrum(&star(5));
        parts.extend(adjacency_spectrum(&star(3)));
        parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in whole.iter().zip(parts) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn sparse_graph_with_many_isolates_stays_finite() {
        // Sparse residual graphs (few stars plus stray edges, dozens of
        // isolated nodes) are exactly the shape node-removal selection
        // evaluates; every eigenvalue must come out finite and match the
        // independent power-iteration route.
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for hub in [0usize, 1, 2, 3] {
            for leaf in 0..9 {
                pairs.push((hub, 40 + hub * 9 + leaf));
            }
        }
        pairs.extend([(9, 76), (12, 89), (13, 43), (14, 22), (51, 65)]);
        let g = Graph::from_pairs(93, &pairs).unwrap();
        let s = adjacency_spectrum(&g);
        assert_eq!(s.len(), 93);
        assert!(s.iter().all(|v| v.is_finite()));
        let dense = s.last().unwrap();
        let pi = lambda_max_power_iteration(&g, 1e-13, 100_000);
        assert!((dense - pi).abs() < 1e-7, "{dense} vs {pi}");
    }

    #[test]
    fn power_iteration_matches_dense_route() {
        for (g, name) in [
            (star(4), "star"),
            (complete(6), "k6"),
            (cycle(7), "c7"),
            (cycle(8), "c8-bipartite"),
        ] {
            let dense = lambda_max_adjacency(&g);
            let pi = lambda_max_power_iteration(&g, 1e-13, 50_000);
            assert!((dense - pi).abs() < 1e-7, "{name}: {dense} vs {pi}");
        }
    }
}
