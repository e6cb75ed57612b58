//! Discrete-event simulation of the gossip broadcast protocol.
//!
//! Protocol semantics. One source node starts with the message. A node that
//! receives the message for the first time at local time `t` starts contact
//! passes over its neighbors:
//!
//! - within a pass it attempts every neighbor in ascending label order (the
//!   numeration priority rule);
//! - an attempt samples the link: an off link consumes zero transmitter
//!   time; an on link occupies the transmitter for the sampled contact
//!   delay and delivers at the occupancy end;
//! - after a pass the transmitter waits `inter_pass_gap_s` and re-attempts
//!   only the neighbors it has not itself successfully transmitted to yet,
//!   up to `max_passes` passes;
//! - nodes know nothing beyond their own neighbor list: transmissions to
//!   already-informed neighbors (including the one the message arrived
//!   from) happen anyway, and the duplicate delivery is simply ignored by
//!   the receiver.
//!
//! Keeping the contact schedule independent of who informed the node is
//! what makes speedups provably safe: under a shared seed, scaling any
//! transmitter's delays by alpha < 1 scales its schedule offsets without
//! reordering the attempt structure, so every delivery happens no later
//! than in the unscaled run.
//!
//! The knowledge horizon of a run is the time the last node is first
//! informed. Runs that fail to reach every node within the pass budget are
//! flagged, not errors.
//!
//! Randomness is keyed per contact attempt `(run_seed, from, to, pass)`, so
//! two runs that share a seed but differ in allocation plans draw identical
//! per-attempt samples; the plan only scales them. This common-random-
//! numbers coupling is what makes baseline/optimized comparisons tight.
//!
//! Same-instant delivery ties break on `(receiver, sender)` labels, keeping
//! runs deterministic even with degenerate delay configurations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::delay::{sample_contact, LinkTable, ScenarioConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{derive_seed, stream_rng};

/// Domain separation tags for derived rng streams.
const TAG_ATTEMPT: u64 = 0x41;
const TAG_RUN: u64 = 0x52;

/// One attempted contact, as recorded in the optional log. For successful
/// attempts `time_s` is the delivery time; for off links it is the instant
/// the transmitter skipped the neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactRecord {
    pub time_s: f64,
    pub from: NodeId,
    pub to: NodeId,
    pub success: bool,
}

/// Result of one broadcast run.
#[derive(Debug, Clone)]
pub struct BroadcastOutcome {
    /// First-reception time per node; `None` if never informed. The source
    /// holds 0.
    pub first_reception_s: Vec<Option<f64>>,
    /// Max first-reception time over informed nodes.
    pub knowledge_horizon_s: f64,
    pub informed_count: usize,
    pub contact_log: Option<Vec<ContactRecord>>,
}

impl BroadcastOutcome {
    pub fn full_coverage(&self) -> bool {
        self.informed_count == self.first_reception_s.len()
    }
}

/// Monte Carlo aggregate over completed-coverage runs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MonteCarloResult {
    pub mean_delay_s: f64,
    /// Unbiased sample variance (0 when fewer than two covered runs).
    pub variance_s2: f64,
    /// Total runs attempted.
    pub runs: usize,
    pub coverage_failures: usize,
}

#[derive(Debug, Clone, Copy)]
struct Delivery {
    time: f64,
    from: NodeId,
    to: NodeId,
}

impl PartialEq for Delivery {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Delivery {}
impl PartialOrd for Delivery {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Delivery {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.to.cmp(&other.to))
            .then(self.from.cmp(&other.from))
    }
}

/// Simulate the transmitter schedule of `node`, informed at `t0`, pushing
/// one delivery per successful contact.
fn schedule_transmissions(
    links: &LinkTable,
    cfg: &ScenarioConfig,
    node: NodeId,
    t0: f64,
    run_seed: u64,
    heap: &mut BinaryHeap<std::cmp::Reverse<Delivery>>,
    log: &mut Option<Vec<ContactRecord>>,
) {
    let mut pending: Vec<NodeId> = links.outgoing(node).iter().map(|(rx, _)| *rx).collect();
    let mut local = t0;
    for pass in 0..cfg.max_passes {
        if pending.is_empty() {
            break;
        }
        if pass > 0 {
            local += cfg.inter_pass_gap_s;
        }
        let mut still_pending = Vec::new();
        for &rx in &pending {
            let link = links.get(node, rx).expect("link table covers all edges");
            let mut rng = stream_rng(&[
                TAG_ATTEMPT,
                run_seed,
                node.0 as u64,
                rx.0 as u64,
                pass as u64,
            ]);
            let contact = sample_contact(link, cfg, &mut rng);
            match contact.delay_s {
                Some(delay) => {
                    local += delay;
                    heap.push(std::cmp::Reverse(Delivery {
                        time: local,
                        from: node,
                        to: rx,
                    }));
                    if let Some(records) = log {
                        records.push(ContactRecord {
                            time_s: local,
                            from: node,
                            to: rx,
                            success: true,
                        });
                    }
                }
                None => {
                    if let Some(records) = log {
                        records.push(ContactRecord {
                            time_s: local,
                            from: node,
                            to: rx,
                            success: false,
                        });
                    }
                    still_pending.push(rx);
                }
            }
        }
        pending = still_pending;
    }
}

fn run_broadcast_inner(
    g: &Graph,
    links: &LinkTable,
    cfg: &ScenarioConfig,
    source: NodeId,
    run_seed: u64,
    capture_log: bool,
) -> Result<BroadcastOutcome> {
    let n = g.node_count();
    if source.index() >= n {
        return Err(Error::Parameter(format!(
            "source {source} out of range for {n} nodes"
        )));
    }
    if links.node_count() != n {
        return Err(Error::Parameter(
            "link table does not match the graph".into(),
        ));
    }
    let mut first_reception: Vec<Option<f64>> = vec![None; n];
    let mut heap: BinaryHeap<std::cmp::Reverse<Delivery>> = BinaryHeap::new();
    let mut log = if capture_log { Some(Vec::new()) } else { None };

    first_reception[source.index()] = Some(0.0);
    schedule_transmissions(links, cfg, source, 0.0, run_seed, &mut heap, &mut log);

    let mut informed_count = 1usize;
    while let Some(std::cmp::Reverse(delivery)) = heap.pop() {
        let slot = &mut first_reception[delivery.to.index()];
        if slot.is_none() {
            *slot = Some(delivery.time);
            informed_count += 1;
            schedule_transmissions(
                links,
                cfg,
                delivery.to,
                delivery.time,
                run_seed,
                &mut heap,
                &mut log,
            );
        }
    }

    let knowledge_horizon_s = first_reception
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &t| acc.max(t));
    if let Some(records) = &mut log {
        records.sort_by(|a, b| {
            a.time_s
                .total_cmp(&b.time_s)
                .then(a.from.cmp(&b.from))
                .then(a.to.cmp(&b.to))
        });
    }
    Ok(BroadcastOutcome {
        first_reception_s: first_reception,
        knowledge_horizon_s,
        informed_count,
        contact_log: log,
    })
}

/// One broadcast run; see module docs for the event semantics.
pub fn run_broadcast(
    g: &Graph,
    links: &LinkTable,
    cfg: &ScenarioConfig,
    source: NodeId,
    run_seed: u64,
) -> Result<BroadcastOutcome> {
    run_broadcast_inner(g, links, cfg, source, run_seed, false)
}

/// Same as [`run_broadcast`] but retains the full contact log, sorted by
/// time.
pub fn run_broadcast_logged(
    g: &Graph,
    links: &LinkTable,
    cfg: &ScenarioConfig,
    source: NodeId,
    run_seed: u64,
) -> Result<BroadcastOutcome> {
    run_broadcast_inner(g, links, cfg, source, run_seed, true)
}

/// Seed of run `run_index` under `master_seed`.
pub fn run_seed_for(master_seed: u64, run_index: usize) -> u64 {
    derive_seed(&[TAG_RUN, master_seed, run_index as u64])
}

/// Per-run knowledge horizons for `n_runs` independent runs; `None` marks a
/// run that failed to cover every node.
pub fn monte_carlo_samples(
    g: &Graph,
    links: &LinkTable,
    cfg: &ScenarioConfig,
    source: NodeId,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<Option<f64>>> {
    if n_runs == 0 {
        return Err(Error::Parameter("need at least one run".into()));
    }
    (0..n_runs)
        .into_par_iter()
        .map(|run| {
            let outcome = run_broadcast(g, links, cfg, source, run_seed_for(master_seed, run))?;
            Ok(if outcome.full_coverage() {
                Some(outcome.knowledge_horizon_s)
            } else {
                None
            })
        })
        .collect()
}

/// Aggregate per-run knowledge horizons into mean and unbiased variance
/// over the covered runs.
pub fn summarize_samples(samples: &[Option<f64>]) -> Result<MonteCarloResult> {
    let covered: Vec<f64> = samples.iter().flatten().copied().collect();
    let failures = samples.len() - covered.len();
    if covered.is_empty() {
        return Err(Error::Aggregation(format!(
            "all {} runs failed to reach full coverage",
            samples.len()
        )));
    }
    let k = covered.len() as f64;
    let mean = covered.iter().sum::<f64>() / k;
    let variance = if covered.len() >= 2 {
        covered.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloResult {
        mean_delay_s: mean,
        variance_s2: variance,
        runs: samples.len(),
        coverage_failures: failures,
    })
}

/// Monte Carlo estimate of the knowledge horizon over `n_runs` runs with
/// seeds derived from `(master_seed, run_index)`.
pub fn monte_carlo(
    g: &Graph,
    links: &LinkTable,
    cfg: &ScenarioConfig,
    source: NodeId,
    n_runs: usize,
    master_seed: u64,
) -> Result<MonteCarloResult> {
    summarize_samples(&monte_carlo_samples(
        g,
        links,
        cfg,
        source,
        n_runs,
        master_seed,
    )?)
}

/// Lu-condition diagnostic: do the successful contacts, taken as a directed
/// time-respecting relation from `source`, reach every node?
pub fn reachability_check(g: &Graph, contact_log: &[ContactRecord], source: NodeId) -> bool {
    let n = g.node_count();
    if source.index() >= n {
        return false;
    }
    let mut reached = vec![false; n];
    reached[source.index()] = true;
    let mut count = 1usize;
    // Chronological fixpoint; repeated scans make the check insensitive to
    // record order among identical timestamps.
    loop {
        let mut grew = false;
        for rec in contact_log {
            if rec.success && reached[rec.from.index()] && !reached[rec.to.index()] {
                reached[rec.to.index()] = true;
                count += 1;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    count == n
}
