//! Discrete-event Monte Carlo toolkit for gossip broadcast on underwater
//! swarm communication graphs.
//!
//! The crate measures the knowledge horizon (the time for a message started
//! at one node to reach every node) under stochastic per-link delays and
//! link availability, and quantifies the savings obtained by giving fast
//! transceivers to nodes picked by topological selection methods.
//!
//! Pipeline, end to end:
//!
//! 1. [`graph`] / [`topology`] build one of five swarm configurations
//!    (Erdos-Renyi, small-world, cluster, grid, galaxy) normalized to a
//!    common node and edge count.
//! 2. [`spectral`] computes adjacency/Laplacian spectra, connectivity
//!    indicators, and the maximum-delay stability bound pi/(2 lambda_max).
//! 3. [`selection`] picks the k nodes that receive fast transceivers
//!    (degree, betweenness, spectral-radius reduction, or random).
//! 4. [`delay`] turns a scenario configuration plus an allocation plan into
//!    per-directed-link stochastic delay models.
//! 5. [`broadcast`] runs the gossip protocol as a discrete-event simulation
//!    and aggregates Monte Carlo statistics.
//! 6. [`experiment`] orchestrates the full topology x method grid and emits
//!    CSV/JSON reports with the saving-percentage convention.

pub mod broadcast;
pub mod delay;
mod error;
pub mod experiment;
pub mod graph;
pub mod rng;
pub mod selection;
pub mod spectral;
pub mod topology;

pub use broadcast::{
    monte_carlo, run_broadcast, BroadcastOutcome, ContactRecord, MonteCarloResult,
};
pub use delay::{LinkModel, LinkTable, Scenario, ScenarioConfig};
pub use error::{Error, Result};
pub use graph::{Graph, GraphStats, NodeId};
pub use selection::{AllocationPlan, SelectionMethod};
pub use spectral::{SpectrumSummary, StabilityBound};
pub use topology::TopologyKind;
