//! `swarmcast`: generate swarm topologies, analyze their spectra, pick
//! transceiver nodes, and run gossip-broadcast Monte Carlo experiments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use swarmcast_core::broadcast::{
    monte_carlo_samples, run_broadcast_logged, run_seed_for, summarize_samples,
};
use swarmcast_core::delay::instantiate_links;
use swarmcast_core::experiment::{
    run_experiment, write_csv, write_json, write_plot_data, ExperimentParams,
};
use swarmcast_core::graph::{load_graph, save_graph};
use swarmcast_core::selection::{
    select_by_betweenness, select_by_degree, select_random, select_spectral,
};
use swarmcast_core::spectral::{max_stable_delay, spectral_summary};
use swarmcast_core::topology::build_topology;
use swarmcast_core::{
    AllocationPlan, Graph, NodeId, ScenarioConfig, SelectionMethod, TopologyKind,
};

#[derive(Parser)]
#[command(
    name = "swarmcast",
    about = "Gossip-broadcast delay analysis for swarm communication graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a swarm topology as an edge-list file.
    Generate {
        /// Topology kind: er, sw, cluster, grid, galaxy.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 100)]
        nodes: usize,
        #[arg(long, default_value_t = 140)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Override the kind's structural parameters (defaults derive from
        /// the node count): grid rows/cols, galaxy hubs/leaves-per-hub,
        /// cluster rings/ring-size, small-world base degree.
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        hubs: Option<usize>,
        #[arg(long)]
        leaves_per_hub: Option<usize>,
        #[arg(long)]
        rings: Option<usize>,
        #[arg(long)]
        ring_size: Option<usize>,
        #[arg(long)]
        base_degree: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute spectral indicators of a graph.
    Spectra {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select transceiver nodes and write an allocation plan.
    Select {
        #[arg(long)]
        graph: PathBuf,
        /// degree, betweenness, spectral, or random.
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Delay factor applied to links departing from selected nodes.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Seed for the random method.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo broadcast simulation on one graph.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        /// Scenario configuration file (key=value); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Allocation plan JSON; baseline when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        source: u32,
        #[arg(long)]
        out: PathBuf,
        /// Write the contact log of the first run as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run the full topology x method grid and emit the savings report.
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        /// "all" or a comma-separated subset of er,sw,cluster,grid,galaxy.
        #[arg(long, default_value = "all")]
        topologies: String,
        /// "all" or a comma-separated subset of
        /// degree,betweenness,spectral,random.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        nodes: usize,
        #[arg(long, default_value_t = 140)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        source: u32,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON mirror.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Optional per-run knowledge-horizon samples CSV.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            kind,
            nodes,
            edges,
            seed,
            rows,
            cols,
            hubs,
            leaves_per_hub,
            rings,
            ring_size,
            base_degree,
            out,
        } => {
            let kind = resolve_kind(
                &kind,
                nodes,
                rows,
                cols,
                hubs,
                leaves_per_hub,
                rings,
                ring_size,
                base_degree,
            )?;
            let g = build_topology(kind, nodes, edges, seed)?;
            let mut sink = BufWriter::new(create(&out)?);
            save_graph(&g, &mut sink)?;
            sink.flush()?;
            let stats = g.stats();
            eprintln!(
                "wrote {} ({} nodes, {} edges, connected={})",
                out.display(),
                stats.n,
                stats.m,
                stats.is_connected
            );
            Ok(())
        }
        Command::Spectra { graph, out } => {
            let g = read_graph(&graph)?;
            let summary = spectral_summary(&g);
            let tau_max = max_stable_delay(summary.lambda_max_adj)
                .ok()
                .map(|b| b.tau_max);
            let payload = serde_json::json!({
                "lambda_max_adj": summary.lambda_max_adj,
                "spectral_gap_adj": summary.spectral_gap_adj,
                "spectral_gap_lap": summary.spectral_gap_lap,
                "algebraic_connectivity": summary.algebraic_connectivity,
                "tau_max": tau_max,
            });
            write_pretty_json(&out, &payload)
        }
        Command::Select {
            graph,
            method,
            k,
            alpha,
            seed,
            out,
        } => {
            let g = read_graph(&graph)?;
            let plan = match SelectionMethod::parse(&method)? {
                SelectionMethod::Degree => select_by_degree(&g, k)?,
                SelectionMethod::Betweenness => select_by_betweenness(&g, k)?,
                SelectionMethod::Spectral => select_spectral(&g, k)?,
                SelectionMethod::Random => select_random(&g, k, seed)?,
                SelectionMethod::None => bail!("select needs an active method"),
            }
            .with_speedup(alpha)?;
            write_pretty_json(&out, &serde_json::to_value(&plan)?)
        }
        Command::Simulate {
            graph,
            config,
            plan,
            runs,
            seed,
            source,
            out,
            log,
        } => {
            let g = read_graph(&graph)?;
            let cfg = read_config(config.as_deref())?;
            let plan = match plan {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading plan {}", path.display()))?;
                    let plan: AllocationPlan = serde_json::from_str(&text)
                        .with_context(|| format!("parsing plan {}", path.display()))?;
                    plan.validate(&g)?;
                    plan
                }
                None => AllocationPlan::none(),
            };
            let source = NodeId(source);
            let links = instantiate_links(&g, &cfg, &plan, seed)?;
            let samples = monte_carlo_samples(&g, &links, &cfg, source, runs, seed)?;
            let result = summarize_samples(&samples)?;
            if let Some(log_path) = log {
                let first = run_broadcast_logged(&g, &links, &cfg, source, run_seed_for(seed, 0))?;
                let mut sink = BufWriter::new(create(&log_path)?);
                writeln!(sink, "time_s,from,to,success")?;
                for rec in first.contact_log.as_deref().unwrap_or_default() {
                    writeln!(
                        sink,
                        "{},{},{},{}",
                        rec.time_s, rec.from, rec.to, rec.success
                    )?;
                }
                sink.flush()?;
            }
            write_pretty_json(&out, &serde_json::to_value(&result)?)
        }
        Command::Report {
            config,
            topologies,
            methods,
            k,
            alpha,
            runs,
            seed,
            nodes,
            edges,
            source,
            out,
            json,
            plot_data,
        } => {
            let cfg = read_config(config.as_deref())?;
            let params = ExperimentParams {
                topologies: parse_topologies(&topologies, nodes)?,
                methods: parse_methods(&methods)?,
                k,
                alpha,
                runs,
                master_seed: seed,
                nodes,
                edges,
                source: NodeId(source),
            };
            let report = run_experiment(&cfg, &params)?;
            let mut sink = BufWriter::new(create(&out)?);
            write_csv(&report, &mut sink)?;
            sink.flush()?;
            if let Some(path) = json {
                let mut sink = BufWriter::new(create(&path)?);
                write_json(&report, &mut sink)?;
                sink.flush()?;
            }
            if let Some(path) = plot_data {
                let mut sink = BufWriter::new(create(&path)?);
                write_plot_data(&report, &mut sink)?;
                sink.flush()?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn resolve_kind(
    name: &str,
    nodes: usize,
    rows: Option<usize>,
    cols: Option<usize>,
    hubs: Option<usize>,
    leaves_per_hub: Option<usize>,
    rings: Option<usize>,
    ring_size: Option<usize>,
    base_degree: Option<usize>,
) -> Result<TopologyKind> {
    let default = TopologyKind::default_for(name, nodes)?;
    Ok(match default {
        TopologyKind::ErdosRenyi => TopologyKind::ErdosRenyi,
        TopologyKind::SmallWorld {
            base_degree: default_degree,
        } => TopologyKind::SmallWorld {
            base_degree: base_degree.unwrap_or(default_degree),
        },
        TopologyKind::Grid { rows: dr, cols: dc } => {
            let rows = rows.unwrap_or(dr);
            TopologyKind::Grid {
                rows,
                cols: cols.unwrap_or_else(|| {
                    if nodes.is_multiple_of(rows) {
                        nodes / rows
                    } else {
                        dc
                    }
                }),
            }
        }
        TopologyKind::Cluster {
            rings: drr,
            ring_size: drs,
        } => {
            let rings = rings.unwrap_or(drr);
            TopologyKind::Cluster {
                rings,
                ring_size: ring_size.unwrap_or_else(|| {
                    if nodes.is_multiple_of(rings) {
                        nodes / rings
                    } else {
                        drs
                    }
                }),
            }
        }
        TopologyKind::Galaxy {
            hubs: dh,
            leaves_per_hub: dl,
        } => {
            let hubs = hubs.unwrap_or(dh);
            TopologyKind::Galaxy {
                hubs,
                leaves_per_hub: leaves_per_hub.unwrap_or_else(|| {
                    if hubs > 0 && nodes.is_multiple_of(hubs) {
                        nodes / hubs - 1
                    } else {
                        dl
                    }
                }),
            }
        }
    })
}

fn parse_topologies(spec: &str, nodes: usize) -> Result<Vec<TopologyKind>> {
    if spec == "all" {
        return Ok(TopologyKind::standard_five(nodes)?);
    }
    spec.split(',')
        .map(|name| Ok(TopologyKind::default_for(name.trim(), nodes)?))
        .collect()
}

fn parse_methods(spec: &str) -> Result<Vec<SelectionMethod>> {
    if spec == "all" {
        return Ok(SelectionMethod::all_active().to_vec());
    }
    spec.split(',')
        .map(|name| Ok(SelectionMethod::parse(name.trim())?))
        .collect()
}

fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening graph {}", path.display()))?;
    load_graph(file).with_context(|| format!("parsing graph {}", path.display()))
}

fn read_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            Ok(ScenarioConfig::parse(&text)
                .with_context(|| format!("parsing config {}", p.display()))?)
        }
        None => Ok(ScenarioConfig::default()),
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn write_pretty_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut sink = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut sink, value)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}
