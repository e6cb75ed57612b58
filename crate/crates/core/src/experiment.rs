//! Full experiment grid: per-topology baselines, per-method optimized
//! runs, and the saving-percentage report.
//!
//! For each topology one graph instance is built from a seed derived from
//! the master seed, and all Monte Carlo cells of that topology share one
//! link-table seed and one run-seed sequence. Methods therefore face
//! identical stochastic conditions (common random numbers) and differ only
//! in which links they speed up.
//!
//! Percentage convention: within a `(topology, scenario)` group the method
//! with the lowest mean is flagged best and reported against the baseline,
//! `100 * (best - baseline) / baseline` (negative means saving); every
//! other method is reported as relative excess over the best,
//! `100 * (mean - best) / best`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::broadcast::{monte_carlo_samples, summarize_samples, MonteCarloResult};
use crate::delay::{instantiate_links, ScenarioConfig};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng::derive_seed;
use crate::selection::{
    select_by_betweenness, select_by_degree, select_random, select_spectral, AllocationPlan,
    SelectionMethod,
};
use crate::topology::{build_topology, TopologyKind};

const TAG_GRAPH: u64 = 0x47;
const TAG_LINKS: u64 = 0x4c;
const TAG_MC: u64 = 0x4d;
const TAG_RANDOM_SELECT: u64 = 0x52414e44;

/// Grid parameters; defaults match the standard 100-node, 140-edge,
/// ten-transceiver setup.
#[derive(Debug, Clone)]
pub struct ExperimentParams {
    pub topologies: Vec<TopologyKind>,
    pub methods: Vec<SelectionMethod>,
    pub k: usize,
    pub alpha: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub source: NodeId,
}

impl ExperimentParams {
    pub fn standard(master_seed: u64) -> Result<ExperimentParams> {
        Ok(ExperimentParams {
            topologies: TopologyKind::standard_five(100)?,
            methods: SelectionMethod::all_active().to_vec(),
            k: 10,
            alpha: 0.1,
            runs: 1000,
            master_seed,
            nodes: 100,
            edges: 140,
            source: NodeId(0),
        })
    }
}

/// One report line; baseline rows carry `method = "none"`, `is_best =
/// false` and `pct = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub topology: String,
    pub scenario: String,
    pub method: String,
    pub mean_delay_s: f64,
    pub variance_s2: f64,
    pub is_best: bool,
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub master_seed: u64,
    pub k: usize,
    pub alpha: f64,
    pub runs: usize,
    pub source: u32,
    pub nodes: usize,
    pub edges: usize,
    pub graph_seeds: BTreeMap<String, u64>,
    /// Relative difference of the two half-sample means per cell; a value
    /// under 0.02 marks the cell as stable.
    pub half_sample_rel_diff: BTreeMap<String, f64>,
    pub config: ScenarioConfig,
}

/// Per-run knowledge horizons of one grid cell (`None` = coverage failure),
/// kept for plot-data output; not part of the JSON report.
#[derive(Debug, Clone)]
pub struct CellSamples {
    pub topology: String,
    pub scenario: String,
    pub method: String,
    pub samples: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub baselines: BTreeMap<String, MonteCarloResult>,
    pub metadata: ReportMetadata,
    #[serde(skip)]
    pub kh_samples: Vec<CellSamples>,
}

/// Saving percentages for one `(topology, scenario)` group; see module docs
/// for the convention. Mean ties resolve to the alphabetically first
/// method name.
// Negated comparisons are deliberate: they reject NaN means too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn compute_savings(
    baseline_mean: f64,
    method_means: &[(SelectionMethod, f64)],
) -> Result<Vec<(SelectionMethod, f64, bool)>> {
    if method_means.is_empty() {
        return Err(Error::Parameter("no method means given".into()));
    }
    if !(baseline_mean > 0.0) || method_means.iter().any(|(_, m)| !(*m > 0.0)) {
        return Err(Error::Parameter(
            "saving percentages need positive means".into(),
        ));
    }
    let (best_method, best_mean) = method_means
        .iter()
        .min_by(|(ma, a), (mb, b)| {
            a.partial_cmp(b)
                .unwrap()
                .then_with(|| ma.name().cmp(mb.name()))
        })
        .copied()
        .unwrap();
    Ok(method_means
        .iter()
        .map(|&(method, mean)| {
            if method == best_method {
                (
                    method,
                    100.0 * (best_mean - baseline_mean) / baseline_mean,
                    true,
                )
            } else {
                (method, 100.0 * (mean - best_mean) / best_mean, false)
            }
        })
        .collect())
}

fn topology_tag(kind: TopologyKind) -> u64 {
    kind.name()
        .bytes()
        .fold(0u64, |acc, b| acc.wrapping_mul(131).wrapping_add(b as u64))
}

fn select_plan(
    method: SelectionMethod,
    g: &crate::graph::Graph,
    k: usize,
    alpha: f64,
    seed: u64,
) -> Result<AllocationPlan> {
    let plan = match method {
        SelectionMethod::Degree => select_by_degree(g, k)?,
        SelectionMethod::Betweenness => select_by_betweenness(g, k)?,
        SelectionMethod::Spectral => select_spectral(g, k)?,
        SelectionMethod::Random => select_random(g, k, seed)?,
        SelectionMethod::None => return Ok(AllocationPlan::none()),
    };
    plan.with_speedup(alpha)
}

fn half_sample_rel_diff(samples: &[Option<f64>]) -> f64 {
    let covered: Vec<f64> = samples.iter().flatten().copied().collect();
    if covered.len() < 2 {
        return 0.0;
    }
    let mut halves = [Vec::new(), Vec::new()];
    for (i, &x) in covered.iter().enumerate() {
        halves[i % 2].push(x);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let overall = mean(&covered);
    (mean(&halves[0]) - mean(&halves[1])).abs() / overall
}

/// Run the whole grid for one scenario configuration.
pub fn run_experiment(cfg: &ScenarioConfig, params: &ExperimentParams) -> Result<ExperimentReport> {
    cfg.validate()?;
    if params.topologies.is_empty() {
        return Err(Error::Parameter("no topologies requested".into()));
    }
    if params.runs == 0 {
        return Err(Error::Parameter("need at least one run".into()));
    }
    let methods: Vec<SelectionMethod> = params
        .methods
        .iter()
        .copied()
        .filter(|m| *m != SelectionMethod::None)
        .collect();
    if methods.is_empty() {
        return Err(Error::Parameter(
            "methods must include at least one active method".into(),
        ));
    }

    let scenario = cfg.scenario.name().to_string();
    let mut rows = Vec::new();
    let mut baselines = BTreeMap::new();
    let mut graph_seeds = BTreeMap::new();
    let mut stability = BTreeMap::new();
    let mut kh_samples = Vec::new();

    for &kind in &params.topologies {
        let topo = kind.name().to_string();
        let tag = topology_tag(kind);
        let graph_seed = derive_seed(&[TAG_GRAPH, params.master_seed, tag]);
        let link_seed = derive_seed(&[TAG_LINKS, params.master_seed, tag]);
        let mc_seed = derive_seed(&[TAG_MC, params.master_seed, tag]);
        graph_seeds.insert(topo.clone(), graph_seed);
        let annotate =
            |e: Error, what: &str| Error::Aggregation(format!("{topo}/{scenario}/{what}: {e}"));

        let g = build_topology(kind, params.nodes, params.edges, graph_seed)
            .map_err(|e| annotate(e, "build"))?;

        let cell = |plan: &AllocationPlan,
                    method_name: &str|
         -> Result<(MonteCarloResult, Vec<Option<f64>>)> {
            let links = instantiate_links(&g, cfg, plan, link_seed)
                .map_err(|e| annotate(e, method_name))?;
            let samples = monte_carlo_samples(&g, &links, cfg, params.source, params.runs, mc_seed)
                .map_err(|e| annotate(e, method_name))?;
            let result = summarize_samples(&samples).map_err(|e| annotate(e, method_name))?;
            Ok((result, samples))
        };

        let (baseline, base_samples) = cell(&AllocationPlan::none(), "baseline")?;
        stability.insert(format!("{topo}/none"), half_sample_rel_diff(&base_samples));
        kh_samples.push(CellSamples {
            topology: topo.clone(),
            scenario: scenario.clone(),
            method: "none".into(),
            samples: base_samples,
        });
        rows.push(ReportRow {
            topology: topo.clone(),
            scenario: scenario.clone(),
            method: "none".into(),
            mean_delay_s: baseline.mean_delay_s,
            variance_s2: baseline.variance_s2,
            is_best: false,
            pct: 0.0,
        });

        let mut method_results = Vec::new();
        for &method in &methods {
            let method_tag = method
                .name()
                .bytes()
                .fold(0u64, |acc, b| acc.wrapping_mul(131).wrapping_add(b as u64));
            let select_seed =
                derive_seed(&[TAG_RANDOM_SELECT, params.master_seed, tag, method_tag]);
            let plan = select_plan(method, &g, params.k, params.alpha, select_seed)
                .map_err(|e| annotate(e, method.name()))?;
            let (result, samples) = cell(&plan, method.name())?;
            stability.insert(
                format!("{topo}/{}", method.name()),
                half_sample_rel_diff(&samples),
            );
            kh_samples.push(CellSamples {
                topology: topo.clone(),
                scenario: scenario.clone(),
                method: method.name().into(),
                samples,
            });
            method_results.push((method, result));
        }

        let means: Vec<(SelectionMethod, f64)> = method_results
            .iter()
            .map(|(m, r)| (*m, r.mean_delay_s))
            .collect();
        let savings = compute_savings(baseline.mean_delay_s, &means)?;
        for ((method, result), (_, pct, is_best)) in method_results.iter().zip(savings) {
            rows.push(ReportRow {
                topology: topo.clone(),
                scenario: scenario.clone(),
                method: method.name().into(),
                mean_delay_s: result.mean_delay_s,
                variance_s2: result.variance_s2,
                is_best,
                pct,
            });
        }
        baselines.insert(topo, baseline);
    }

    Ok(ExperimentReport {
        rows,
        baselines,
        metadata: ReportMetadata {
            master_seed: params.master_seed,
            k: params.k,
            alpha: params.alpha,
            runs: params.runs,
            source: params.source.0,
            nodes: params.nodes,
            edges: params.edges,
            graph_seeds,
            half_sample_rel_diff: stability,
            config: cfg.clone(),
        },
        kh_samples,
    })
}

/// CSV form of the report (one row per grid cell, baselines included).
pub fn write_csv<W: Write>(report: &ExperimentReport, mut sink: W) -> Result<()> {
    writeln!(
        sink,
        "topology,scenario,method,mean_delay_s,variance_s2,is_best,pct"
    )?;
    for r in &report.rows {
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            r.topology, r.scenario, r.method, r.mean_delay_s, r.variance_s2, r.is_best, r.pct
        )?;
    }
    Ok(())
}

/// JSON mirror of the report (rows, baselines, metadata).
pub fn write_json<W: Write>(report: &ExperimentReport, mut sink: W) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Aggregation(format!("report serialization failed: {e}")))?;
    sink.write_all(text.as_bytes())?;
    writeln!(sink)?;
    Ok(())
}

/// Per-run knowledge-horizon samples as plot data, one row per run per
/// cell; failed-coverage runs emit an empty `kh_s` field.
pub fn write_plot_data<W: Write>(report: &ExperimentReport, mut sink: W) -> Result<()> {
    writeln!(sink, "topology,scenario,method,run_index,kh_s")?;
    for cell in &report.kh_samples {
        for (run, sample) in cell.samples.iter().enumerate() {
            match sample {
                Some(kh) => writeln!(
                    sink,
                    "{},{},{},{},{}",
                    cell.topology, cell.scenario, cell.method, run, kh
                )?,
                None => writeln!(
                    sink,
                    "{},{},{},{},",
                    cell.topology, cell.scenario, cell.method, run
                )?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::Scenario;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn savings_convention_reference_row() {
        // Baseline 23.29 with four optimized means; the best (degree) is
        // measured against the baseline, the rest against the best.
        let means = vec![
            (SelectionMethod::Spectral, 15.90),
            (SelectionMethod::Degree, 15.76),
            (SelectionMethod::Betweenness, 16.83),
            (SelectionMethod::Random, 20.10),
        ];
        let savings = compute_savings(23.29, &means).unwrap();
        let get = |m: SelectionMethod| savings.iter().find(|(x, _, _)| *x == m).unwrap();
        let (_, degree_pct, degree_best) = get(SelectionMethod::Degree);
        assert!(*degree_best);
        assert!(approx(*degree_pct, -32.33, 0.05), "{degree_pct}");
        let (_, bc_pct, bc_best) = get(SelectionMethod::Betweenness);
        assert!(!bc_best);
        assert!(approx(*bc_pct, 6.79, 0.05), "{bc_pct}");
        let (_, rnd_pct, _) = get(SelectionMethod::Random);
        assert!(approx(*rnd_pct, 27.54, 0.05), "{rnd_pct}");
        let (_, av_pct, _) = get(SelectionMethod::Spectral);
        assert!(approx(*av_pct, 0.89, 0.05), "{av_pct}");
        assert_eq!(savings.iter().filter(|(_, _, best)| *best).count(), 1);
    }

    #[test]
    fn savings_convention_hub_dominated_row() {
        let means = vec![
            (SelectionMethod::Spectral, 9.28),
            (SelectionMethod::Degree, 3.81),
            (SelectionMethod::Betweenness, 5.00),
            (SelectionMethod::Random, 18.88),
        ];
        let savings = compute_savings(23.32, &means).unwrap();
        let get = |m: SelectionMethod| savings.iter().find(|(x, _, _)| *x == m).unwrap().1;
        assert!(approx(get(SelectionMethod::Degree), -83.66, 0.05));
        assert!(approx(get(SelectionMethod::Spectral), 143.57, 0.05));
        assert!(approx(get(SelectionMethod::Random), 395.54, 0.05));
    }

    #[test]
    fn savings_all_equal_means() {
        let means = vec![
            (SelectionMethod::Degree, 10.0),
            (SelectionMethod::Random, 10.0),
        ];
        let savings = compute_savings(10.0, &means).unwrap();
        for (_, pct, _) in &savings {
            assert_eq!(*pct, 0.0);
        }
        // Alphabetical tie-break: "degree" < "random".
        assert!(
            savings
                .iter()
                .find(|(m, _, _)| *m == SelectionMethod::Degree)
                .unwrap()
                .2
        );
        assert!(
            !savings
                .iter()
                .find(|(m, _, _)| *m == SelectionMethod::Random)
                .unwrap()
                .2
        );
    }

    #[test]
    fn savings_rejects_nonpositive_means() {
        assert!(compute_savings(0.0, &[(SelectionMethod::Degree, 1.0)]).is_err());
        assert!(compute_savings(1.0, &[(SelectionMethod::Degree, -2.0)]).is_err());
        assert!(compute_savings(1.0, &[]).is_err());
    }

    fn small_params(master_seed: u64) -> ExperimentParams {
        ExperimentParams {
            topologies: vec![
                TopologyKind::ErdosRenyi,
                TopologyKind::Galaxy {
                    hubs: 4,
                    leaves_per_hub: 5,
                },
            ],
            methods: vec![SelectionMethod::Degree, SelectionMethod::Random],
            k: 4,
            alpha: 0.1,
            runs: 40,
            master_seed,
            nodes: 24,
            edges: 32,
            source: NodeId(0),
        }
    }

    #[test]
    fn grid_shape_and_best_flags() {
        let cfg = ScenarioConfig::default();
        let report = run_experiment(&cfg, &small_params(5)).unwrap();
        // 2 topologies x (1 baseline + 2 methods).
        assert_eq!(report.rows.len(), 6);
        assert_eq!(report.baselines.len(), 2);
        for topo in ["er", "galaxy"] {
            let group: Vec<_> = report
                .rows
                .iter()
                .filter(|r| r.topology == topo && r.method != "none")
                .collect();
            assert_eq!(group.iter().filter(|r| r.is_best).count(), 1);
            let baseline = &report.baselines[topo];
            for row in &group {
                assert!(
                    row.mean_delay_s < baseline.mean_delay_s,
                    "{topo}/{}: optimized {} vs baseline {}",
                    row.method,
                    row.mean_delay_s,
                    baseline.mean_delay_s
                );
            }
        }
        assert_eq!(report.rows[0].scenario, "I");
    }

    #[test]
    fn single_method_grid() {
        let cfg = ScenarioConfig::default();
        let mut params = small_params(6);
        params.methods = vec![SelectionMethod::Random];
        let report = run_experiment(&cfg, &params).unwrap();
        assert_eq!(report.rows.len(), 4); // (baseline + 1 method) x 2
        for row in report.rows.iter().filter(|r| r.method == "random") {
            assert!(row.is_best);
        }
    }

    #[test]
    fn report_is_deterministic_and_roundtrips() {
        let cfg = ScenarioConfig {
            scenario: Scenario::II,
            ..ScenarioConfig::scenario_ii()
        };
        let a = run_experiment(&cfg, &small_params(7)).unwrap();
        let b = run_experiment(&cfg, &small_params(7)).unwrap();

        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        write_csv(&a, &mut csv_a).unwrap();
        write_csv(&b, &mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);

        let mut json_a = Vec::new();
        let mut json_b = Vec::new();
        write_json(&a, &mut json_a).unwrap();
        write_json(&b, &mut json_b).unwrap();
        assert_eq!(json_a, json_b);

        let parsed: ExperimentReport = serde_json::from_slice(&json_a).unwrap();
        assert_eq!(parsed.rows, a.rows);
        assert_eq!(parsed.baselines, a.baselines);
        assert_eq!(parsed.metadata, a.metadata);
    }

    #[test]
    fn plot_data_has_one_row_per_run_per_cell() {
        let cfg = ScenarioConfig::default();
        let params = small_params(8);
        let report = run_experiment(&cfg, &params).unwrap();
        let mut buf = Vec::new();
        write_plot_data(&report, &mut buf).unwrap();
        let lines = String::from_utf8(buf).unwrap().lines().count();
        // header + 6 cells x 40 runs
        assert_eq!(lines, 1 + 6 * params.runs);
    }

    #[test]
    fn half_sample_stability_is_reported() {
        let cfg = ScenarioConfig::default();
        let report = run_experiment(&cfg, &small_params(9)).unwrap();
        assert_eq!(report.metadata.half_sample_rel_diff.len(), 6);
        for (cell, diff) in &report.metadata.half_sample_rel_diff {
            assert!(diff.is_finite(), "{cell}");
            assert!(*diff >= 0.0);
        }
    }
}
