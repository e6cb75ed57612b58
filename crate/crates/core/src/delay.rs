//! Stochastic per-contact delays and link availability.
//!
//! Two scenarios are modeled. Scenario I draws every MAC delay from one
//! shared uniform distribution and keeps inter-vehicle distances fixed.
//! Scenario II gives each directed link its own positive-support
//! (truncated) Gaussian delay, with parameters drawn once per link at
//! instantiation, and redraws the inter-vehicle distance per contact
//! attempt within a configured range. In both scenarios a link is only
//! available with probability `p_on` at each attempt, and the full contact
//! delay of an available link is
//!
//! ```text
//! delay = alpha_out * (mac_delay + distance / sound_speed)
//! ```
//!
//! where `alpha_out < 1` only on links departing from a node that holds a
//! fast transceiver. Message transmission time is folded into the MAC
//! delay and is not priced separately; `message_bits` is recorded for
//! bookkeeping only.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::stream_rng;
use crate::selection::AllocationPlan;

/// Delay scenario selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    I,
    II,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::I => "I",
            Scenario::II => "II",
        }
    }
}

/// Full delay-model configuration; see module docs for semantics.
///
/// Parsed from a flat `key=value` text file ([`ScenarioConfig::parse`]).
/// All keys are optional and default to a seconds-scale worst-case setup;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Scenario I shared MAC delay bounds (s). `lo == hi` degenerates to a
    /// deterministic delay, which the tests rely on.
    pub uniform_lo: f64,
    pub uniform_hi: f64,
    /// Scenario II per-link mean range (s).
    pub mu_lo: f64,
    pub mu_hi: f64,
    /// Scenario II per-link standard-deviation range (s).
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    /// Probability that a link is on at a given contact attempt.
    pub p_on: f64,
    /// Scenario I inter-vehicle distance (m).
    pub distance_fixed_m: f64,
    /// Scenario II per-attempt distance range (m).
    pub distance_lo_m: f64,
    pub distance_hi_m: f64,
    pub sound_speed_mps: f64,
    /// Warning-message length; folded into the MAC delay, recorded only.
    pub message_bits: u64,
    /// Pause between retry passes of the gossip transmitter (s).
    pub inter_pass_gap_s: f64,
    /// Retry-pass bound per transmitter.
    pub max_passes: u32,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: Scenario::I,
            uniform_lo: 0.5,
            uniform_hi: 3.5,
            mu_lo: 1.0,
            mu_hi: 3.0,
            sigma_lo: 0.3,
            sigma_hi: 1.0,
            p_on: 0.9,
            distance_fixed_m: 150.0,
            distance_lo_m: 150.0,
            distance_hi_m: 200.0,
            sound_speed_mps: 1500.0,
            message_bits: 256 * 8,
            inter_pass_gap_s: 1.0,
            max_passes: 50,
        }
    }
}

impl ScenarioConfig {
    pub fn scenario_ii() -> Self {
        ScenarioConfig {
            scenario: Scenario::II,
            ..ScenarioConfig::default()
        }
    }

    // Negated comparisons are deliberate: they reject NaN inputs too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        if !(self.uniform_lo > 0.0 && self.uniform_lo <= self.uniform_hi) {
            return err(format!(
                "need 0 < uniform_lo <= uniform_hi, got [{}, {}]",
                self.uniform_lo, self.uniform_hi
            ));
        }
        if !(self.mu_lo.is_finite() && self.mu_hi.is_finite() && self.mu_lo <= self.mu_hi) {
            return err(format!("bad mu range [{}, {}]", self.mu_lo, self.mu_hi));
        }
        if !(self.sigma_lo >= 0.0 && self.sigma_lo <= self.sigma_hi) {
            return err(format!(
                "need 0 <= sigma_lo <= sigma_hi, got [{}, {}]",
                self.sigma_lo, self.sigma_hi
            ));
        }
        if self.sigma_lo == 0.0 && self.mu_lo <= 0.0 {
            return err("sigma may reach 0 while mu may be <= 0: degenerate delay".into());
        }
        if !(self.p_on > 0.0 && self.p_on <= 1.0) {
            return err(format!("need 0 < p_on <= 1, got {}", self.p_on));
        }
        if !(self.distance_fixed_m >= 0.0) {
            return err(format!("negative fixed distance {}", self.distance_fixed_m));
        }
        if !(self.distance_lo_m > 0.0 && self.distance_lo_m <= self.distance_hi_m) {
            return err(format!(
                "need 0 < distance_lo_m <= distance_hi_m, got [{}, {}]",
                self.distance_lo_m, self.distance_hi_m
            ));
        }
        if !(self.sound_speed_mps > 0.0) {
            return err(format!(
                "sound speed must be > 0, got {}",
                self.sound_speed_mps
            ));
        }
        if !(self.inter_pass_gap_s >= 0.0) {
            return err(format!("negative pass gap {}", self.inter_pass_gap_s));
        }
        if self.max_passes == 0 {
            return err("max_passes must be >= 1".into());
        }
        Ok(())
    }

    /// Parse the flat `key=value` format. `#` starts a comment line; blank
    /// lines are ignored; unset keys keep their defaults; unknown keys are
    /// an error.
    pub fn parse(text: &str) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected key=value, got '{line}'"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Parse {
                line: line_no,
                msg: format!("invalid {what} '{value}'"),
            };
            match key {
                "scenario" => {
                    cfg.scenario = match value {
                        "I" | "i" | "1" => Scenario::I,
                        "II" | "ii" | "2" => Scenario::II,
                        _ => return Err(bad("scenario")),
                    }
                }
                "uniform_lo" => cfg.uniform_lo = value.parse().map_err(|_| bad("number"))?,
                "uniform_hi" => cfg.uniform_hi = value.parse().map_err(|_| bad("number"))?,
                "mu_lo" => cfg.mu_lo = value.parse().map_err(|_| bad("number"))?,
                "mu_hi" => cfg.mu_hi = value.parse().map_err(|_| bad("number"))?,
                "sigma_lo" => cfg.sigma_lo = value.parse().map_err(|_| bad("number"))?,
                "sigma_hi" => cfg.sigma_hi = value.parse().map_err(|_| bad("number"))?,
                "p_on" => cfg.p_on = value.parse().map_err(|_| bad("number"))?,
                "distance_fixed_m" => {
                    cfg.distance_fixed_m = value.parse().map_err(|_| bad("number"))?
                }
                "distance_lo_m" => cfg.distance_lo_m = value.parse().map_err(|_| bad("number"))?,
                "distance_hi_m" => cfg.distance_hi_m = value.parse().map_err(|_| bad("number"))?,
                "sound_speed_mps" => {
                    cfg.sound_speed_mps = value.parse().map_err(|_| bad("number"))?
                }
                "message_bits" => cfg.message_bits = value.parse().map_err(|_| bad("count"))?,
                "inter_pass_gap_s" => {
                    cfg.inter_pass_gap_s = value.parse().map_err(|_| bad("number"))?
                }
                "max_passes" => cfg.max_passes = value.parse().map_err(|_| bad("count"))?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown key '{other}' at line {line_no}"
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// MAC-delay distribution of one directed link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MacDelayModel {
    Uniform { lo: f64, hi: f64 },
    TruncatedGaussian { mu: f64, sigma: f64 },
}

/// Where the contact distance comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DistanceRule {
    Fixed(f64),
    /// Redrawn uniformly per attempt (vehicles drift between contacts).
    PerAttempt {
        lo: f64,
        hi: f64,
    },
}

/// Stochastic contract of one directed link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkModel {
    pub mac: MacDelayModel,
    pub distance: DistanceRule,
    /// Plan speedup if the transmitting endpoint is selected, else 1.
    pub alpha_out: f64,
}

/// One attempt on one directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactSample {
    pub available: bool,
    /// Positive contact delay; present iff `available`.
    pub delay_s: Option<f64>,
}

/// Per-direction link models for every edge of a graph, indexed by
/// transmitter; receiver lists stay in ascending label order.
#[derive(Debug, Clone)]
pub struct LinkTable {
    outgoing: Vec<Vec<(NodeId, LinkModel)>>,
}

impl LinkTable {
    pub fn get(&self, from: NodeId, to: NodeId) -> Option<&LinkModel> {
        let list = &self.outgoing[from.index()];
        list.binary_search_by_key(&to, |(r, _)| *r)
            .ok()
            .map(|i| &list[i].1)
    }

    /// Outgoing links of `from` in ascending receiver order.
    pub fn outgoing(&self, from: NodeId) -> &[(NodeId, LinkModel)] {
        &self.outgoing[from.index()]
    }

    pub fn node_count(&self) -> usize {
        self.outgoing.len()
    }
}

/// Acoustic propagation time.
pub fn propagation_delay(distance_m: f64, sound_speed_mps: f64) -> f64 {
    debug_assert!(distance_m >= 0.0 && sound_speed_mps > 0.0);
    distance_m / sound_speed_mps
}

/// Sample a Gaussian(mu, sigma) conditioned on (0, inf).
///
/// `sigma == 0` with positive `mu` returns `mu`; with `mu <= 0` the
/// distribution is degenerate and rejected. Two accept-reject routes cover
/// the parameter space: plain resampling while most mass is positive, and
/// Robert's shifted-exponential proposal when the positive tail is far out
/// (standardized bound above 0.5).
pub fn sample_truncated_gaussian<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> Result<f64> {
    if sigma < 0.0 || !sigma.is_finite() || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "invalid truncated-gaussian parameters mu={mu}, sigma={sigma}"
        )));
    }
    if sigma == 0.0 {
        if mu > 0.0 {
            return Ok(mu);
        }
        return Err(Error::Domain(format!(
            "degenerate truncated gaussian: sigma=0 with mu={mu}"
        )));
    }
    loop {
        // Standardized lower bound: x > 0 iff z > a.
        let a = -mu / sigma;
        let z = if a < 0.5 {
            loop {
                let z: f64 = rng.sample(StandardNormal);
                if z > a {
                    break z;
                }
            }
        } else {
            // Robert (1995) one-sided tail sampler.
            let alpha = (a + (a * a + 4.0).sqrt()) / 2.0;
            loop {
                let u1 = 1.0 - rng.random::<f64>(); // in (0, 1]
                let u2: f64 = rng.random();
                let z = a - u1.ln() / alpha;
                let rho = (-(z - alpha) * (z - alpha) / 2.0).exp();
                if u2 <= rho {
                    break z;
                }
            }
        };
        let x = mu + sigma * z;
        // z == a can round x to exactly 0; resample that measure-zero case.
        if x > 0.0 {
            return Ok(x);
        }
    }
}

fn sample_uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Build per-direction link models for every edge.
///
/// Scenario II draws `(mu, sigma)` once per direction, in sorted edge order
/// with the `u -> v` direction first, so the table is a deterministic
/// function of the seed and is identical across plans that share a seed
/// (the speedup assignment consumes no randomness).
pub fn instantiate_links(
    g: &Graph,
    cfg: &ScenarioConfig,
    plan: &AllocationPlan,
    seed: u64,
) -> Result<LinkTable> {
    cfg.validate()?;
    plan.validate(g)?;
    let mut fast = vec![false; g.node_count()];
    for &node in &plan.selected {
        fast[node.index()] = true;
    }
    let mut rng = stream_rng(&[seed]);
    let mut outgoing: Vec<Vec<(NodeId, LinkModel)>> = vec![Vec::new(); g.node_count()];
    for e in g.edges() {
        for (tx, rx) in [(e.u, e.v), (e.v, e.u)] {
            let mac = match cfg.scenario {
                Scenario::I => MacDelayModel::Uniform {
                    lo: cfg.uniform_lo,
                    hi: cfg.uniform_hi,
                },
                Scenario::II => {
                    let mu = sample_uniform(cfg.mu_lo, cfg.mu_hi, &mut rng);
                    let sigma = sample_uniform(cfg.sigma_lo, cfg.sigma_hi, &mut rng);
                    MacDelayModel::TruncatedGaussian { mu, sigma }
                }
            };
            let distance = match cfg.scenario {
                Scenario::I => DistanceRule::Fixed(cfg.distance_fixed_m),
                Scenario::II => DistanceRule::PerAttempt {
                    lo: cfg.distance_lo_m,
                    hi: cfg.distance_hi_m,
                },
            };
            let alpha_out = if fast[tx.index()] { plan.alpha } else { 1.0 };
            outgoing[tx.index()].push((
                rx,
                LinkModel {
                    mac,
                    distance,
                    alpha_out,
                },
            ));
        }
    }
    for list in &mut outgoing {
        list.sort_by_key(|(rx, _)| *rx);
    }
    Ok(LinkTable { outgoing })
}

/// Draw one contact attempt: availability, then (if on) the full delay.
pub fn sample_contact<R: Rng + ?Sized>(
    link: &LinkModel,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> ContactSample {
    let available = rng.random::<f64>() < cfg.p_on;
    if !available {
        return ContactSample {
            available: false,
            delay_s: None,
        };
    }
    let mac = match link.mac {
        MacDelayModel::Uniform { lo, hi } => sample_uniform(lo, hi, rng),
        MacDelayModel::TruncatedGaussian { mu, sigma } => sample_truncated_gaussian(mu, sigma, rng)
            .expect("link parameters validated at instantiation"),
    };
    let distance = match link.distance {
        DistanceRule::Fixed(d) => d,
        DistanceRule::PerAttempt { lo, hi } => sample_uniform(lo, hi, rng),
    };
    let delay = link.alpha_out * (mac + propagation_delay(distance, cfg.sound_speed_mps));
    ContactSample {
        available: true,
        delay_s: Some(delay),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::select_by_degree;
    use crate::topology::{build_topology, TopologyKind};

    fn star4() -> Graph {
        Graph::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap()
    }

    #[test]
    fn truncated_gaussian_half_normal_mean() {
        let mut rng = stream_rng(&[1]);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = sample_truncated_gaussian(0.0, 1.0, &mut rng).unwrap();
            assert!(x > 0.0);
            sum += x;
        }
        let mean = sum / n as f64;
        // Half-normal mean is sigma * sqrt(2/pi) = 0.79788...
        assert!((mean - 0.7979).abs() < 0.01, "mean={mean}");
    }

    #[test]
    fn truncated_gaussian_far_positive_mean_is_untouched() {
        let mut rng = stream_rng(&[2]);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_truncated_gaussian(10.0, 0.1, &mut rng).unwrap();
        }
        assert!((sum / n as f64 - 10.0).abs() < 0.01);
    }

    #[test]
    fn truncated_gaussian_tail_sampler_branch() {
        // mu=-3, sigma=1 standardizes to a=3: Robert branch. The truncated
        // mean is mu + sigma*h(3) with hazard h(3) = phi(3)/(1-Phi(3))
        // = 0.00443185/0.00134990 = 3.28310, i.e. 0.28310.
        let mut rng = stream_rng(&[3]);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = sample_truncated_gaussian(-3.0, 1.0, &mut rng).unwrap();
            assert!(x > 0.0);
            sum += x;
        }
        assert!((sum / n as f64 - 0.28310).abs() < 0.01);
    }

    #[test]
    fn truncated_gaussian_degenerate_cases() {
        let mut rng = stream_rng(&[4]);
        assert_eq!(sample_truncated_gaussian(2.5, 0.0, &mut rng).unwrap(), 2.5);
        assert!(sample_truncated_gaussian(0.0, 0.0, &mut rng).is_err());
        assert!(sample_truncated_gaussian(-1.0, 0.0, &mut rng).is_err());
        assert!(sample_truncated_gaussian(1.0, -0.5, &mut rng).is_err());
    }

    #[test]
    fn propagation_arithmetic() {
        assert!((propagation_delay(150.0, 1500.0) - 0.1).abs() < 1e-15);
        assert_eq!(propagation_delay(0.0, 1500.0), 0.0);
        assert!((propagation_delay(200.0, 1500.0) - 0.133333).abs() < 1e-6);
    }

    #[test]
    fn config_defaults_and_parse_roundtrip() {
        let cfg = ScenarioConfig::parse("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());

        let text = "# worst case\nscenario=II\np_on=0.8\nmu_lo=1.5\nmu_hi=2.5\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.scenario, Scenario::II);
        assert_eq!(cfg.p_on, 0.8);
        assert_eq!(cfg.mu_lo, 1.5);
        assert_eq!(cfg.uniform_lo, 0.5);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            ScenarioConfig::parse("warp_speed=9"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ScenarioConfig::parse("p_on=fast"),
            Err(Error::Parse { .. })
        ));
        assert!(ScenarioConfig::parse("p_on=0.0").is_err());
        assert!(ScenarioConfig::parse("uniform_lo=5\nuniform_hi=1").is_err());
    }

    #[test]
    fn scenario_one_links_share_parameters() {
        let g = build_topology(TopologyKind::ErdosRenyi, 20, 30, 3).unwrap();
        let table =
            instantiate_links(&g, &ScenarioConfig::default(), &AllocationPlan::none(), 9).unwrap();
        let reference = table.get(g.edges()[0].u, g.edges()[0].v).unwrap().mac;
        for e in g.edges() {
            assert_eq!(table.get(e.u, e.v).unwrap().mac, reference);
            assert_eq!(table.get(e.v, e.u).unwrap().mac, reference);
            assert_eq!(table.get(e.u, e.v).unwrap().alpha_out, 1.0);
        }
    }

    #[test]
    fn scenario_two_draws_parameters_in_range_per_direction() {
        let g = star4();
        let cfg = ScenarioConfig::scenario_ii();
        let table = instantiate_links(&g, &cfg, &AllocationPlan::none(), 5).unwrap();
        let mut distinct = false;
        for e in g.edges() {
            for link in [table.get(e.u, e.v).unwrap(), table.get(e.v, e.u).unwrap()] {
                match link.mac {
                    MacDelayModel::TruncatedGaussian { mu, sigma } => {
                        assert!(mu >= cfg.mu_lo && mu <= cfg.mu_hi);
                        assert!(sigma >= cfg.sigma_lo && sigma <= cfg.sigma_hi);
                    }
                    other => panic!("expected gaussian link, got {other:?}"),
                }
            }
            if table.get(e.u, e.v).unwrap().mac != table.get(e.v, e.u).unwrap().mac {
                distinct = true;
            }
        }
        assert!(distinct, "directions should draw independent parameters");
    }

    #[test]
    fn instantiation_is_deterministic_and_plan_independent() {
        let g = build_topology(TopologyKind::ErdosRenyi, 30, 45, 1).unwrap();
        let cfg = ScenarioConfig::scenario_ii();
        let baseline = instantiate_links(&g, &cfg, &AllocationPlan::none(), 7).unwrap();
        let plan = select_by_degree(&g, 5).unwrap().with_speedup(0.1).unwrap();
        let sped = instantiate_links(&g, &cfg, &plan, 7).unwrap();
        for e in g.edges() {
            for (tx, rx) in [(e.u, e.v), (e.v, e.u)] {
                let a = baseline.get(tx, rx).unwrap();
                let b = sped.get(tx, rx).unwrap();
                assert_eq!(a.mac, b.mac, "mu/sigma must not depend on the plan");
                let expected_alpha = if plan.is_selected(tx) { 0.1 } else { 1.0 };
                assert_eq!(b.alpha_out, expected_alpha);
            }
        }
    }

    #[test]
    fn alpha_applies_to_departing_direction_only() {
        let g = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        let plan = AllocationPlan {
            method: crate::selection::SelectionMethod::Degree,
            k: 1,
            alpha: 0.25,
            selected: vec![NodeId(0)],
        };
        let table = instantiate_links(&g, &ScenarioConfig::default(), &plan, 0).unwrap();
        assert_eq!(table.get(NodeId(0), NodeId(1)).unwrap().alpha_out, 0.25);
        assert_eq!(table.get(NodeId(1), NodeId(0)).unwrap().alpha_out, 1.0);
    }

    #[test]
    fn contact_composition_rule() {
        // Degenerate MAC delay 2.0, 150 m at 1500 m/s, alpha 0.1:
        // 0.1 * (2.0 + 0.1) = 0.21.
        let cfg = ScenarioConfig {
            uniform_lo: 2.0,
            uniform_hi: 2.0,
            p_on: 1.0,
            ..ScenarioConfig::default()
        };
        let link = LinkModel {
            mac: MacDelayModel::Uniform { lo: 2.0, hi: 2.0 },
            distance: DistanceRule::Fixed(150.0),
            alpha_out: 0.1,
        };
        let mut rng = stream_rng(&[0]);
        let c = sample_contact(&link, &cfg, &mut rng);
        assert!(c.available);
        assert!((c.delay_s.unwrap() - 0.21).abs() < 1e-12);
    }

    #[test]
    fn near_zero_p_on_never_available() {
        let cfg = ScenarioConfig {
            p_on: f64::MIN_POSITIVE,
            ..ScenarioConfig::default()
        };
        let link = LinkModel {
            mac: MacDelayModel::Uniform { lo: 1.0, hi: 2.0 },
            distance: DistanceRule::Fixed(0.0),
            alpha_out: 1.0,
        };
        let mut rng = stream_rng(&[1]);
        for _ in 0..10_000 {
            assert!(!sample_contact(&link, &cfg, &mut rng).available);
        }
    }

    #[test]
    fn empirical_availability_matches_p_on() {
        let cfg = ScenarioConfig {
            p_on: 0.9,
            ..ScenarioConfig::default()
        };
        let link = LinkModel {
            mac: MacDelayModel::Uniform { lo: 0.5, hi: 3.5 },
            distance: DistanceRule::Fixed(150.0),
            alpha_out: 1.0,
        };
        let mut rng = stream_rng(&[2]);
        let n = 100_000;
        let mut on = 0usize;
        for _ in 0..n {
            if sample_contact(&link, &cfg, &mut rng).available {
                on += 1;
            }
        }
        let rate = on as f64 / n as f64;
        assert!((rate - 0.9).abs() < 0.01, "rate={rate}");
    }

    #[test]
    fn alpha_scales_the_same_attempt_exactly() {
        let cfg = ScenarioConfig::scenario_ii();
        let base = LinkModel {
            mac: MacDelayModel::TruncatedGaussian {
                mu: 2.0,
                sigma: 0.7,
            },
            distance: DistanceRule::PerAttempt {
                lo: 150.0,
                hi: 200.0,
            },
            alpha_out: 1.0,
        };
        let halved = LinkModel {
            alpha_out: 0.5,
            ..base
        };
        for attempt in 0..1000u64 {
            let mut rng_a = stream_rng(&[10, attempt]);
            let mut rng_b = stream_rng(&[10, attempt]);
            let a = sample_contact(&base, &cfg, &mut rng_a);
            let b = sample_contact(&halved, &cfg, &mut rng_b);
            assert_eq!(a.available, b.available);
            if let (Some(da), Some(db)) = (a.delay_s, b.delay_s) {
                assert_eq!(db, 0.5 * da);
            }
        }
    }

    #[test]
    fn scenario_one_contacts_identically_distributed_across_links() {
        // Two-sample Kolmogorov-Smirnov at the 1% level on two different
        // unoptimized links.
        let cfg = ScenarioConfig::default();
        let link = LinkModel {
            mac: MacDelayModel::Uniform {
                lo: cfg.uniform_lo,
                hi: cfg.uniform_hi,
            },
            distance: DistanceRule::Fixed(cfg.distance_fixed_m),
            alpha_out: 1.0,
        };
        let draw = |stream: u64| -> Vec<f64> {
            let mut rng = stream_rng(&[stream]);
            let mut out = Vec::new();
            while out.len() < 100_000 {
                if let Some(d) = sample_contact(&link, &cfg, &mut rng).delay_s {
                    out.push(d);
                }
            }
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out
        };
        let xs = draw(100);
        let ys = draw(200);
        let (n, m) = (xs.len() as f64, ys.len() as f64);
        let mut d_stat = 0.0f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < xs.len() && j < ys.len() {
            if xs[i] <= ys[j] {
                i += 1;
            } else {
                j += 1;
            }
            let diff = (i as f64 / n - j as f64 / m).abs();
            d_stat = d_stat.max(diff);
        }
        let threshold = 1.628 * ((n + m) / (n * m)).sqrt();
        assert!(d_stat < threshold, "KS D={d_stat}, threshold={threshold}");
    }
}
