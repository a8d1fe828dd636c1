//! End-to-end runs: oracle labels, one automaton per node, the radio
//! simulator, and an audit of everything the nodes learned.

use serde::Serialize;
use thiserror::Error;

use crate::bits::floor_log2;
use crate::graph::{decompose, Graph, LevelDecomposition};
use crate::labeling::{assign_labels, LabelingScheme, Marker};
use crate::protocol::node::{Knowledge, NodeState, WaveKind};
use crate::protocol::timeline::{compute_timeline, Timeline};
use crate::protocol::wave::wave_len;
use crate::radio::{self, SimError, SimulationTrace};
use crate::upper_set::{compute_upper_sets, compute_weights, UpperSetPlan, WeightMap};

pub const CAP_MULTIPLIER_ENV: &str = "RSD_ROUND_CAP_MULTIPLIER";
pub const DEFAULT_CAP_MULTIPLIER: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub record_trace: bool,
    pub cap_multiplier: u64,
}

impl Default for RunOptions {
    /// No trace; multiplier from the environment, else 64.
    fn default() -> Self {
        let cap_multiplier = std::env::var(CAP_MULTIPLIER_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_CAP_MULTIPLIER);
        Self { record_trace: false, cap_multiplier }
    }
}

/// multiplier · D · n² · (⌊log Δ⌋ + 1)
pub fn round_cap(g: &Graph, multiplier: u64) -> u64 {
    let n = g.n() as u64;
    let d = g.diameter() as u64;
    let logd = u64::from(floor_log2(g.max_degree().max(1) as u64)) + 1;
    multiplier * d * n * n * logd
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelStats {
    pub max_bits: usize,
    pub mean_bits: f64,
}

/// Oracle comparison of a finished run. Each flag covers one family of
/// checks; `issues` lists every mismatch found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Audit {
    pub parameters_ok: bool,
    pub weights_ok: bool,
    pub timeline_ok: bool,
    pub waves_ok: bool,
    pub issues: Vec<String>,
}

impl Audit {
    pub fn all_ok(&self) -> bool {
        self.parameters_ok && self.weights_ok && self.timeline_ok && self.waves_ok
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub n: usize,
    pub delta: usize,
    pub h: usize,
    pub diameter: usize,
    pub outputs: Vec<Option<u64>>,
    pub rounds_used: u64,
    pub round_cap: u64,
    pub trace: Option<SimulationTrace>,
    pub label_stats: LabelStats,
    pub knowledge: Vec<Knowledge>,
    pub timeline: Option<Timeline>,
    pub audit: Audit,
}

impl ProtocolResult {
    pub fn outputs_ok(&self) -> bool {
        self.outputs.iter().all(|o| *o == Some(self.n as u64))
    }

    pub fn report(&self) -> Report {
        Report {
            n: self.n,
            delta: self.delta,
            h: self.h,
            rounds_used: self.rounds_used,
            max_label_bits: self.label_stats.max_bits,
            outputs_ok: self.outputs_ok(),
            bound_dn2_log_delta: self.round_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub n: usize,
    pub delta: usize,
    pub h: usize,
    pub rounds_used: u64,
    pub max_label_bits: usize,
    pub outputs_ok: bool,
    #[serde(rename = "bound_Dn2logDelta")]
    pub bound_dn2_log_delta: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("size discovery needs at least two nodes (got n = 1)")]
    SingleNode,
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("round cap {cap} exhausted before every node finished")]
    RoundCap { cap: u64, partial: Box<ProtocolResult> },
}

/// Everything the oracle computes for a graph.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub decomposition: LevelDecomposition,
    pub plan: UpperSetPlan,
    pub weights: WeightMap,
    pub scheme: LabelingScheme,
}

pub fn oracle(g: &Graph) -> Result<Oracle, ProtocolError> {
    if g.n() < 2 {
        return Err(ProtocolError::SingleNode);
    }
    let decomposition = decompose(g);
    let plan = compute_upper_sets(g, &decomposition);
    let weights = compute_weights(&plan, &decomposition);
    let scheme = assign_labels(g, &decomposition, &plan, &weights);
    Ok(Oracle { decomposition, plan, weights, scheme })
}

pub fn run_protocol(g: &Graph) -> Result<ProtocolResult, ProtocolError> {
    run_protocol_with(g, RunOptions::default())
}

pub fn run_protocol_with(g: &Graph, opts: RunOptions) -> Result<ProtocolResult, ProtocolError> {
    let o = oracle(g)?;
    let cap = round_cap(g, opts.cap_multiplier);
    let automata: Vec<NodeState> = o.scheme.labels.iter().map(|&l| NodeState::new(l)).collect();
    let out = radio::run(g, automata, cap, opts.record_trace)?;
    let knowledge: Vec<Knowledge> = out.states.into_iter().map(|s| s.know).collect();
    let d = &o.decomposition;
    let mut result = ProtocolResult {
        n: g.n(),
        delta: d.delta,
        h: d.h,
        diameter: g.diameter(),
        outputs: knowledge.iter().map(|k| k.output.map(|l| l.value)).collect(),
        rounds_used: out.rounds_run,
        round_cap: cap,
        trace: out.trace,
        label_stats: LabelStats { max_bits: o.scheme.max_bits(), mean_bits: o.scheme.mean_bits() },
        timeline: None,
        audit: Audit::default(),
        knowledge,
    };
    let (timeline, audit) = audit(g, &o, &result.knowledge);
    result.timeline = timeline;
    result.audit = audit;
    if !out.all_terminal {
        return Err(ProtocolError::RoundCap { cap, partial: Box::new(result) });
    }
    Ok(result)
}

fn audit(g: &Graph, o: &Oracle, know: &[Knowledge]) -> (Option<Timeline>, Audit) {
    let d = &o.decomposition;
    let (n, h, delta) = (g.n(), d.h as u64, d.delta as u64);
    let mut issues = Vec::new();
    let root = &know[d.root];
    let timeline = (root.phase_x.len() == d.h && root.stops.len() == d.h)
        .then(|| compute_timeline(delta, h, &root.phase_x, &root.stops));

    let before = issues.len();
    match &timeline {
        None => issues.push("root did not finish every phase".to_string()),
        Some(tl) => {
            let mut t2: Vec<u64> = tl.phases.iter().map(|p| p.t2).collect();
            t2.push(tl.final_start);
            for (i, p) in tl.phases.iter().enumerate() {
                let lower = d.h - i;
                let x = d.levels[lower].iter().map(|&u| o.weights.weight[u]).max().unwrap_or(0);
                if p.x != x {
                    issues.push(format!("phase {}: announced maximum weight {} != {x}", i + 1, p.x));
                }
            }
            for (v, k) in know.iter().enumerate() {
                if k.t1 != Some(tl.t1) || k.t2 != t2 || k.stops != root.stops || k.phase_x != root.phase_x {
                    issues.push(format!("node {v}: schedule differs from the global timeline"));
                }
            }
        }
    }
    let timeline_ok = issues.len() == before;

    let before = issues.len();
    for (v, k) in know.iter().enumerate() {
        let t1 = timeline.as_ref().map_or(u64::MAX, |tl| tl.t1);
        let check = |x: Option<crate::protocol::node::Learned<u64>>, want: u64| {
            x.is_some_and(|l| l.value == want && l.round <= t1)
        };
        if !check(k.delta, delta) || !check(k.level, d.level[v] as u64) || !check(k.height, h) {
            issues.push(format!("node {v}: wrong or late (Δ, level, h)"));
        }
    }
    let parameters_ok = issues.len() == before;

    let before = issues.len();
    for (v, k) in know.iter().enumerate() {
        let l = d.level[v];
        let deadline = timeline.as_ref().map_or(u64::MAX, |tl| {
            if l == d.h {
                tl.t1
            } else {
                tl.phases.get(d.h - l).map_or(tl.final_start, |p| p.t2)
            }
        });
        match k.weight {
            Some(w) if w.value == o.weights.weight[v] && w.round <= deadline => {}
            other => issues.push(format!(
                "node {v}: weight {:?}, expected {} by round {deadline}",
                other.map(|w| (w.value, w.round)),
                o.weights.weight[v]
            )),
        }
    }
    for (l, nodes) in d.levels.iter().enumerate() {
        let sum: u64 = nodes.iter().map(|&u| o.weights.weight[u]).sum();
        let below = d.level.iter().filter(|&&x| x >= l).count() as u64;
        if sum != below {
            issues.push(format!("level {l}: weights sum to {sum}, {below} nodes at or below"));
        }
    }
    let weights_ok = issues.len() == before;

    let before = issues.len();
    let kinds: Vec<WaveKind> = know.iter().flat_map(|k| k.waves.iter().map(|w| w.kind)).collect();
    let mut seen_kinds = Vec::new();
    for kind in kinds {
        if !seen_kinds.contains(&kind) {
            seen_kinds.push(kind);
        }
    }
    for kind in seen_kinds {
        let records: Vec<(usize, _)> = know
            .iter()
            .enumerate()
            .filter_map(|(v, k)| k.waves.iter().find(|w| w.kind == kind).map(|w| (v, *w)))
            .collect();
        let initiators: Vec<usize> = records.iter().filter(|(_, w)| w.distance == 0).map(|&(v, _)| v).collect();
        let [source] = initiators[..] else {
            issues.push(format!("{kind:?}: {} initiators", initiators.len()));
            continue;
        };
        let dist = g.distances_from(source);
        if records.len() != n {
            issues.push(format!("{kind:?}: only {} of {n} nodes decoded it", records.len()));
        }
        for (v, w) in records {
            let expected_finish = w.origin + w.distance * wave_len(w.value);
            if w.distance != dist[v] as u64 || w.finish != expected_finish {
                issues.push(format!(
                    "{kind:?}: node {v} finished at {} (distance {}), expected {expected_finish} at distance {}",
                    w.finish, w.distance, dist[v]
                ));
            }
        }
    }
    let delta_source_ok = know[d.root].waves.iter().any(|w| w.kind == WaveKind::Delta && w.distance == 0);
    if !delta_source_ok || !o.scheme.labels[d.root].has(Marker::Root) {
        issues.push("Δ wave did not start at the root".to_string());
    }
    let waves_ok = issues.len() == before;

    (timeline, Audit { parameters_ok, weights_ok, timeline_ok, waves_ok, issues })
}
