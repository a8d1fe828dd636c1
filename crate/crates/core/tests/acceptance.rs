//! Acceptance suite. Every criterion prints one PASS/FAIL line; the binary
//! exits nonzero if any criterion fails.

mod common;

use num_bigint::BigUint;
use rayon::prelude::*;
use rsd_core::bits::floor_log2;
use rsd_core::gen;
use rsd_core::history_lab::{check_lemmas, pattern_bound, pattern_bound_alt, LemmaConfig};
use rsd_core::labeling::length_bound;
use rsd_core::protocol::node::WaveKind;
use rsd_core::protocol::wave::wave_len;
use rsd_core::protocol::{oracle, run_protocol_with, wave_decode, wave_encode, ProtocolResult, RunOptions};
use rsd_core::Graph;

const CAP_MULTIPLIER: u64 = 64;

struct Verdict {
    name: &'static str,
    failures: Vec<String>,
    detail: String,
}

impl Verdict {
    fn new(name: &'static str) -> Self {
        Self { name, failures: Vec::new(), detail: String::new() }
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.failures.push(what.into());
    }

    fn line(&self) -> String {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} {}", self.name, self.detail);
        for f in self.failures.iter().take(5) {
            s.push_str(&format!("\n    {f}"));
        }
        if self.failures.len() > 5 {
            s.push_str(&format!("\n    ... {} more", self.failures.len() - 5));
        }
        s
    }
}

struct CorpusRun {
    name: String,
    graph: Graph,
    result: Result<ProtocolResult, String>,
    plan_check: Result<(), String>,
}

fn run_corpus() -> Vec<CorpusRun> {
    common::corpus(250, 250)
        .into_par_iter()
        .map(|inst| {
            let opts = RunOptions { record_trace: false, cap_multiplier: CAP_MULTIPLIER };
            let result = run_protocol_with(&inst.graph, opts).map_err(|e| e.to_string());
            let o = oracle(&inst.graph).expect("corpus graphs have n ≥ 2");
            let plan_check = o.plan.check(&inst.graph, &o.decomposition);
            CorpusRun { name: inst.name, graph: inst.graph, result, plan_check }
        })
        .collect()
}

fn end_to_end(runs: &[CorpusRun], secs: f64) -> Verdict {
    let mut v = Verdict::new("end-to-end size discovery");
    if runs.len() < 500 {
        v.fail(format!("corpus has only {} instances", runs.len()));
    }
    for r in runs {
        match &r.result {
            Ok(res) if res.outputs.iter().all(|&o| o == Some(r.graph.n() as u64)) => {}
            Ok(res) => v.fail(format!("{}: outputs {:?}", r.name, &res.outputs[..res.outputs.len().min(6)])),
            Err(e) => v.fail(format!("{}: {e}", r.name)),
        }
    }
    if secs > 300.0 {
        v.fail(format!("corpus took {secs:.1}s"));
    }
    v.detail = format!("({} instances, {secs:.1}s)", runs.len());
    v
}

fn label_length() -> Verdict {
    let mut v = Verdict::new("label length");
    let deltas = [2u64, 4, 16, 256, 4096, 65536];
    let observed: Vec<usize> = deltas
        .par_iter()
        .map(|&delta| {
            let d = delta as usize;
            let mut graphs = vec![gen::star(d).unwrap()];
            for seed in 0..3 {
                let extra_nodes = (d / 2).clamp(4, 2000);
                graphs.push(gen::hub_graph(d, extra_nodes, extra_nodes, seed).unwrap());
            }
            graphs
                .iter()
                .map(|g| {
                    assert_eq!(g.max_degree(), d);
                    oracle(g).unwrap().scheme.max_bits()
                })
                .max()
                .unwrap()
        })
        .collect();
    for (&delta, &bits) in deltas.iter().zip(&observed) {
        let bound = length_bound(delta);
        if bits > bound {
            v.fail(format!("Δ={delta}: {bits} bits > {bound}"));
        }
    }
    let at = |delta: u64| observed[deltas.iter().position(|&d| d == delta).unwrap()];
    for (a, b) in [(2, 4), (4, 16), (16, 256), (256, 65536)] {
        if at(b) > at(a) + 6 {
            v.fail(format!("Δ {a}→{b}: {} → {} bits", at(a), at(b)));
        }
    }
    v.detail = format!("(max bits {:?} for Δ {:?})", observed, deltas);
    v
}

fn round_bound(runs: &[CorpusRun]) -> Verdict {
    let mut v = Verdict::new("round bound");
    let mut worst = 0.0f64;
    for r in runs {
        let Ok(res) = &r.result else {
            v.fail(format!("{}: no result", r.name));
            continue;
        };
        let (n, d) = (r.graph.n() as u64, r.graph.diameter() as u64);
        let logd = u64::from(floor_log2(r.graph.max_degree() as u64)) + 1;
        let bound = CAP_MULTIPLIER * d * n * n * logd;
        worst = worst.max(res.rounds_used as f64 / bound as f64);
        if res.rounds_used > bound {
            v.fail(format!("{}: {} rounds > {bound}", r.name, res.rounds_used));
        }
    }
    v.detail = format!("(worst rounds/bound {worst:.4})");
    v
}

fn audited(runs: &[CorpusRun], name: &'static str, pick: impl Fn(&ProtocolResult) -> bool) -> Verdict {
    let mut v = Verdict::new(name);
    for r in runs {
        match &r.result {
            Ok(res) if pick(res) => {}
            Ok(res) => v.fail(format!("{}: {:?}", r.name, &res.audit.issues[..res.audit.issues.len().min(3)])),
            Err(e) => v.fail(format!("{}: {e}", r.name)),
        }
    }
    v
}

fn waves(runs: &[CorpusRun]) -> Verdict {
    let mut v = audited(runs, "wave oracle", |res| res.audit.waves_ok);
    for x in 1..=4096u64 {
        let bits = wave_encode(x).unwrap();
        if bits.len() as u64 != wave_len(x) || wave_decode(&bits) != Ok(x) {
            v.fail(format!("round trip of {x}"));
        }
    }
    // Waves started by the root: level-j nodes finish at start + j·len.
    let mut checked = 0usize;
    for r in runs {
        let Ok(res) = &r.result else { continue };
        let level = r.graph.distances_from(res.knowledge.iter().position(|k| {
            k.waves.iter().any(|w| w.kind == WaveKind::Delta && w.distance == 0)
        }).unwrap_or(0));
        for kind in [WaveKind::Delta, WaveKind::Final] {
            for (u, k) in res.knowledge.iter().enumerate() {
                match k.waves.iter().find(|w| w.kind == kind) {
                    Some(w) if w.distance == level[u] as u64 && w.finish == w.origin + w.distance * wave_len(w.value) => {
                        checked += 1;
                    }
                    other => v.fail(format!("{}: node {u} {kind:?} wave {other:?}", r.name)),
                }
            }
        }
    }
    v.detail = format!("(1..=4096 round trip, {checked} root-wave finishes)");
    v
}

fn upper_sets(runs: &[CorpusRun]) -> Verdict {
    let mut v = Verdict::new("upper-set construction");
    for r in runs {
        if let Err(e) = &r.plan_check {
            v.fail(format!("{}: {e}", r.name));
        }
    }
    v
}

fn lemmas() -> Verdict {
    let mut v = Verdict::new("lower-bound lemmas");
    let reports: Vec<_> = [4usize, 6, 8, 12]
        .par_iter()
        .map(|&delta| check_lemmas(&LemmaConfig::new(delta, 50, 200, 0x5eed + delta as u64)).unwrap())
        .collect();
    let mut pairs = Vec::new();
    for rep in &reports {
        if !rep.violations.is_empty() {
            v.fail(format!("Δ={}: {} violations, first {:?}", rep.delta, rep.violations.len(), rep.violations[0]));
        }
        if rep.equal_pattern_pairs == 0 {
            v.fail(format!("Δ={}: no equal-pattern pairs were compared", rep.delta));
        }
        pairs.push(rep.equal_pattern_pairs);
    }
    v.detail = format!("(50 automata × 20 labelings, T=200, equal-pattern pairs {pairs:?})");
    v
}

fn counting() -> Verdict {
    let mut v = Verdict::new("counting arithmetic");
    if pattern_bound(0) != BigUint::from(324u32) {
        v.fail(format!("pattern_bound(0) = {}", pattern_bound(0)));
    }
    if pattern_bound(1) != BigUint::from(104_976u32) {
        v.fail(format!("pattern_bound(1) = {}", pattern_bound(1)));
    }
    for beta in 0..=8 {
        if pattern_bound(beta) != pattern_bound_alt(beta) {
            v.fail(format!("β={beta}: evaluations disagree"));
        }
    }
    v
}

fn main() {
    let t0 = std::time::Instant::now();
    let runs = run_corpus();
    let secs = t0.elapsed().as_secs_f64();

    let verdicts = [
        end_to_end(&runs, secs),
        label_length(),
        round_bound(&runs),
        audited(&runs, "parameter learning", |res| res.audit.parameters_ok),
        audited(&runs, "phase weights", |res| res.audit.weights_ok),
        waves(&runs),
        upper_sets(&runs),
        lemmas(),
        counting(),
    ];
    for (i, v) in verdicts.iter().enumerate() {
        println!("[{}] {}", i + 1, v.line());
    }
    let failed: Vec<_> = verdicts.iter().filter(|v| !v.failures.is_empty()).map(|v| v.name).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", verdicts.len());
    } else {
        eprintln!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
