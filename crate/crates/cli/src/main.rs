use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rsd_core::history_lab::pattern::least_crossing_delta;
use rsd_core::history_lab::{check_lemmas, crossover, pattern_bound, LemmaConfig};
use rsd_core::labeling::length_bound;
use rsd_core::protocol::{oracle, run_protocol_with, ProtocolError, RunOptions};
use rsd_core::{gen, parse_graph, Graph};
use serde_json::json;

/// Library ceiling: 3^(2z) with z = 2^(β+1) must stay computable.
const HARD_MAX_BETA: u32 = 30;

#[derive(Parser)]
#[command(name = "rsd", version, about = "Size discovery in radio networks with collision detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Graph,
    Star,
    Family,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded instance in the graph file format.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of nodes (tree, graph).
        #[arg(long)]
        n: Option<usize>,
        /// Degree cap (tree, graph) or exact Δ (star, family).
        #[arg(long)]
        delta: Option<usize>,
        /// Family member index, Δ/2 ≤ i ≤ Δ−1.
        #[arg(long)]
        index: Option<usize>,
        /// Extra edges on top of the spanning tree (graph; default n).
        #[arg(long)]
        extra: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print levels, upper sets and weights as JSON.
    Oracle { graph: PathBuf },
    /// Write the labels file and report label lengths.
    Label {
        graph: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Simulate the protocol; exit 0 iff every node outputs n.
    Run {
        graph: PathBuf,
        /// Write the round-by-round trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Lower-bound experiments.
    Lowerbound {
        #[command(subcommand)]
        what: Lowerbound,
    },
}

#[derive(Subcommand)]
enum Lowerbound {
    /// Exact number of patterns for labels of length ≤ β.
    Patterns {
        #[arg(long)]
        beta: u32,
        #[arg(long, default_value_t = 16)]
        max_beta: u32,
    },
    /// Evaluate patterns(β) < Δ/2.
    Crossover {
        #[arg(long)]
        beta: u32,
        #[arg(long)]
        delta: BigUint,
        #[arg(long, default_value_t = 16)]
        max_beta: u32,
    },
    /// Check leaf and pattern indistinguishability on the tree family.
    Lemmas {
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 200)]
        rounds: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        labelings: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Verify(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn need(v: Option<usize>, flag: &str, kind: &str) -> anyhow::Result<usize> {
    v.ok_or_else(|| anyhow!("--{flag} is required for --kind {kind}"))
}

fn cmd_gen(
    kind: Kind,
    n: Option<usize>,
    delta: Option<usize>,
    index: Option<usize>,
    extra: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let g = match kind {
        Kind::Tree => gen::random_tree(need(n, "n", "tree")?, need(delta, "delta", "tree")?, seed),
        Kind::Graph => {
            let n = need(n, "n", "graph")?;
            gen::random_graph(n, need(delta, "delta", "graph")?, extra.unwrap_or(n), seed)
        }
        Kind::Star => gen::star(need(delta, "delta", "star")?),
        Kind::Family => gen::family(need(delta, "delta", "family")?, need(index, "index", "family")?),
    }
    .map_err(|e| anyhow!(e))?;
    emit(out, &g.to_file_string())?;
    Ok(())
}

fn cmd_oracle(path: &Path) -> CmdResult {
    let g = read_graph(path)?;
    let o = oracle(&g).map_err(|e| anyhow!(e))?;
    let d = &o.decomposition;
    let upper_sets: Vec<_> = o
        .plan
        .levels
        .iter()
        .enumerate()
        .map(|(l, lp)| json!({ "level": l, "members": lp.members, "private_children": lp.private_children }))
        .collect();
    let report = json!({
        "n": g.n(),
        "delta": d.delta,
        "h": d.h,
        "root": d.root,
        "levels": d.levels,
        "upper_sets": upper_sets,
        "weights": o.weights.weight,
    });
    println!("{report}");
    if let Err(e) = o.plan.check(&g, d) {
        return Err(Failure::Verify(anyhow!("upper-set invariant violated: {e}")));
    }
    Ok(())
}

fn cmd_label(path: &Path, out: Option<&Path>) -> CmdResult {
    let g = read_graph(path)?;
    let o = oracle(&g).map_err(|e| anyhow!(e))?;
    let s = &o.scheme;
    emit(out, &s.to_file_string())?;
    let bound = length_bound(o.decomposition.delta as u64);
    let stats = format!(
        "max_bits={} mean_bits={:.3} bound={bound} delta={}",
        s.max_bits(),
        s.mean_bits(),
        o.decomposition.delta
    );
    if out.is_some() {
        println!("{stats}");
    } else {
        eprintln!("{stats}");
    }
    if s.max_bits() > bound {
        return Err(Failure::Verify(anyhow!("label length {} exceeds {bound}", s.max_bits())));
    }
    Ok(())
}

fn cmd_run(path: &Path, trace: Option<&Path>, report: Option<&Path>) -> CmdResult {
    let g = read_graph(path)?;
    let opts = RunOptions { record_trace: trace.is_some(), ..RunOptions::default() };
    let (result, cap_hit) = match run_protocol_with(&g, opts) {
        Ok(r) => (r, None),
        Err(ProtocolError::RoundCap { cap, partial }) => (*partial, Some(cap)),
        Err(e @ ProtocolError::SingleNode) => return Err(Failure::Usage(anyhow!(e))),
        Err(e) => return Err(Failure::Verify(anyhow!(e))),
    };
    if let (Some(p), Some(t)) = (trace, &result.trace) {
        fs::write(p, t.to_file_string()).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut json = result.report().to_json();
    json.push('\n');
    emit(report, &json)?;
    for issue in &result.audit.issues {
        eprintln!("audit: {issue}");
    }
    if let Some(cap) = cap_hit {
        return Err(Failure::Verify(anyhow!("round cap {cap} exhausted before every node finished")));
    }
    if !result.outputs_ok() {
        let wrong = result.outputs.iter().filter(|&&o| o != Some(result.n as u64)).count();
        return Err(Failure::Verify(anyhow!("{wrong} of {} nodes did not output n", result.n)));
    }
    Ok(())
}

fn check_beta(beta: u32, max_beta: u32) -> anyhow::Result<()> {
    if max_beta > HARD_MAX_BETA {
        bail!("--max-beta above {HARD_MAX_BETA} is not supported");
    }
    if beta > max_beta {
        bail!("β = {beta} exceeds the configured maximum {max_beta}");
    }
    Ok(())
}

fn half(x: &BigUint) -> String {
    let h = x / 2u8;
    if x % 2u8 == BigUint::from(0u8) {
        h.to_string()
    } else {
        format!("{h}.5")
    }
}

fn cmd_lowerbound(what: Lowerbound) -> CmdResult {
    match what {
        Lowerbound::Patterns { beta, max_beta } => {
            check_beta(beta, max_beta)?;
            println!("{}", pattern_bound(beta));
        }
        Lowerbound::Crossover { beta, delta, max_beta } => {
            check_beta(beta, max_beta)?;
            let c = crossover(beta, delta);
            let (rel, verdict) = if c.holds { ("<", "holds") } else { ("≥", "fails") };
            println!("{} {rel} {}: {verdict}", c.bound, half(&c.delta));
            println!("least crossing Δ = {}", least_crossing_delta(beta));
        }
        Lowerbound::Lemmas { delta, rounds, trials, labelings, seed } => {
            let cfg = LemmaConfig { labelings, ..LemmaConfig::new(delta, trials, rounds, seed) };
            let rep = check_lemmas(&cfg).map_err(|e| anyhow!(e))?;
            println!("{}", rep.to_json());
            if !rep.violations.is_empty() {
                return Err(Failure::Verify(anyhow!("{} violations", rep.violations.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Gen { kind, n, delta, index, extra, seed, out } => {
            cmd_gen(kind, n, delta, index, extra, seed, out.as_deref())
        }
        Command::Oracle { graph } => cmd_oracle(&graph),
        Command::Label { graph, out } => cmd_label(&graph, out.as_deref()),
        Command::Run { graph, trace, report } => cmd_run(&graph, trace.as_deref(), report.as_deref()),
        Command::Lowerbound { what } => cmd_lowerbound(what),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(e)) => {
            eprintln!("verification failed: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
