use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const DIAMOND: &str = "4 4\n0 1\n0 2\n1 3\n2 3\n";

#[test]
fn gen_star_and_family() {
    let o = rsd(&["gen", "--kind", "star", "--delta", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5 4\n0 1\n0 2\n0 3\n0 4\n");

    let o = rsd(&["gen", "--kind", "family", "--delta", "4", "--index", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("8 7\n"));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let args = ["gen", "--kind", "tree", "--n", "50", "--delta", "8", "--seed", "7"];
    let (a, b) = (rsd(&args), rsd(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = rsd(&["gen", "--kind", "tree", "--n", "50", "--delta", "8", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_rejects_infeasible_parameters() {
    assert_eq!(rsd(&["gen", "--kind", "tree", "--n", "1", "--delta", "3"]).status.code(), Some(2));
    assert_eq!(rsd(&["gen", "--kind", "tree", "--n", "5", "--delta", "1"]).status.code(), Some(2));
    assert_eq!(rsd(&["gen", "--kind", "family", "--delta", "4", "--index", "1"]).status.code(), Some(2));
    assert_eq!(rsd(&["gen", "--kind", "graph", "--delta", "4"]).status.code(), Some(2));
}

#[test]
fn oracle_reports_plan() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "diamond.txt", DIAMOND);
    let o = rsd(&["oracle", &g]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["weights"][0], 4);
    assert_eq!(v["upper_sets"][1]["members"], serde_json::json!([1]));

    let p3 = write(&dir, "p3.txt", "3 2\n0 1\n1 2\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&rsd(&["oracle", &p3]))).unwrap();
    assert_eq!((v["h"].as_u64(), v["n"].as_u64()), (Some(1), Some(3)));
}

#[test]
fn label_writes_file_and_stats() {
    let dir = TempDir::new().unwrap();
    let k2 = write(&dir, "k2.txt", "2 1\n0 1\n");
    let out = dir.path().join("labels.txt");
    let o = rsd(&["label", &k2, "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    let max = text.lines().map(|l| l.split_whitespace().last().unwrap().len()).max().unwrap();
    assert!(max <= 22);
    assert!(stdout(&o).contains(&format!("max_bits={max}")));
}

#[test]
fn big_star_labels_stay_within_bound() {
    let dir = TempDir::new().unwrap();
    let star = dir.path().join("star.txt");
    assert!(rsd(&["gen", "--kind", "star", "--delta", "65536", "-o", star.to_str().unwrap()]).status.success());
    let o = rsd(&["label", star.to_str().unwrap(), "-o", dir.path().join("l.txt").to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("bound=46"), "{s}");
    let bits: usize = s.split_whitespace().find_map(|t| t.strip_prefix("max_bits=")).unwrap().parse().unwrap();
    assert!(bits <= 46);
}

#[test]
fn run_diamond_with_trace_and_report() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "diamond.txt", DIAMOND);
    let trace = dir.path().join("trace.txt");
    let report = dir.path().join("report.json");
    let o = rsd(&["run", &g, "--trace", trace.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["outputs_ok"], true);
    assert!(v["bound_Dn2logDelta"].as_u64() >= v["rounds_used"].as_u64());
    let rounds = v["rounds_used"].as_u64().unwrap() as usize;
    let t = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().count(), rounds * 4);
    assert!(t.starts_with("1 0 "));
}

#[test]
fn run_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "diamond.txt", DIAMOND);
    assert_eq!(rsd(&["run", &g]).stdout, rsd(&["run", &g]).stdout);
}

#[test]
fn run_rejects_single_node_and_bad_files() {
    let dir = TempDir::new().unwrap();
    assert_eq!(rsd(&["run", &write(&dir, "one.txt", "1 0\n")]).status.code(), Some(2));
    assert_eq!(rsd(&["run", &write(&dir, "loop.txt", "3 3\n0 1\n1 1\n0 2\n")]).status.code(), Some(2));
    assert_eq!(rsd(&["run", &write(&dir, "split.txt", "4 2\n0 1\n2 3\n")]).status.code(), Some(2));
    assert_eq!(rsd(&["run", "/nonexistent/graph.txt"]).status.code(), Some(2));
}

#[test]
fn round_cap_exhaustion_is_a_verification_failure() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "diamond.txt", DIAMOND);
    let o = Command::new(env!("CARGO_BIN_EXE_rsd"))
        .args(["run", &g])
        .env("RSD_ROUND_CAP_MULTIPLIER", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("round cap"));
}

#[test]
fn hundred_seeded_trees_all_succeed() {
    let dir = TempDir::new().unwrap();
    for seed in 0..100u64 {
        let n = (2 + seed * 7 % 40).to_string();
        let cap = (2 + seed % 6).to_string();
        let path = dir.path().join(format!("t{seed}.txt"));
        let p = path.to_str().unwrap();
        let o = rsd(&["gen", "--kind", "tree", "--n", &n, "--delta", &cap, "--seed", &seed.to_string(), "-o", p]);
        assert!(o.status.success());
        let o = rsd(&["run", p]);
        assert!(o.status.success(), "seed {seed}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(Path::new(p).exists());
    }
}

#[test]
fn lowerbound_commands() {
    assert_eq!(stdout(&rsd(&["lowerbound", "patterns", "--beta", "1"])).trim(), "104976");
    assert_eq!(stdout(&rsd(&["lowerbound", "patterns", "--beta", "0"])).trim(), "324");
    assert_eq!(rsd(&["lowerbound", "patterns", "--beta", "17"]).status.code(), Some(2));

    let o = rsd(&["lowerbound", "crossover", "--beta", "0", "--delta", "1000"]);
    assert!(stdout(&o).starts_with("324 < 500: holds"));
    let o = rsd(&["lowerbound", "crossover", "--beta", "0", "--delta", "647"]);
    assert!(stdout(&o).starts_with("324 ≥ 323.5: fails"));

    let o = rsd(&["lowerbound", "lemmas", "--delta", "6", "--rounds", "100", "--trials", "50", "--seed", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"], serde_json::json!([]));
    assert_eq!(v["delta"], 6);
}
