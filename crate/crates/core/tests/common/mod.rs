//! Seeded instance corpus shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsd_core::gen;
use rsd_core::Graph;

pub struct Instance {
    pub name: String,
    pub graph: Graph,
}

fn inst(name: impl Into<String>, graph: Graph) -> Instance {
    Instance { name: name.into(), graph }
}

/// `trees` random trees and `graphs` random connected graphs with
/// 2 ≤ n ≤ 150 and Δ ≤ 32, plus the hand-made shapes and every family
/// member for Δ ≤ 12.
pub fn corpus(trees: u64, graphs: u64) -> Vec<Instance> {
    let mut out = vec![
        inst("k2", gen::path(2).unwrap()),
        inst("diamond", Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()),
    ];
    for n in [3, 4, 5, 8, 13, 40] {
        out.push(inst(format!("path-{n}"), gen::path(n).unwrap()));
    }
    for d in [1, 2, 3, 4, 7, 16, 32] {
        out.push(inst(format!("star-{d}"), gen::star(d).unwrap()));
    }
    for delta in 2..=12 {
        for i in delta / 2..delta {
            out.push(inst(format!("family-{delta}-{i}"), gen::family(delta, i).unwrap()));
        }
    }
    for seed in 0..trees {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=150);
        let cap = if n == 2 { 1 } else { rng.gen_range(2..=32) };
        out.push(inst(format!("tree-s{seed}-n{n}-c{cap}"), gen::random_tree(n, cap, seed).unwrap()));
    }
    for seed in 0..graphs {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + seed);
        let n = rng.gen_range(3..=150);
        let cap = rng.gen_range(2..=32);
        let extra = rng.gen_range(0..=n);
        out.push(inst(
            format!("graph-s{seed}-n{n}-c{cap}-e{extra}"),
            gen::random_graph(n, cap, extra, seed).unwrap(),
        ));
    }
    out
}
