//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::history_lab::family_tree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("n must be at least 2 (got {0})")]
    TooSmall(usize),
    #[error("a tree on {n} nodes cannot respect degree cap {cap}")]
    CapTooSmall { n: usize, cap: usize },
    #[error("Δ must be at least {min} (got {delta})")]
    DeltaTooSmall { delta: usize, min: usize },
    #[error("family index {index} outside {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },
}

fn check_tree_params(n: usize, cap: usize) -> Result<(), GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    if cap == 0 || (cap == 1 && n > 2) {
        return Err(GenError::CapTooSmall { n, cap });
    }
    Ok(())
}

fn attach_tree(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut degree = vec![0usize; n];
    let mut open: Vec<NodeId> = vec![0];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let slot = rng.gen_range(0..open.len());
        let u = open[slot];
        edges.push((u, v));
        degree[u] += 1;
        degree[v] += 1;
        if degree[u] == cap {
            open.swap_remove(slot);
        }
        if degree[v] < cap {
            open.push(v);
        }
    }
    edges
}

/// Uniform attachment: node `v` joins a uniformly chosen earlier node whose
/// degree is still below `cap`.
pub fn random_tree(n: usize, cap: usize, seed: u64) -> Result<Graph, GenError> {
    check_tree_params(n, cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = attach_tree(n, cap, &mut rng);
    Ok(Graph::from_edges(n, &edges).expect("trees are valid graphs"))
}

/// A random spanning tree plus up to `extra` further edges, all under the
/// degree cap.
pub fn random_graph(n: usize, cap: usize, extra: usize, seed: u64) -> Result<Graph, GenError> {
    check_tree_params(n, cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = attach_tree(n, cap, &mut rng);
    let mut degree = vec![0usize; n];
    let mut present = std::collections::BTreeSet::new();
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
        present.insert((u.min(v), u.max(v)));
    }
    let mut added = 0;
    for _ in 0..extra * 20 {
        if added == extra {
            break;
        }
        let mut pick: Vec<NodeId> = (0..n).filter(|&v| degree[v] < cap).collect();
        if pick.len() < 2 {
            break;
        }
        pick.shuffle(&mut rng);
        let (u, v) = (pick[0].min(pick[1]), pick[0].max(pick[1]));
        if present.insert((u, v)) {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
            added += 1;
        }
    }
    Ok(Graph::from_edges(n, &edges).expect("generated edges are simple"))
}

/// K₁,Δ with the center at node 0.
pub fn star(delta: usize) -> Result<Graph, GenError> {
    if delta < 1 {
        return Err(GenError::DeltaTooSmall { delta, min: 1 });
    }
    let edges: Vec<_> = (1..=delta).map(|v| (0, v)).collect();
    Ok(Graph::from_edges(delta + 1, &edges).expect("stars are valid"))
}

/// K₁,Δ with `extra_nodes` further nodes hung below random leaves and up to
/// `extra_edges` random edges among non-center nodes. Max degree stays Δ.
pub fn hub_graph(delta: usize, extra_nodes: usize, extra_edges: usize, seed: u64) -> Result<Graph, GenError> {
    if delta < 2 {
        return Err(GenError::DeltaTooSmall { delta, min: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = delta + 1 + extra_nodes;
    let mut degree = vec![0usize; n];
    let mut present = std::collections::BTreeSet::new();
    let add = |u: NodeId, v: NodeId, degree: &mut [usize], present: &mut std::collections::BTreeSet<_>| {
        degree[u] += 1;
        degree[v] += 1;
        present.insert((u.min(v), u.max(v)));
    };
    for v in 1..=delta {
        add(0, v, &mut degree, &mut present);
    }
    for v in delta + 1..n {
        let u = loop {
            let u = rng.gen_range(1..v);
            if degree[u] < delta {
                break u;
            }
        };
        add(u, v, &mut degree, &mut present);
    }
    let mut added = 0;
    for _ in 0..extra_edges * 20 {
        if added == extra_edges {
            break;
        }
        let (u, v) = (rng.gen_range(1..n), rng.gen_range(1..n));
        let key = (u.min(v), u.max(v));
        if u == v || degree[u] >= delta || degree[v] >= delta || present.contains(&key) {
            continue;
        }
        add(u, v, &mut degree, &mut present);
        added += 1;
    }
    let edges: Vec<_> = present.into_iter().collect();
    Ok(Graph::from_edges(n, &edges).expect("generated edges are simple"))
}

pub fn path(n: usize) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Ok(Graph::from_edges(n, &edges).expect("paths are valid"))
}

/// Member `index` of the lower-bound family for `delta`.
pub fn family(delta: usize, index: usize) -> Result<Graph, GenError> {
    if delta < 2 {
        return Err(GenError::DeltaTooSmall { delta, min: 2 });
    }
    let (lo, hi) = (delta / 2, delta - 1);
    if !(lo..=hi).contains(&index) {
        return Err(GenError::IndexOutOfRange { index, lo, hi });
    }
    Ok(family_tree(delta, index).graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_is_deterministic_and_capped() {
        let a = random_tree(50, 8, 7).unwrap();
        let b = random_tree(50, 8, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges().len(), 49);
        assert!(a.max_degree() <= 8);
        assert_ne!(a, random_tree(50, 8, 8).unwrap());
    }

    #[test]
    fn graph_respects_cap() {
        for seed in 0..20 {
            let g = random_graph(40, 4, 30, seed).unwrap();
            assert!(g.max_degree() <= 4);
            assert!(g.edges().len() >= 39);
        }
    }

    #[test]
    fn hub_keeps_its_degree() {
        let g = hub_graph(16, 40, 30, 5).unwrap();
        assert_eq!(g.max_degree(), 16);
        assert_eq!(g.degree(0), 16);
        assert_eq!(g.n(), 57);
    }

    #[test]
    fn infeasible_parameters() {
        assert_eq!(random_tree(1, 3, 0), Err(GenError::TooSmall(1)));
        assert_eq!(random_tree(3, 1, 0), Err(GenError::CapTooSmall { n: 3, cap: 1 }));
        assert!(random_tree(2, 1, 0).is_ok());
        assert!(star(0).is_err());
        assert!(family(4, 1).is_err());
    }

    #[test]
    fn family_member_size() {
        let g = family(4, 3).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.max_degree(), 4);
    }
}
