//! The tree family: a star K₁,Δ with center `r`, one leaf `a` of which
//! gets `i` extra leaves.

use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTree {
    pub delta: usize,
    pub index: usize,
    pub graph: Graph,
    pub root: NodeId,
    pub a: NodeId,
    /// Leaves of `r` other than `a`.
    pub r_leaves: Vec<NodeId>,
    /// Leaves hanging off `a`.
    pub a_leaves: Vec<NodeId>,
}

impl FamilyTree {
    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("the tree family needs Δ ≥ 2 (got {0})")]
    DeltaTooSmall(usize),
}

/// Node 0 is `r`, node 1 is `a`, nodes `2..=Δ` are the other leaves of `r`
/// and nodes `Δ+1..=Δ+i` hang off `a`.
pub fn family_tree(delta: usize, index: usize) -> FamilyTree {
    assert!(delta >= 2 && index >= 1 && index < delta);
    let r_leaves: Vec<NodeId> = (2..=delta).collect();
    let a_leaves: Vec<NodeId> = (delta + 1..=delta + index).collect();
    let mut edges = vec![(0, 1)];
    edges.extend(r_leaves.iter().map(|&v| (0, v)));
    edges.extend(a_leaves.iter().map(|&v| (1, v)));
    let graph = Graph::from_edges(delta + index + 1, &edges).expect("family trees are valid");
    FamilyTree { delta, index, graph, root: 0, a: 1, r_leaves, a_leaves }
}

/// All members `T_i`, `⌊Δ/2⌋ ≤ i ≤ Δ − 1`.
pub fn build_family(delta: usize) -> Result<Vec<FamilyTree>, FamilyError> {
    if delta < 2 {
        return Err(FamilyError::DeltaTooSmall(delta));
    }
    Ok((delta / 2..delta).map(|i| family_tree(delta, i)).collect())
}
