//! Simple undirected graphs, the graph file format, and the BFS level
//! decomposition rooted at a maximum-degree node.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: NodeId },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: NodeId, v: NodeId },
    #[error("line {line}: node id {id} out of range for n = {n}")]
    OutOfRange { line: usize, id: usize, n: usize },
    #[error("graph is disconnected (node {unreached} unreachable from node 0)")]
    Disconnected { unreached: NodeId },
    #[error("graph must have at least one node")]
    Empty,
}

/// A validated simple, connected, undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds and validates a graph from an edge list. Errors carry line 0
    /// since there is no source text.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut builder = Builder::new(n)?;
        for &(u, v) in edges {
            builder.add(u, v, 0)?;
        }
        builder.finish()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// BFS distances from `src`.
    pub fn distances_from(&self, src: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Diameter by all-pairs BFS.
    pub fn diameter(&self) -> usize {
        (0..self.n)
            .map(|v| self.distances_from(v).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Serializes in the graph file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

struct Builder {
    n: usize,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl Builder {
    fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Self { n, edges: BTreeSet::new() })
    }

    fn add(&mut self, u: usize, v: usize, line: usize) -> Result<(), GraphError> {
        for id in [u, v] {
            if id >= self.n {
                return Err(GraphError::OutOfRange { line, id, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, node: u });
        }
        if !self.edges.insert((u.min(v), u.max(v))) {
            return Err(GraphError::DuplicateEdge { line, u, v });
        }
        Ok(())
    }

    fn finish(self) -> Result<Graph, GraphError> {
        let mut adjacency = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Graph { n: self.n, edges: self.edges.into_iter().collect(), adjacency };
        if let Some(unreached) = graph.distances_from(0).iter().position(|&d| d == usize::MAX) {
            return Err(GraphError::Disconnected { unreached });
        }
        Ok(graph)
    }
}

/// Parses the text graph format: optional `#` comment lines, a header
/// `n m`, then exactly `m` edge lines `u v`.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or(GraphError::Malformed { line: 0, reason: "missing header".into() })?;
    let [n, m] = parse_pair(header, header_line)?;
    let mut builder = Builder::new(n)?;
    let mut seen = 0;
    for (line, text) in lines {
        if seen == m {
            return Err(GraphError::Malformed { line, reason: format!("more than {m} edge lines") });
        }
        let [u, v] = parse_pair(text, line)?;
        builder.add(u, v, line)?;
        seen += 1;
    }
    if seen < m {
        return Err(GraphError::Malformed {
            line: text.lines().count(),
            reason: format!("expected {m} edges, found {seen}"),
        });
    }
    builder.finish()
}

fn parse_pair(text: &str, line: usize) -> Result<[usize; 2], GraphError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Malformed { line, reason: format!("expected two integers, got {:?}", text) });
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| GraphError::Malformed { line, reason: format!("not a nonnegative integer: {s:?}") })
    };
    Ok([parse(fields[0])?, parse(fields[1])?])
}

/// BFS layering from the chosen root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDecomposition {
    pub root: NodeId,
    pub level: Vec<usize>,
    pub h: usize,
    pub levels: Vec<Vec<NodeId>>,
    pub delta: usize,
}

impl LevelDecomposition {
    /// Neighbors of `v` one level deeper, ascending.
    pub fn lower_neighbors(&self, g: &Graph, v: NodeId) -> Vec<NodeId> {
        let next = self.level[v] + 1;
        g.neighbors(v).iter().copied().filter(|&u| self.level[u] == next).collect()
    }
}

/// Root = lowest-id node of maximum degree; levels are BFS distances.
pub fn decompose(g: &Graph) -> LevelDecomposition {
    let delta = g.max_degree();
    let root = (0..g.n()).find(|&v| g.degree(v) == delta).expect("nonempty graph");
    let level = g.distances_from(root);
    let h = level.iter().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); h + 1];
    for (v, &l) in level.iter().enumerate() {
        levels[l].push(v);
    }
    LevelDecomposition { root, level, h, levels, delta }
}
