//! Size discovery in anonymous radio networks with collision detection.
//!
//! A centralized oracle assigns every node a short label (length grows like
//! log log Δ). With those labels alone, a deterministic per-node automaton
//! learns Δ, its BFS level and the height, then aggregates subtree weights
//! level by level until every node outputs the network size.
//!
//! The crate also hosts a lower-bound laboratory that computes node
//! histories on a family of small trees under arbitrary deterministic
//! automata and checks that equal patterns force equal root histories.

pub mod bits;
pub mod gen;
pub mod graph;
pub mod history_lab;
pub mod labeling;
pub mod protocol;
pub mod radio;
pub mod upper_set;

pub use graph::{decompose, parse_graph, Graph, GraphError, LevelDecomposition, NodeId};
pub use labeling::{assign_labels, decode_label, encode_label, Label, LabelingScheme, Tag};
pub use protocol::{run_protocol, ProtocolError, ProtocolResult, Report};
pub use upper_set::{compute_upper_sets, compute_weights, UpperSetPlan, WeightMap};
