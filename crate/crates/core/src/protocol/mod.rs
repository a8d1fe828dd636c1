//! The size-discovery protocol: parameter learning, level-by-level weight
//! aggregation, and the final broadcast of n.

pub mod block;
pub mod node;
pub mod run;
pub mod timeline;
pub mod wave;

pub use node::{node_step, Knowledge, NodeError, NodeState};
pub use run::{oracle, round_cap, run_protocol, run_protocol_with, Oracle, ProtocolError, ProtocolResult, Report, RunOptions};
pub use timeline::{compute_timeline, Timeline};
pub use wave::{wave_decode, wave_encode};
