//! Node histories under an arbitrary deterministic automaton.
//!
//! A history is either a bare label (round 0) or a previous history
//! extended by what happened in one round: silence or own transmission
//! (`Lambda`), a collision (`Star`), or the full history of the single
//! transmitting neighbor (`Sub`). Histories are hash-consed in an arena, so
//! two histories are structurally equal exactly when their ids are equal.

use std::collections::HashMap;

use crate::graph::Graph;

pub type LabLabel = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistoryId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Lambda,
    Star,
    Sub(HistoryId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HistNode {
    Leaf(LabLabel),
    Node(HistoryId, Event),
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Default)]
pub struct HistoryArena {
    nodes: Vec<HistNode>,
    digests: Vec<u64>,
    depths: Vec<u32>,
    index: HashMap<HistNode, HistoryId>,
}

impl HistoryArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, node: HistNode) -> HistoryId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let (digest, depth) = match node {
            HistNode::Leaf(l) => (mix64(u64::from(l) ^ 0x4C45_4146), 0),
            HistNode::Node(prev, ev) => {
                let tail = match ev {
                    Event::Lambda => 0x4C41_4D42,
                    Event::Star => 0x5354_4152,
                    Event::Sub(x) => mix64(self.digest(x) ^ 0x5355_4221),
                };
                (mix64(self.digest(prev).rotate_left(17) ^ tail), self.depth(prev) + 1)
            }
        };
        let id = HistoryId(u32::try_from(self.nodes.len()).expect("arena below 2³² entries"));
        self.nodes.push(node);
        self.digests.push(digest);
        self.depths.push(depth);
        self.index.insert(node, id);
        id
    }

    pub fn leaf(&mut self, label: LabLabel) -> HistoryId {
        self.intern(HistNode::Leaf(label))
    }

    pub fn extend(&mut self, prev: HistoryId, ev: Event) -> HistoryId {
        self.intern(HistNode::Node(prev, ev))
    }

    pub fn get(&self, id: HistoryId) -> HistNode {
        self.nodes[id.0 as usize]
    }

    /// Structural digest; independent of interning order.
    pub fn digest(&self, id: HistoryId) -> u64 {
        self.digests[id.0 as usize]
    }

    /// Number of rounds recorded.
    pub fn depth(&self, id: HistoryId) -> u32 {
        self.depths[id.0 as usize]
    }

    /// Full structural comparison, for cross-checking id equality.
    pub fn structurally_equal(&self, a: HistoryId, b: HistoryId) -> bool {
        match (self.get(a), self.get(b)) {
            (HistNode::Leaf(x), HistNode::Leaf(y)) => x == y,
            (HistNode::Node(pa, ea), HistNode::Node(pb, eb)) => {
                let events = match (ea, eb) {
                    (Event::Lambda, Event::Lambda) | (Event::Star, Event::Star) => true,
                    (Event::Sub(x), Event::Sub(y)) => self.structurally_equal(x, y),
                    _ => false,
                };
                events && self.structurally_equal(pa, pb)
            }
            _ => false,
        }
    }
}

/// A deterministic map from histories to "transmit?".
pub trait HistoryAutomaton {
    fn transmits(&self, arena: &HistoryArena, h: HistoryId) -> bool;
}

impl<F: Fn(&HistoryArena, HistoryId) -> bool> HistoryAutomaton for F {
    fn transmits(&self, arena: &HistoryArena, h: HistoryId) -> bool {
        self(arena, h)
    }
}

/// Transmits iff a seeded hash of the history digest falls below a seeded
/// threshold. Fixing the seed makes it a pure function of the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigestAutomaton {
    pub seed: u64,
    /// Out of 1024.
    pub threshold: u64,
}

impl DigestAutomaton {
    /// Transmission rate drawn from [1/8, 5/8).
    pub fn from_seed(seed: u64) -> Self {
        Self { seed, threshold: 128 + mix64(seed ^ 0x7468_7265) % 512 }
    }
}

impl HistoryAutomaton for DigestAutomaton {
    fn transmits(&self, arena: &HistoryArena, h: HistoryId) -> bool {
        mix64(arena.digest(h) ^ self.seed) % 1024 < self.threshold
    }
}

/// `out[t][v]` is H(v, t) for `t` in `0..=rounds`.
pub fn compute_histories<A: HistoryAutomaton + ?Sized>(
    g: &Graph,
    labels: &[LabLabel],
    automaton: &A,
    rounds: usize,
    arena: &mut HistoryArena,
) -> Vec<Vec<HistoryId>> {
    assert_eq!(labels.len(), g.n(), "labeling must be total");
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(labels.iter().map(|&l| arena.leaf(l)).collect::<Vec<_>>());
    for _ in 0..rounds {
        let cur = out.last().expect("nonempty");
        let sending: Vec<bool> = cur.iter().map(|&h| automaton.transmits(arena, h)).collect();
        let next = (0..g.n())
            .map(|v| {
                let ev = if sending[v] {
                    Event::Lambda
                } else {
                    let mut senders = g.neighbors(v).iter().filter(|&&u| sending[u]);
                    match (senders.next(), senders.next()) {
                        (None, _) => Event::Lambda,
                        (Some(&u), None) => Event::Sub(cur[u]),
                        (Some(_), Some(_)) => Event::Star,
                    }
                };
                (cur[v], ev)
            })
            .collect::<Vec<_>>();
        out.push(next.into_iter().map(|(prev, ev)| arena.extend(prev, ev)).collect());
    }
    out
}
