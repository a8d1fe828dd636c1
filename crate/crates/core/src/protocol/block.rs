//! One aggregation block of a size-learning phase.
//!
//! Offsets are relative to the round just before the block, so a block
//! covers offsets `1..=tau`. Collision tags use offsets `1..=m`, a weight
//! report of weight `w` with tag id `e` uses offset `w·m + e`, and Stop goes
//! out at offset `tau = m + x·m + 1`.
//!
//! The verdict is a pure function of what a listening upper-set member saw
//! in offsets `1..tau`. The same function drives the node automaton and the
//! oracle-side forecast that decides which member finishes last.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::from_digits;
use crate::graph::{Graph, LevelDecomposition, NodeId};
use crate::labeling::{Label, Tag};
use crate::radio::{Message, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGeometry {
    /// Number of id slots, ⌊log Δ⌋ + 1.
    pub id_slots: u64,
    /// Largest weight announced for the level being aggregated.
    pub max_weight: u64,
}

/// What a given offset of a block is reserved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Collision { id: u64 },
    Weight { weight: u64, id: u64 },
    Stop,
}

impl BlockGeometry {
    pub fn tau(&self) -> u64 {
        self.id_slots + self.max_weight * self.id_slots + 1
    }

    pub fn collision_offset(&self, id: u64) -> u64 {
        id
    }

    pub fn weight_offset(&self, weight: u64, id: u64) -> u64 {
        weight * self.id_slots + id
    }

    pub fn slot(&self, offset: u64) -> Option<Slot> {
        let m = self.id_slots;
        match offset {
            0 => None,
            o if o <= m => Some(Slot::Collision { id: o }),
            o if o < self.tau() => Some(Slot::Weight { weight: (o - 1) / m, id: (o - 1) % m + 1 }),
            o if o == self.tau() => Some(Slot::Stop),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incomplete {
    Collision { offset: u64 },
    Unexpected { offset: u64 },
    NoTags,
    MalformedIds,
    Checksum { expected: u64, got: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockVerdict {
    Complete { weight: u64, children: u64 },
    Incomplete(Incomplete),
}

/// Reads a tag sequence sorted by id. Ids must be `1..k` except that the
/// last one may be any value `>= k`, and the leading bit must be 1.
fn read_number(tags: &[(u64, bool)], exact_ids: bool) -> Option<u64> {
    let k = tags.len() as u64;
    if k == 0 || !tags[0].1 {
        return None;
    }
    for (i, &(id, _)) in tags.iter().enumerate() {
        let i = i as u64 + 1;
        let ok = if i < k || exact_ids { id == i } else { id >= k };
        if !ok {
            return None;
        }
    }
    let digits: Vec<bool> = tags.iter().map(|&(_, b)| b).collect();
    from_digits(&digits)
}

/// `seen[o - 1]` is the observation at offset `o`, for `o` in `1..tau`.
pub fn evaluate_block(geom: BlockGeometry, seen: &[Observation]) -> BlockVerdict {
    use BlockVerdict::Incomplete as No;
    debug_assert_eq!(seen.len() as u64, geom.tau() - 1);
    let mut collision_tags = Vec::new();
    let mut classes: BTreeMap<u64, Vec<(u64, bool)>> = BTreeMap::new();
    for (i, obs) in seen.iter().enumerate() {
        let offset = i as u64 + 1;
        let msg = match obs {
            Observation::Silence => continue,
            Observation::Heard(msg) => msg,
            Observation::CollisionNoise | Observation::NotListening => {
                return No(Incomplete::Collision { offset })
            }
        };
        match (geom.slot(offset), msg) {
            (Some(Slot::Collision { id }), Message::CollisionTag(Tag { id: got, bit }))
                if u64::from(*got) == id =>
            {
                collision_tags.push((id, *bit));
            }
            (Some(Slot::Weight { weight, id }), Message::WeightReport { tag, weight: w })
                if *w == weight && u64::from(tag.id) == id =>
            {
                classes.entry(weight).or_default().push((id, tag.bit));
            }
            _ => return No(Incomplete::Unexpected { offset }),
        }
    }
    if collision_tags.is_empty() {
        return No(Incomplete::NoTags);
    }
    let Some(expected) = read_number(&collision_tags, false) else {
        return No(Incomplete::MalformedIds);
    };
    let mut got = 0u64;
    let mut weight = 1u64;
    for (w, tags) in &classes {
        let Some(count) = read_number(tags, true) else {
            return No(Incomplete::MalformedIds);
        };
        got = got.saturating_add(count);
        weight = weight.saturating_add(w.saturating_mul(count));
    }
    if got != expected {
        return No(Incomplete::Checksum { expected, got });
    }
    BlockVerdict::Complete { weight, children: expected }
}

/// The messages an incomplete child transmits in every block, as
/// `(offset, message)` pairs.
pub fn child_schedule(geom: BlockGeometry, label: &Label, weight: u64) -> Vec<(u64, Message)> {
    let mut out = Vec::new();
    if label.l2.id > 0 {
        out.push((geom.collision_offset(label.l2.id.into()), Message::CollisionTag(label.l2)));
    }
    if label.l3.id > 0 {
        out.push((
            geom.weight_offset(weight, label.l3.id.into()),
            Message::WeightReport { tag: label.l3, weight },
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemberCompletion {
    pub member: NodeId,
    /// 1-based block index.
    pub block: u64,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelForecast {
    /// Parallel to the level's upper set.
    pub completions: Vec<MemberCompletion>,
}

impl LevelForecast {
    /// Member finishing in the latest block; later position in the upper set
    /// wins ties.
    pub fn last_finisher(&self) -> NodeId {
        self.completions
            .iter()
            .rev()
            .max_by_key(|c| c.block)
            .map(|c| c.member)
            .expect("upper sets are nonempty")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForecastError {
    #[error("level {level}: no member completed in block {block}")]
    Stalled { level: usize, block: u64 },
}

/// Replays the blocks aggregating level `level + 1` into `US(level)`.
/// `weights` are the weights the children announce; `members` is `US(level)`.
pub fn forecast_level(
    g: &Graph,
    d: &LevelDecomposition,
    level: usize,
    members: &[NodeId],
    labels: &[Label],
    weights: &[u64],
) -> Result<LevelForecast, ForecastError> {
    let children = &d.levels[level + 1];
    let geom = BlockGeometry {
        id_slots: crate::bits::bitlen(d.delta as u64).into(),
        max_weight: children.iter().map(|&u| weights[u]).max().expect("level below exists"),
    };
    let tau = geom.tau();
    let schedules: BTreeMap<NodeId, Vec<(u64, Message)>> =
        children.iter().map(|&u| (u, child_schedule(geom, &labels[u], weights[u]))).collect();
    let mut active_child: BTreeMap<NodeId, bool> = children.iter().map(|&u| (u, true)).collect();
    let mut done: Vec<Option<MemberCompletion>> = vec![None; members.len()];

    let mut block = 0;
    while done.iter().any(Option::is_none) {
        block += 1;
        let mut stoppers = Vec::new();
        for (slot, &v) in members.iter().enumerate() {
            if done[slot].is_some() {
                continue;
            }
            let mut heard: Vec<Vec<&Message>> = vec![Vec::new(); tau as usize - 1];
            for &u in g.neighbors(v) {
                if active_child.get(&u) == Some(&true) {
                    for (offset, msg) in &schedules[&u] {
                        heard[*offset as usize - 1].push(msg);
                    }
                }
            }
            let seen: Vec<Observation> = heard
                .into_iter()
                .map(|msgs| match msgs.as_slice() {
                    [] => Observation::Silence,
                    [one] => Observation::Heard((*one).clone()),
                    _ => Observation::CollisionNoise,
                })
                .collect();
            if let BlockVerdict::Complete { weight, .. } = evaluate_block(geom, &seen) {
                done[slot] = Some(MemberCompletion { member: v, block, weight });
                stoppers.push(v);
            }
        }
        if stoppers.is_empty() {
            return Err(ForecastError::Stalled { level, block });
        }
        for v in stoppers {
            for &u in g.neighbors(v) {
                if let Some(a) = active_child.get_mut(&u) {
                    *a = false;
                }
            }
        }
    }
    Ok(LevelForecast { completions: done.into_iter().map(Option::unwrap).collect() })
}
