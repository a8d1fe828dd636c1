//! The oracle's labels: seven role markers plus three (id, bit) tags, and
//! their self-delimiting binary encoding.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{binary_digits, bitlen, from_digits, nth_msb};
use crate::graph::{Graph, LevelDecomposition, NodeId};
use crate::protocol::block::{forecast_level, ForecastError, LevelForecast};
use crate::upper_set::{UpperSetPlan, WeightMap};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag {
    /// 0 means the tag is unused.
    pub id: u32,
    pub bit: bool,
}

impl Tag {
    pub fn new(id: u32, bit: bool) -> Self {
        Self { id, bit }
    }
}

/// Role markers, in encoding order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Root = 0,
    DeepestLeader = 1,
    DeltaHolder = 2,
    HopRelay = 3,
    UpperMember = 4,
    PhaseCloser = 5,
    HeaviestOfLevel = 6,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Label {
    pub markers: [bool; 7],
    /// Δ-learning tag.
    pub l1: Tag,
    /// Collision tag.
    pub l2: Tag,
    /// Weight-transmission tag.
    pub l3: Tag,
}

impl Label {
    pub fn has(&self, m: Marker) -> bool {
        self.markers[m as usize]
    }

    fn set(&mut self, m: Marker) {
        self.markers[m as usize] = true;
    }

    pub fn marker_string(&self) -> String {
        self.markers.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingScheme {
    pub labels: Vec<Label>,
    pub encoded: Vec<Vec<bool>>,
    /// Block-by-block replay of every phase, one entry per upper-set level.
    pub forecasts: Vec<Result<LevelForecast, ForecastError>>,
}

impl LabelingScheme {
    pub fn max_bits(&self) -> usize {
        self.encoded.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn mean_bits(&self) -> f64 {
        if self.encoded.is_empty() {
            return 0.0;
        }
        self.encoded.iter().map(Vec::len).sum::<usize>() as f64 / self.encoded.len() as f64
    }

    /// Labels file: `node markers l1.id l1.bit l2.id l2.bit l3.id l3.bit encoded`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (v, (lbl, enc)) in self.labels.iter().zip(&self.encoded).enumerate() {
            let bits: String = enc.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(
                out,
                "{v} {} {} {} {} {} {} {} {bits}",
                lbl.marker_string(),
                lbl.l1.id,
                lbl.l1.bit as u8,
                lbl.l2.id,
                lbl.l2.bit as u8,
                lbl.l3.id,
                lbl.l3.bit as u8,
            );
        }
        out
    }
}

/// The repository's concrete length promise: 16 + 6·bitlen(bitlen(Δ)).
pub fn length_bound(delta: u64) -> usize {
    16 + 6 * bitlen(u64::from(bitlen(delta))) as usize
}

/// Path from `from` to `to` along shortest paths, taking the smallest-id
/// admissible next hop at each step.
fn canonical_path(g: &Graph, from: NodeId, to: NodeId) -> Vec<NodeId> {
    let dist = g.distances_from(to);
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        cur = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&u| dist[u] + 1 == dist[cur])
            .expect("connected graph");
        path.push(cur);
    }
    path
}

pub fn assign_labels(g: &Graph, d: &LevelDecomposition, plan: &UpperSetPlan, w: &WeightMap) -> LabelingScheme {
    assert!(d.h >= 1, "labels need at least two levels");
    let mut labels = vec![Label::default(); g.n()];
    let r = d.root;
    let delta = d.delta as u64;
    let m = bitlen(delta);

    labels[r].set(Marker::Root);
    let deepest = d.levels[d.h][0];
    labels[deepest].set(Marker::DeepestLeader);

    for (i, &u) in g.neighbors(r).iter().take(m as usize).enumerate() {
        labels[u].set(Marker::DeltaHolder);
        labels[u].l1 = Tag::new(i as u32 + 1, nth_msb(delta, i + 1));
    }
    labels[r].l1 = Tag::new(m, false);

    let path = canonical_path(g, r, deepest);
    for &u in &path[1..path.len() - 1] {
        labels[u].set(Marker::HopRelay);
    }

    for level in &plan.levels {
        for (&v, children) in level.members.iter().zip(&level.private_children) {
            labels[v].set(Marker::UpperMember);
            let size = children.len() as u64;
            let ids = &plan.id_set[v];
            for &u in &plan.tagged_children[v] {
                let id = plan.child_id[u];
                let rank = ids.iter().position(|&x| x == id).expect("child id in ID(v)") + 1;
                labels[u].l2 = Tag::new(id, nth_msb(size, rank));
            }
            let mut by_weight: Vec<(u64, NodeId)> = children.iter().map(|&u| (w.weight[u], u)).collect();
            by_weight.sort_unstable();
            for class in by_weight.chunk_by(|a, b| a.0 == b.0) {
                let q = class.len() as u64;
                for (j, &(_, u)) in class.iter().take(bitlen(q) as usize).enumerate() {
                    labels[u].l3 = Tag::new(j as u32 + 1, nth_msb(q, j + 1));
                }
            }
        }
    }

    for l in 1..=d.h {
        let heaviest = d.levels[l]
            .iter()
            .copied()
            .max_by_key(|&u| (w.weight[u], std::cmp::Reverse(u)))
            .expect("levels are nonempty");
        labels[heaviest].set(Marker::HeaviestOfLevel);
    }

    let mut forecasts = Vec::with_capacity(plan.levels.len());
    for (l, level) in plan.levels.iter().enumerate() {
        let forecast = forecast_level(g, d, l, &level.members, &labels, &w.weight);
        let closer = match &forecast {
            Ok(f) => f.last_finisher(),
            Err(_) => *level.members.last().expect("nonempty upper set"),
        };
        labels[closer].set(Marker::PhaseCloser);
        forecasts.push(forecast);
    }

    let encoded = labels.iter().map(encode_label).collect();
    LabelingScheme { labels, encoded, forecasts }
}

pub fn encode_label(lbl: &Label) -> Vec<bool> {
    let mut out = lbl.markers.to_vec();
    for tag in [lbl.l1, lbl.l2, lbl.l3] {
        let id_bits = if tag.id == 0 { Vec::new() } else { binary_digits(tag.id.into()) };
        out.extend(std::iter::repeat_n(false, id_bits.len()));
        out.push(true);
        out.extend(id_bits);
        out.push(tag.bit);
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label truncated at bit {0}")]
    Truncated(usize),
    #[error("malformed label at bit {at}: {reason}")]
    Malformed { at: usize, reason: &'static str },
}

pub fn decode_label(bits: &[bool]) -> Result<Label, LabelError> {
    let mut pos = 0;
    let mut take = |n: usize| -> Result<&[bool], LabelError> {
        let s = bits.get(pos..pos + n).ok_or(LabelError::Truncated(bits.len()))?;
        pos += n;
        Ok(s)
    };
    let mut lbl = Label::default();
    lbl.markers.copy_from_slice(take(7)?);
    for slot in 0..3 {
        let mut len = 0;
        while !take(1)?[0] {
            len += 1;
        }
        if len > 32 {
            return Err(LabelError::Malformed { at: 7, reason: "id longer than 32 bits" });
        }
        let id_bits = take(len)?;
        if len > 0 && !id_bits[0] {
            return Err(LabelError::Malformed { at: 7, reason: "id with leading zero" });
        }
        let id = from_digits(id_bits).expect("at most 32 bits") as u32;
        let tag = Tag::new(id, take(1)?[0]);
        match slot {
            0 => lbl.l1 = tag,
            1 => lbl.l2 = tag,
            _ => lbl.l3 = tag,
        }
    }
    if pos != bits.len() {
        return Err(LabelError::Malformed { at: pos, reason: "trailing bits" });
    }
    Ok(lbl)
}
