//! The per-node automaton. It sees only its own label and the observation
//! of the previous round.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::{bitlen, from_digits};
use crate::labeling::{Label, Marker};
use crate::protocol::block::{child_schedule, evaluate_block, BlockGeometry, BlockVerdict};
use crate::protocol::timeline;
use crate::protocol::wave::{find_anchored, wave_encode, wave_len, Pulse, WaveReceiver};
use crate::radio::{Automaton, Message, Observation, RoundAction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeError {
    pub stage: &'static str,
    pub reason: String,
}

impl fmt::Display for NodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "protocol desynchronized in stage {}: {}", self.stage, self.reason)
    }
}

impl std::error::Error for NodeError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Delta,
    Height,
    PhaseWeight(usize),
    PhaseEnd(usize),
    Final,
}

/// One wave as seen by this node. `origin` is the round right before the
/// initiator's first pulse; the initiator itself records distance 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveRecord {
    pub kind: WaveKind,
    pub value: u64,
    pub origin: u64,
    pub finish: u64,
    pub distance: u64,
}

/// A learned value together with the round it became known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Learned<T> {
    pub value: T,
    pub round: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Knowledge {
    pub delta: Option<Learned<u64>>,
    pub level: Option<Learned<u64>>,
    pub height: Option<Learned<u64>>,
    pub weight: Option<Learned<u64>>,
    pub t1: Option<u64>,
    /// t2(1), t2(2), … as computed by this node.
    pub t2: Vec<u64>,
    /// Per phase: the largest weight of the level being aggregated.
    pub phase_x: Vec<u64>,
    /// Per phase: the stop round carried by the closing wave.
    pub stops: Vec<u64>,
    pub output: Option<Learned<u64>>,
    pub waves: Vec<WaveRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Next {
    Phase(usize),
    Blocks,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Role {
    Child { complete: bool },
    Member { complete: bool, window: Vec<Observation> },
    Bystander,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BlockStage {
    geom: BlockGeometry,
    t2_prime: u64,
    role: Role,
    history: Vec<Pulse>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stage {
    RootCollect { bits: Vec<bool> },
    AwaitDelta { rx: WaveReceiver },
    RootAwaitHeight,
    AwaitHeight { probe: Option<u64>, mute_until: u64, listen_from: u64, rx: WaveReceiver },
    Idle { until: u64, next: Next },
    PhaseWave { rx: WaveReceiver },
    Blocks(Box<BlockStage>),
    FinalWave { rx: WaveReceiver },
    Done,
}

impl Stage {
    fn name(&self) -> &'static str {
        match self {
            Stage::RootCollect { .. } => "parameter-learning/collect",
            Stage::AwaitDelta { .. } => "parameter-learning/delta-wave",
            Stage::RootAwaitHeight => "parameter-learning/await-height",
            Stage::AwaitHeight { .. } => "parameter-learning/height-wave",
            Stage::Idle { .. } => "idle",
            Stage::PhaseWave { .. } => "size-learning/weight-wave",
            Stage::Blocks(_) => "size-learning/blocks",
            Stage::FinalWave { .. } => "final",
            Stage::Done => "done",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    label: Label,
    round: u64,
    stage: Stage,
    outbox: BTreeMap<u64, Message>,
    hop_relayed: bool,
    phase: usize,
    pub know: Knowledge,
}

fn bitlen64(x: u64) -> u64 {
    u64::from(bitlen(x))
}

impl NodeState {
    pub fn new(label: Label) -> Self {
        let mut state = NodeState {
            label,
            round: 0,
            stage: Stage::AwaitDelta { rx: WaveReceiver::new() },
            outbox: BTreeMap::new(),
            hop_relayed: false,
            phase: 0,
            know: Knowledge::default(),
        };
        if label.has(Marker::Root) {
            state.stage = Stage::RootCollect { bits: Vec::new() };
        } else if label.has(Marker::DeltaHolder) && label.l1.id > 0 {
            state.outbox.insert(label.l1.id.into(), Message::DeltaLearn(label.l1));
        }
        state
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn stage_name(&self) -> &'static str {
        self.stage.name()
    }

    fn err(&self, reason: impl Into<String>) -> NodeError {
        NodeError { stage: self.stage.name(), reason: reason.into() }
    }

    fn schedule(&mut self, round: u64, msg: Message) -> Result<(), NodeError> {
        if round <= self.round {
            return Err(self.err(format!("transmission scheduled in the past (round {round})")));
        }
        if let Some(prev) = self.outbox.insert(round, msg) {
            return Err(self.err(format!("two transmissions scheduled for round {round} ({prev:?})")));
        }
        Ok(())
    }

    /// Pulses of Wave(x) in rounds `after + 1 ..`.
    fn schedule_wave(&mut self, after: u64, x: u64) -> Result<(), NodeError> {
        let pattern = wave_encode(x).map_err(|e| self.err(e.to_string()))?;
        for (i, on) in pattern.into_iter().enumerate() {
            if on {
                self.schedule(after + 1 + i as u64, Message::WavePulse)?;
            }
        }
        Ok(())
    }

    fn m(&self) -> u64 {
        bitlen64(self.know.delta.expect("Δ known").value)
    }

    fn h(&self) -> u64 {
        self.know.height.expect("h known").value
    }

    fn level(&self) -> u64 {
        self.know.level.expect("level known").value
    }

    fn set_weight(&mut self, value: u64, round: u64) -> Result<(), NodeError> {
        if let Some(w) = self.know.weight {
            return Err(self.err(format!("weight already set to {} in round {}", w.value, w.round)));
        }
        self.know.weight = Some(Learned { value, round });
        Ok(())
    }

    fn observe(&mut self, t: u64, obs: &Observation) -> Result<(), NodeError> {
        self.observe_stage(t, obs)?;
        // a deadline may fall on the very round a wave was decoded
        while let Stage::Idle { until, next } = self.stage {
            if until > t {
                break;
            }
            if until < t {
                return Err(self.err(format!("deadline {until} already passed")));
            }
            match next {
                Next::Phase(i) => self.enter_phase(i, t)?,
                Next::Blocks => self.enter_blocks(t)?,
                Next::Final => self.enter_final(t)?,
            }
        }
        Ok(())
    }

    fn observe_stage(&mut self, t: u64, obs: &Observation) -> Result<(), NodeError> {
        if self.label.has(Marker::HopRelay) && !self.hop_relayed {
            if let Observation::Heard(Message::HopValue(h)) = obs {
                self.hop_relayed = true;
                self.schedule(t + 1, Message::HopValue(*h))?;
            }
        }
        let pulse = Pulse::from(obs);
        match std::mem::replace(&mut self.stage, Stage::Done) {
            Stage::RootCollect { mut bits } => {
                let m = u64::from(self.label.l1.id);
                match obs {
                    Observation::Heard(Message::DeltaLearn(tag)) if u64::from(tag.id) == t => bits.push(tag.bit),
                    other => return Err(self.err(format!("expected Δ bit {t}, observed {other}"))),
                }
                if t < m {
                    self.stage = Stage::RootCollect { bits };
                    return Ok(());
                }
                let delta = from_digits(&bits).filter(|&d| d > 0 && bitlen64(d) == m);
                let Some(delta) = delta else {
                    return Err(self.err(format!("Δ bits {bits:?} do not form a {m}-bit number")));
                };
                self.know.delta = Some(Learned { value: delta, round: t });
                self.know.level = Some(Learned { value: 0, round: t });
                self.schedule_wave(t, delta)?;
                self.record(WaveKind::Delta, delta, t, timeline::delta_finish(m, 0), 0);
                self.stage = Stage::RootAwaitHeight;
            }
            Stage::AwaitDelta { mut rx } => {
                let got = rx.push(t, pulse).map_err(|e| self.err(e.to_string()))?;
                let Some(dec) = got else {
                    self.stage = Stage::AwaitDelta { rx };
                    return Ok(());
                };
                let delta = dec.value;
                let m = bitlen64(delta);
                if t <= m || !(t - m).is_multiple_of(2 * m + 2) {
                    return Err(self.err(format!("Δ wave ended in round {t}, off the level grid")));
                }
                let level = (t - m) / (2 * m + 2);
                self.know.delta = Some(Learned { value: delta, round: t });
                self.know.level = Some(Learned { value: level, round: t });
                self.record(WaveKind::Delta, delta, m, t, level);
                if self.label.has(Marker::DeepestLeader) {
                    self.know.height = Some(Learned { value: level, round: t });
                    self.schedule(t + 2 * m + 3, Message::HopValue(level))?;
                    self.stage = Stage::AwaitHeight {
                        probe: None,
                        mute_until: t + 2 * m + 3,
                        listen_from: t + 2 * m + 4,
                        rx: WaveReceiver::new(),
                    };
                } else {
                    self.schedule_wave(t, delta)?;
                    self.stage = Stage::AwaitHeight {
                        probe: Some(t + 2 * m + 3),
                        mute_until: t + 4 * m + 4,
                        listen_from: t + 2 * m + 4,
                        rx: WaveReceiver::new(),
                    };
                }
            }
            Stage::RootAwaitHeight => {
                let Observation::Heard(Message::HopValue(h)) = obs else {
                    self.stage = Stage::RootAwaitHeight;
                    return Ok(());
                };
                let (h, m) = (*h, self.m());
                if h == 0 || t != timeline::height_heard(m, h) {
                    return Err(self.err(format!("height {h} heard in round {t}")));
                }
                self.know.height = Some(Learned { value: h, round: t });
                self.schedule_wave(t, h)?;
                let t1 = timeline::t1(m, h);
                self.know.t1 = Some(t1);
                self.record(WaveKind::Height, h, t, t, 0);
                self.stage = Stage::Idle { until: t1, next: Next::Phase(1) };
            }
            Stage::AwaitHeight { mut probe, mut listen_from, mute_until, mut rx } => {
                if probe == Some(t) {
                    probe = None;
                    if pulse.is_on() {
                        listen_from = mute_until + 1;
                    }
                }
                if t < listen_from {
                    self.stage = Stage::AwaitHeight { probe, mute_until, listen_from, rx };
                    return Ok(());
                }
                let got = rx.push(t, pulse).map_err(|e| self.err(e.to_string()))?;
                let Some(dec) = got else {
                    self.stage = Stage::AwaitHeight { probe, mute_until, listen_from, rx };
                    return Ok(());
                };
                let (h, m, level) = (dec.value, self.m(), self.level());
                let origin = timeline::height_heard(m, h);
                if level > h || t != origin + level * wave_len(h) {
                    return Err(self.err(format!("height wave ({h}) ended in round {t} at level {level}")));
                }
                match self.know.height {
                    Some(known) if known.value != h => {
                        return Err(self.err(format!("height wave says {h}, expected {}", known.value)))
                    }
                    Some(_) => {}
                    None => self.know.height = Some(Learned { value: h, round: t }),
                }
                self.record(WaveKind::Height, h, origin, t, level);
                if level < h {
                    self.schedule_wave(t, h)?;
                }
                let t1 = timeline::t1(m, h);
                self.know.t1 = Some(t1);
                self.stage = Stage::Idle { until: t1, next: Next::Phase(1) };
            }
            idle @ Stage::Idle { .. } => self.stage = idle,
            Stage::PhaseWave { mut rx } => {
                let got = rx.push(t, pulse).map_err(|e| self.err(e.to_string()))?;
                let Some(dec) = got else {
                    self.stage = Stage::PhaseWave { rx };
                    return Ok(());
                };
                let (x, h) = (dec.value, self.h());
                let t2 = *self.know.t2.last().expect("phase entered");
                let len = wave_len(x);
                if !(t - t2).is_multiple_of(len) || (t - t2) / len > 2 * h {
                    return Err(self.err(format!("weight wave ({x}) ended in round {t}, t2 = {t2}")));
                }
                let d = (t - t2) / len;
                self.record(WaveKind::PhaseWeight(self.phase), x, t2, t, d);
                if d < 2 * h {
                    self.schedule_wave(t, x)?;
                }
                self.know.phase_x.push(x);
                self.stage = Stage::Idle { until: timeline::wave_deadline(t2, h, x), next: Next::Blocks };
            }
            Stage::Blocks(mut b) => {
                let done = self.block_round(t, obs, pulse, &mut b)?;
                if !done {
                    self.stage = Stage::Blocks(b);
                }
            }
            Stage::FinalWave { mut rx } => {
                let got = rx.push(t, pulse).map_err(|e| self.err(e.to_string()))?;
                let Some(dec) = got else {
                    self.stage = Stage::FinalWave { rx };
                    return Ok(());
                };
                let (n, level, h) = (dec.value, self.level(), self.h());
                let start = *self.know.t2.last().expect("final start recorded");
                if t != start + level * wave_len(n) {
                    return Err(self.err(format!("size wave ({n}) ended in round {t} at level {level}")));
                }
                self.record(WaveKind::Final, n, start, t, level);
                self.know.output = Some(Learned { value: n, round: t });
                if level < h {
                    self.schedule_wave(t, n)?;
                }
                self.stage = Stage::Done;
            }
            Stage::Done => {}
        }
        Ok(())
    }

    fn record(&mut self, kind: WaveKind, value: u64, origin: u64, finish: u64, distance: u64) {
        self.know.waves.push(WaveRecord { kind, value, origin, finish, distance });
    }

    /// Phase `i` aggregates level `h − i + 1` into level `h − i`.
    fn enter_phase(&mut self, i: usize, t2: u64) -> Result<(), NodeError> {
        let h = self.h();
        if i == 1 && self.level() == h {
            self.set_weight(1, t2)?;
        }
        self.phase = i;
        self.know.t2.push(t2);
        let lower = h - i as u64 + 1;
        if self.level() == lower && self.label.has(Marker::HeaviestOfLevel) {
            let Some(w) = self.know.weight else {
                return Err(self.err("heaviest node of the level has no weight"));
            };
            self.schedule_wave(t2, w.value)?;
            self.record(WaveKind::PhaseWeight(i), w.value, t2, t2, 0);
            self.know.phase_x.push(w.value);
            self.stage = Stage::Idle { until: timeline::wave_deadline(t2, h, w.value), next: Next::Blocks };
        } else {
            self.stage = Stage::PhaseWave { rx: WaveReceiver::new() };
        }
        Ok(())
    }

    fn enter_blocks(&mut self, t2_prime: u64) -> Result<(), NodeError> {
        let (h, level, i) = (self.h(), self.level(), self.phase as u64);
        let x = *self.know.phase_x.last().expect("weight wave decoded");
        let geom = BlockGeometry { id_slots: self.m(), max_weight: x };
        let upper = h - i;
        let role = if level == upper + 1 {
            self.schedule_block(t2_prime, geom)?;
            Role::Child { complete: false }
        } else if level == upper && self.label.has(Marker::UpperMember) {
            Role::Member { complete: false, window: Vec::with_capacity(geom.tau() as usize) }
        } else {
            if level == upper {
                self.set_weight(1, t2_prime)?;
            }
            Role::Bystander
        };
        self.stage = Stage::Blocks(Box::new(BlockStage { geom, t2_prime, role, history: Vec::new() }));
        Ok(())
    }

    fn schedule_block(&mut self, base: u64, geom: BlockGeometry) -> Result<(), NodeError> {
        let Some(w) = self.know.weight else {
            return Err(self.err("child without a weight"));
        };
        if w.value > geom.max_weight {
            return Err(self.err(format!("weight {} exceeds announced maximum {}", w.value, geom.max_weight)));
        }
        for (offset, msg) in child_schedule(geom, &self.label, w.value) {
            self.schedule(base + offset, msg)?;
        }
        Ok(())
    }

    /// Returns true once the stage has been replaced.
    fn block_round(&mut self, t: u64, obs: &Observation, pulse: Pulse, b: &mut BlockStage) -> Result<bool, NodeError> {
        let tau = b.geom.tau();
        let offset = (t - b.t2_prime - 1) % tau + 1;
        b.history.push(pulse);
        match &mut b.role {
            Role::Child { complete: false } if offset == tau => match obs {
                Observation::Heard(Message::Stop) | Observation::CollisionNoise => {
                    b.role = Role::Child { complete: true };
                }
                Observation::Silence => self.schedule_block(t, b.geom)?,
                other => return Err(self.err(format!("unexpected {other} at a block-final round"))),
            },
            Role::Child { complete: false } => {}
            Role::Member { complete: false, window } => {
                if offset < tau {
                    window.push(obs.clone());
                }
                if offset == tau - 1 {
                    let verdict = evaluate_block(b.geom, window);
                    window.clear();
                    if let BlockVerdict::Complete { weight, .. } = verdict {
                        b.role = Role::Member { complete: true, window: Vec::new() };
                        self.set_weight(weight, t)?;
                        self.schedule(t + 1, Message::Stop)?;
                        if self.label.has(Marker::PhaseCloser) {
                            let stop = t + 1;
                            self.schedule_wave(stop, stop)?;
                            self.record(WaveKind::PhaseEnd(self.phase), stop, stop, stop, 0);
                            self.finish_phase(stop);
                            return Ok(true);
                        }
                    }
                }
            }
            Role::Child { complete: true } | Role::Member { complete: true, .. } | Role::Bystander => {
                let h = self.h();
                if let Some(found) = find_anchored(&b.history, b.t2_prime, tau, 2 * h) {
                    let stop = found.value;
                    self.record(WaveKind::PhaseEnd(self.phase), stop, stop, t, found.distance);
                    if found.distance < 2 * h {
                        self.schedule_wave(t, stop)?;
                    }
                    self.finish_phase(stop);
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn finish_phase(&mut self, stop: u64) {
        let h = self.h();
        self.know.stops.push(stop);
        let until = timeline::wave_deadline(stop, h, stop);
        let next = if (self.phase as u64) < h { Next::Phase(self.phase + 1) } else { Next::Final };
        self.stage = Stage::Idle { until, next };
    }

    fn enter_final(&mut self, start: u64) -> Result<(), NodeError> {
        self.know.t2.push(start);
        if self.label.has(Marker::Root) {
            let Some(n) = self.know.weight else {
                return Err(self.err("root reached the final stage without a weight"));
            };
            self.schedule_wave(start, n.value)?;
            self.record(WaveKind::Final, n.value, start, start, 0);
            self.know.output = Some(Learned { value: n.value, round: start });
            self.stage = Stage::Done;
        } else {
            self.stage = Stage::FinalWave { rx: WaveReceiver::new() };
        }
        Ok(())
    }
}

impl Automaton for NodeState {
    type Error = NodeError;

    fn step(&mut self, obs: &Observation) -> Result<RoundAction, NodeError> {
        if self.round > 0 {
            self.observe(self.round, obs)?;
        }
        self.round += 1;
        Ok(match self.outbox.remove(&self.round) {
            Some(msg) => RoundAction::Transmit(msg),
            None => RoundAction::Listen,
        })
    }

    fn is_terminal(&self) -> bool {
        self.stage == Stage::Done && self.outbox.is_empty()
    }
}

/// Pure form of [`Automaton::step`]: the successor state and this round's action.
pub fn node_step(s: &NodeState, obs: &Observation) -> Result<(NodeState, RoundAction), NodeError> {
    let mut next = s.clone();
    let action = next.step(obs)?;
    Ok((next, action))
}
