//! Synchronous radio network with collision detection.
//!
//! In every round each node either listens or transmits one message to all
//! of its neighbors. A listener hears a message only when exactly one
//! neighbor transmits; two or more transmitting neighbors produce noise that
//! the listener can tell apart from silence. Observations of round `t` are
//! handed to the automaton when it chooses its action for round `t + 1`.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::labeling::Tag;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Message {
    WavePulse,
    DeltaLearn(Tag),
    HopValue(u64),
    CollisionTag(Tag),
    WeightReport { tag: Tag, weight: u64 },
    Stop,
    Opaque(Vec<bool>),
}

impl Message {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Message::WavePulse => "WavePulse",
            Message::DeltaLearn(_) => "DeltaLearn",
            Message::HopValue(_) => "HopValue",
            Message::CollisionTag(_) => "CollisionTag",
            Message::WeightReport { .. } => "WeightReport",
            Message::Stop => "Stop",
            Message::Opaque(_) => "Opaque",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundAction {
    Listen,
    Transmit(Message),
}

impl RoundAction {
    pub fn is_transmit(&self) -> bool {
        matches!(self, RoundAction::Transmit(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Silence,
    Heard(Message),
    CollisionNoise,
    NotListening,
}

impl Observation {
    /// Anything other than silence reached a listener.
    pub fn is_nonsilent(&self) -> bool {
        matches!(self, Observation::Heard(_) | Observation::CollisionNoise)
    }
}

impl fmt::Display for RoundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundAction::Listen => write!(f, "L"),
            RoundAction::Transmit(m) => write!(f, "T:{}", m.variant_name()),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::NotListening => write!(f, "-"),
            Observation::Silence => write!(f, "S"),
            Observation::CollisionNoise => write!(f, "C"),
            Observation::Heard(m) => write!(f, "H:{}", m.variant_name()),
        }
    }
}

/// Applies the 0 / 1 / ≥2 transmitting-neighbor rule to one round.
pub fn resolve_round(g: &Graph, actions: &[RoundAction]) -> Vec<Observation> {
    assert_eq!(actions.len(), g.n(), "one action per node");
    (0..g.n())
        .map(|v| {
            if actions[v].is_transmit() {
                return Observation::NotListening;
            }
            let mut heard = None;
            let mut count = 0;
            for &w in g.neighbors(v) {
                if let RoundAction::Transmit(m) = &actions[w] {
                    count += 1;
                    if count > 1 {
                        return Observation::CollisionNoise;
                    }
                    heard = Some(m);
                }
            }
            match heard {
                Some(m) => Observation::Heard(m.clone()),
                None => Observation::Silence,
            }
        })
        .collect()
}

/// A per-node deterministic state machine driven by the simulator.
pub trait Automaton {
    type Error: fmt::Display;

    /// Consumes the observation of the previous round (Silence before round
    /// 1) and returns the action for the current round.
    fn step(&mut self, obs: &Observation) -> Result<RoundAction, Self::Error>;

    fn is_terminal(&self) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub actions: Vec<RoundAction>,
    pub observations: Vec<Observation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimulationTrace {
    pub rounds: Vec<RoundRecord>,
}

impl SimulationTrace {
    /// One line per (round, node): `round node action observation`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for rec in &self.rounds {
            for (v, (a, o)) in rec.actions.iter().zip(&rec.observations).enumerate() {
                let _ = writeln!(out, "{} {} {} {}", rec.round, v, a, o);
            }
        }
        out
    }

    /// Re-derives every observation from the recorded actions.
    pub fn is_sound(&self, g: &Graph) -> bool {
        self.rounds.iter().all(|rec| resolve_round(g, &rec.actions) == rec.observations)
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("round {round}, node {node}: {message}")]
    Automaton { round: u64, node: NodeId, message: String },
    #[error("expected {expected} automata, got {got}")]
    AutomatonCount { expected: usize, got: usize },
}

#[derive(Debug)]
pub struct SimulationOutcome<A> {
    pub states: Vec<A>,
    /// Recorded only when requested.
    pub trace: Option<SimulationTrace>,
    pub rounds_run: u64,
    pub all_terminal: bool,
}

pub fn run<A: Automaton>(
    g: &Graph,
    automata: Vec<A>,
    max_rounds: u64,
    record: bool,
) -> Result<SimulationOutcome<A>, SimError> {
    run_observed(g, automata, max_rounds, record, |_, _, _| {})
}

/// Like [`run`], calling `observer(round, states, observations)` after each
/// round is resolved.
pub fn run_observed<A, F>(
    g: &Graph,
    mut states: Vec<A>,
    max_rounds: u64,
    record: bool,
    mut observer: F,
) -> Result<SimulationOutcome<A>, SimError>
where
    A: Automaton,
    F: FnMut(u64, &[A], &[Observation]),
{
    if states.len() != g.n() {
        return Err(SimError::AutomatonCount { expected: g.n(), got: states.len() });
    }
    let mut trace = record.then(SimulationTrace::default);
    let mut last = vec![Observation::Silence; g.n()];
    let mut rounds_run = 0;
    for round in 1..=max_rounds {
        if states.iter().all(A::is_terminal) {
            break;
        }
        let mut actions = Vec::with_capacity(g.n());
        for (node, (state, obs)) in states.iter_mut().zip(&last).enumerate() {
            let action = state
                .step(obs)
                .map_err(|e| SimError::Automaton { round, node, message: e.to_string() })?;
            actions.push(action);
        }
        let observations = resolve_round(g, &actions);
        observer(round, &states, &observations);
        if let Some(t) = trace.as_mut() {
            t.rounds.push(RoundRecord { round, actions, observations: observations.clone() });
        }
        last = observations;
        rounds_run = round;
    }
    let all_terminal = states.iter().all(A::is_terminal);
    Ok(SimulationOutcome { states, trace, rounds_run, all_terminal })
}
