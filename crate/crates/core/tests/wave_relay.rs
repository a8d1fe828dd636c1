//! Wave(13) along a path, relayed hop by hop by a minimal automaton.

use rsd_core::gen;
use rsd_core::protocol::wave::{wave_encode, wave_len, Pulse, WaveReceiver};
use rsd_core::radio::{run, Automaton, Message, Observation, RoundAction};

struct Relay {
    round: u64,
    receiver: WaveReceiver,
    /// (first round, bits) of the pending retransmission.
    outbox: Option<(u64, Vec<bool>)>,
    finished: Option<u64>,
}

impl Relay {
    fn new(source_value: Option<u64>) -> Self {
        Self {
            round: 0,
            receiver: WaveReceiver::new(),
            outbox: source_value.map(|x| (1, wave_encode(x).unwrap())),
            finished: source_value.map(|_| 0),
        }
    }
}

impl Automaton for Relay {
    type Error = String;

    fn step(&mut self, obs: &Observation) -> Result<RoundAction, String> {
        self.round += 1;
        if self.finished.is_none() && self.round > 1 {
            if let Some(d) = self.receiver.push(self.round - 1, Pulse::from(obs)).map_err(|e| e.to_string())? {
                self.finished = Some(d.finish_round);
                self.outbox = Some((d.finish_round + 1, wave_encode(d.value).unwrap()));
            }
        }
        let Some((start, bits)) = &self.outbox else { return Ok(RoundAction::Listen) };
        let bit = self.round.checked_sub(*start).and_then(|i| bits.get(i as usize));
        Ok(match bit {
            Some(true) => RoundAction::Transmit(Message::WavePulse),
            _ => RoundAction::Listen,
        })
    }

    fn is_terminal(&self) -> bool {
        self.outbox.as_ref().is_some_and(|(start, bits)| self.round >= start + bits.len() as u64)
    }
}

#[test]
fn wave_of_thirteen_finishes_one_length_per_hop() {
    let len = wave_len(13);
    assert_eq!(len, 10);
    let g = gen::path(6).unwrap();
    let automata: Vec<Relay> = (0..6).map(|v| Relay::new((v == 0).then_some(13))).collect();
    let out = run(&g, automata, 200, true).unwrap();
    assert!(out.all_terminal);
    assert!(out.trace.unwrap().is_sound(&g));
    for (j, s) in out.states.iter().enumerate() {
        assert_eq!(s.finished, Some(j as u64 * len), "node {j}");
    }
}
