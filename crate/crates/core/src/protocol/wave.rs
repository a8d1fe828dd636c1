//! Bit-serial flooding of an integer.
//!
//! `x` is sent as the pulse schedule p*: every 1 bit of binary(x) becomes
//! `10`, every 0 bit becomes `00`, and `11` terminates. A listener treats any
//! non-silent round (a clean pulse or a collision) as a 1.

use thiserror::Error;

use crate::bits::{binary_digits, bitlen, from_digits};
use crate::radio::{Message, Observation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WaveError {
    #[error("cannot send 0 as a wave")]
    Zero,
    #[error("malformed wave: pair {pair} is 01")]
    Malformed { pair: usize },
    #[error("wave pattern has no terminator")]
    Unterminated,
    #[error("wave value does not fit in 64 bits")]
    Overflow,
}

pub fn wave_encode(x: u64) -> Result<Vec<bool>, WaveError> {
    if x == 0 {
        return Err(WaveError::Zero);
    }
    let mut out = Vec::with_capacity(2 * bitlen(x) as usize + 2);
    for b in binary_digits(x) {
        out.extend([b, false]);
    }
    out.extend([true, true]);
    Ok(out)
}

/// Length of the pulse schedule for `x`, 2·bitlen(x) + 2.
pub fn wave_len(x: u64) -> u64 {
    2 * u64::from(bitlen(x)) + 2
}

/// Decodes up to the first `11` pair. Leading `00` pairs are leading zeros.
pub fn wave_decode(pattern: &[bool]) -> Result<u64, WaveError> {
    let mut digits = Vec::new();
    for (pair, chunk) in pattern.chunks(2).enumerate() {
        match *chunk {
            [true, true] => {
                let x = from_digits(&digits).ok_or(WaveError::Overflow)?;
                return if x == 0 { Err(WaveError::Zero) } else { Ok(x) };
            }
            [b, false] => digits.push(b),
            [false, true] => return Err(WaveError::Malformed { pair }),
            _ => return Err(WaveError::Unterminated),
        }
    }
    Err(WaveError::Unterminated)
}

/// What one round contributes to a wave listener.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pulse {
    Quiet,
    Clean,
    Noise,
}

impl Pulse {
    pub fn is_on(self) -> bool {
        self != Pulse::Quiet
    }
}

impl From<&Observation> for Pulse {
    fn from(obs: &Observation) -> Self {
        match obs {
            Observation::Heard(Message::WavePulse) => Pulse::Clean,
            Observation::CollisionNoise => Pulse::Noise,
            _ => Pulse::Quiet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub value: u64,
    /// Round of the first pulse.
    pub first_round: u64,
    /// Round of the terminator's second pulse.
    pub finish_round: u64,
}

/// Streaming decoder: idle until the first pulse, then reads pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WaveReceiver {
    first_round: Option<u64>,
    pending: Option<bool>,
    digits: Vec<bool>,
}

impl WaveReceiver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, round: u64, pulse: Pulse) -> Result<Option<Decoded>, WaveError> {
        let on = pulse.is_on();
        let Some(first_round) = self.first_round else {
            if on {
                self.first_round = Some(round);
                self.pending = Some(true);
            }
            return Ok(None);
        };
        let Some(first) = self.pending.take() else {
            self.pending = Some(on);
            return Ok(None);
        };
        match (first, on) {
            (true, true) => {
                let value = from_digits(&self.digits).ok_or(WaveError::Overflow)?;
                if value == 0 {
                    return Err(WaveError::Zero);
                }
                Ok(Some(Decoded { value, first_round, finish_round: round }))
            }
            (b, false) => {
                self.digits.push(b);
                Ok(None)
            }
            (false, true) => Err(WaveError::Malformed { pair: self.digits.len() }),
        }
    }
}

/// A wave announcing a block-final round `T`, found inside a noisy record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchoredWave {
    pub value: u64,
    pub first_round: u64,
    pub distance: u64,
}

/// Looks for a wave carrying a stop round that ends at the last entry of
/// `history` (`history[i]` is round `origin + 1 + i`). The decoded value
/// must be a block-final round `origin + j·tau` with `j >= 1`, the wave must
/// start exactly `(d − 1)·len` rounds after it, the rounds in between must
/// be quiet, and a neighbor of the initiator must have heard only clean
/// pulses.
pub fn find_anchored(history: &[Pulse], origin: u64, tau: u64, max_distance: u64) -> Option<AnchoredWave> {
    let e = history.len();
    if e < 4 || !history[e - 1].is_on() || !history[e - 2].is_on() {
        return None;
    }
    let round_of = |i: usize| origin + 1 + i as u64;
    let mut best = None;
    for k in 1..=64usize {
        let len = 2 * k + 2;
        if len > e {
            break;
        }
        let a = e - len;
        let pairs = &history[a..e - 2];
        if !pairs[0].is_on() || pairs.chunks(2).any(|p| p[1].is_on()) {
            continue;
        }
        let digits: Vec<bool> = pairs.chunks(2).map(|p| p[0].is_on()).collect();
        let Some(value) = from_digits(&digits) else { continue };
        if value <= origin || !(value - origin).is_multiple_of(tau) {
            continue;
        }
        let start = round_of(a);
        if start <= value || (start - value - 1) % len as u64 != 0 {
            continue;
        }
        let distance = (start - value - 1) / len as u64 + 1;
        if distance > max_distance {
            continue;
        }
        let gap_from = (value - origin) as usize; // index of round value + 1
        if history[gap_from..a].iter().any(|p| p.is_on()) {
            continue;
        }
        if distance == 1 && history[a..e].contains(&Pulse::Noise) {
            continue;
        }
        best = Some(AnchoredWave { value, first_round: start, distance });
    }
    best
}
