//! Global round arithmetic every node can evaluate locally.

use crate::bits::bitlen;
use crate::protocol::wave::wave_len;

/// Round at which nodes of `level` finish decoding the Δ wave.
pub fn delta_finish(m: u64, level: u64) -> u64 {
    m + level * (2 * m + 2)
}

/// Round at which the root hears the height, relayed up the hop path after
/// the deepest level has finished relaying the Δ wave.
pub fn height_heard(m: u64, h: u64) -> u64 {
    delta_finish(m, h) + 2 * m + 2 + h
}

/// End of parameter learning.
pub fn t1(m: u64, h: u64) -> u64 {
    height_heard(m, h) + h * wave_len(h)
}

/// End of a wave started right after `t`, with every node within `2h` hops.
pub fn wave_deadline(t: u64, h: u64, x: u64) -> u64 {
    t + 2 * h * wave_len(x)
}

pub fn tau(m: u64, x: u64) -> u64 {
    m + x * m + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseTimes {
    pub t2: u64,
    /// Largest weight at the level being aggregated.
    pub x: u64,
    pub t2_prime: u64,
    pub tau: u64,
    /// Stop round announced by the phase closer.
    pub stop: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    pub m: u64,
    pub h: u64,
    pub t1: u64,
    pub phases: Vec<PhaseTimes>,
    /// Round after which the root starts the final wave.
    pub final_start: u64,
}

/// Builds the schedule from Δ, h and the per-phase values `xs` and `stops`
/// observed in a run (one entry per phase).
pub fn compute_timeline(delta: u64, h: u64, xs: &[u64], stops: &[u64]) -> Timeline {
    assert!(delta >= 1 && h >= 1);
    assert_eq!(xs.len(), stops.len());
    let m = u64::from(bitlen(delta));
    let t1 = t1(m, h);
    let mut t2 = t1;
    let mut phases = Vec::with_capacity(xs.len());
    for (&x, &stop) in xs.iter().zip(stops) {
        phases.push(PhaseTimes { t2, x, t2_prime: wave_deadline(t2, h, x), tau: tau(m, x), stop });
        t2 = wave_deadline(stop, h, stop);
    }
    Timeline { m, h, t1, phases, final_start: t2 }
}
