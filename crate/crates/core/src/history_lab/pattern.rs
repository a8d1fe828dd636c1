//! Patterns of labeled family trees and the exact count of possible
//! patterns.

use num_bigint::BigUint;

use crate::history_lab::family::FamilyTree;
use crate::history_lab::history::LabLabel;

/// Per-label occupancy: 0 absent, 1 exactly once, 2 more than once.
pub type Occupancy = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub root_label: LabLabel,
    pub r_occupancy: Occupancy,
    pub a_label: LabLabel,
    pub a_occupancy: Occupancy,
}

fn occupancy(labels: impl Iterator<Item = LabLabel>, universe: usize) -> Occupancy {
    let mut occ = vec![0u8; universe];
    for l in labels {
        let slot = &mut occ[l as usize];
        *slot = (*slot + 1).min(2);
    }
    occ
}

/// Labels must lie in `0..universe`.
pub fn pattern_of(tree: &FamilyTree, labels: &[LabLabel], universe: usize) -> Pattern {
    Pattern {
        root_label: labels[tree.root],
        r_occupancy: occupancy(tree.r_leaves.iter().map(|&v| labels[v]), universe),
        a_label: labels[tree.a],
        a_occupancy: occupancy(tree.a_leaves.iter().map(|&v| labels[v]), universe),
    }
}

/// Number of labels of length at most β, taken as z = 2^(β+1).
pub fn label_universe(beta: u32) -> BigUint {
    BigUint::from(1u8) << (beta as usize + 1)
}

/// z²·3^(2z), z = 2^(β+1). Needs β ≤ 30 so that the exponent fits.
pub fn pattern_bound(beta: u32) -> BigUint {
    assert!(beta <= 30, "3^(2z) is out of reach for β > 30");
    let z = 1u32 << (beta + 1);
    let zb = BigUint::from(z);
    &zb * &zb * BigUint::from(3u8).pow(2 * z)
}

/// Same count through a different factorization: 4^(β+1)·9^z.
pub fn pattern_bound_alt(beta: u32) -> BigUint {
    assert!(beta <= 30, "9^z is out of reach for β > 30");
    let z = 1u32 << (beta + 1);
    BigUint::from(4u8).pow(beta + 1) * BigUint::from(9u8).pow(z)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossover {
    pub beta: u32,
    pub delta: BigUint,
    pub bound: BigUint,
    /// bound < Δ/2, evaluated exactly as 2·bound < Δ.
    pub holds: bool,
}

pub fn crossover(beta: u32, delta: BigUint) -> Crossover {
    let bound = pattern_bound(beta);
    let holds = &bound * 2u8 < delta;
    Crossover { beta, delta, bound, holds }
}

/// Least Δ with bound < Δ/2.
pub fn least_crossing_delta(beta: u32) -> BigUint {
    pattern_bound(beta) * 2u8 + 1u8
}
