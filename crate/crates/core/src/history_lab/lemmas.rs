//! Randomized checks of the two indistinguishability facts behind the
//! lower bound:
//!
//! * leaves hanging off the same node have equal histories exactly when
//!   they carry equal labels;
//! * two family trees with equal patterns give their roots equal histories.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::NodeId;
use crate::history_lab::family::{build_family, FamilyError, FamilyTree};
use crate::history_lab::history::{compute_histories, mix64, DigestAutomaton, HistoryArena, HistoryId, LabLabel};
use crate::history_lab::pattern::{pattern_of, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaConfig {
    pub delta: usize,
    /// Number of seeded automata.
    pub trials: usize,
    /// Labelings tried per automaton.
    pub labelings: usize,
    pub rounds: usize,
    pub seed: u64,
    /// Labels are drawn from 2^(β+1) values.
    pub beta: u32,
}

impl LemmaConfig {
    pub fn new(delta: usize, trials: usize, rounds: usize, seed: u64) -> Self {
        Self { delta, trials, labelings: 20, rounds, seed, beta: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// Equal labels ⇔ equal histories among the leaves of `r` or of `a`.
    LeafEquivalence,
    /// Equal patterns ⇒ equal histories of `r` (and of `a`).
    PatternEquivalence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub claim: Claim,
    pub automaton_seed: u64,
    pub labeling: usize,
    /// Family indices `i` of the trees involved.
    pub trees: Vec<usize>,
    pub nodes: Vec<NodeId>,
    /// Smallest round at which the claim fails.
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub delta: usize,
    pub trials: usize,
    pub rounds: usize,
    pub violations: Vec<Violation>,
    /// Tree pairs with equal patterns that were compared.
    #[serde(skip)]
    pub equal_pattern_pairs: usize,
    /// Largest number of distinct root histories seen within one
    /// equal-pattern class at the final round.
    #[serde(skip)]
    pub max_root_histories_per_class: usize,
}

impl LemmaReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// Labelings that give every tree of the family the same pattern: one
/// shared multiset on R and, on A, a base multiset of the smallest size
/// padded with labels that already occur at least twice.
fn matched_labelings(family: &[FamilyTree], z: u32, rng: &mut ChaCha8Rng) -> Vec<Vec<LabLabel>> {
    let palette: Vec<LabLabel> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..z)).collect();
    let pick = |rng: &mut ChaCha8Rng| palette[rng.gen_range(0..palette.len())];
    let root = rng.gen_range(0..z);
    let a = rng.gen_range(0..z);
    let r_multiset: Vec<LabLabel> = (0..family[0].r_leaves.len()).map(|_| pick(rng)).collect();
    let base_len = family[0].a_leaves.len();
    let doubled = pick(rng);
    let mut a_base = vec![doubled, doubled];
    a_base.extend((2..base_len).map(|_| pick(rng)));
    let mut counts: BTreeMap<LabLabel, usize> = BTreeMap::new();
    for &l in &a_base {
        *counts.entry(l).or_default() += 1;
    }
    let absorbers: Vec<LabLabel> = counts.into_iter().filter(|&(_, c)| c >= 2).map(|(l, _)| l).collect();

    family
        .iter()
        .map(|t| {
            let mut labels = vec![0; t.n()];
            labels[t.root] = root;
            labels[t.a] = a;
            let mut r = r_multiset.clone();
            r.shuffle(rng);
            for (&v, l) in t.r_leaves.iter().zip(r) {
                labels[v] = l;
            }
            let mut al = a_base.clone();
            while al.len() < t.a_leaves.len() {
                al.push(absorbers[rng.gen_range(0..absorbers.len())]);
            }
            al.shuffle(rng);
            for (&v, l) in t.a_leaves.iter().zip(al) {
                labels[v] = l;
            }
            labels
        })
        .collect()
}

fn free_labelings(family: &[FamilyTree], z: u32, rng: &mut ChaCha8Rng) -> Vec<Vec<LabLabel>> {
    family
        .iter()
        .map(|t| {
            let palette: Vec<LabLabel> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..z)).collect();
            (0..t.n()).map(|_| palette[rng.gen_range(0..palette.len())]).collect()
        })
        .collect()
}

/// First round at which `nodes` break "equal label ⇔ equal history".
fn leaf_violation(nodes: &[NodeId], labels: &[LabLabel], hs: &[Vec<HistoryId>]) -> Option<(usize, Vec<NodeId>)> {
    for (t, round) in hs.iter().enumerate() {
        let mut by_label: HashMap<LabLabel, (NodeId, HistoryId)> = HashMap::new();
        let mut by_history: HashMap<HistoryId, (NodeId, LabLabel)> = HashMap::new();
        for &v in nodes {
            let (l, h) = (labels[v], round[v]);
            if let Some(&(u, hu)) = by_label.get(&l) {
                if hu != h {
                    return Some((t, vec![u, v]));
                }
            }
            if let Some(&(u, lu)) = by_history.get(&h) {
                if lu != l {
                    return Some((t, vec![u, v]));
                }
            }
            by_label.insert(l, (v, h));
            by_history.insert(h, (v, l));
        }
    }
    None
}

pub fn check_lemmas(cfg: &LemmaConfig) -> Result<LemmaReport, FamilyError> {
    let family = build_family(cfg.delta)?;
    let z = 1u32 << (cfg.beta + 1);
    let mut violations = Vec::new();
    let mut equal_pattern_pairs = 0;
    let mut max_root_histories_per_class = 0;

    for trial in 0..cfg.trials {
        let automaton_seed = mix64(cfg.seed ^ mix64(trial as u64));
        let automaton = DigestAutomaton::from_seed(automaton_seed);
        for j in 0..cfg.labelings {
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(automaton_seed ^ j as u64));
            let labelings = match j {
                0 => family.iter().map(|t| vec![0; t.n()]).collect(),
                j if j % 2 == 1 => matched_labelings(&family, z, &mut rng),
                _ => free_labelings(&family, z, &mut rng),
            };
            let mut arena = HistoryArena::new();
            let mut runs = Vec::with_capacity(family.len());
            for (t, labels) in family.iter().zip(&labelings) {
                let hs = compute_histories(&t.graph, labels, &automaton, cfg.rounds, &mut arena);
                for leaves in [&t.r_leaves, &t.a_leaves] {
                    if let Some((round, nodes)) = leaf_violation(leaves, labels, &hs) {
                        violations.push(Violation {
                            claim: Claim::LeafEquivalence,
                            automaton_seed,
                            labeling: j,
                            trees: vec![t.index],
                            nodes,
                            round,
                        });
                    }
                }
                runs.push((pattern_of(t, labels, z as usize), hs));
            }

            let mut classes: HashMap<&Pattern, Vec<usize>> = HashMap::new();
            for (k, (p, _)) in runs.iter().enumerate() {
                classes.entry(p).or_default().push(k);
            }
            let mut classes: Vec<Vec<usize>> = classes.into_values().collect();
            classes.sort();
            for members in classes {
                let mut finals: Vec<HistoryId> =
                    members.iter().map(|&k| runs[k].1[cfg.rounds][family[k].root]).collect();
                finals.sort();
                finals.dedup();
                max_root_histories_per_class = max_root_histories_per_class.max(finals.len());
                for (x, &k1) in members.iter().enumerate() {
                    for &k2 in &members[x + 1..] {
                        equal_pattern_pairs += 1;
                        let (t1, t2) = (&family[k1], &family[k2]);
                        let first_diff = (0..=cfg.rounds).find(|&t| {
                            runs[k1].1[t][t1.root] != runs[k2].1[t][t2.root]
                                || runs[k1].1[t][t1.a] != runs[k2].1[t][t2.a]
                        });
                        if let Some(round) = first_diff {
                            violations.push(Violation {
                                claim: Claim::PatternEquivalence,
                                automaton_seed,
                                labeling: j,
                                trees: vec![t1.index, t2.index],
                                nodes: vec![t1.root, t1.a],
                                round,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(LemmaReport {
        delta: cfg.delta,
        trials: cfg.trials,
        rounds: cfg.rounds,
        violations,
        equal_pattern_pairs,
        max_root_histories_per_class,
    })
}
