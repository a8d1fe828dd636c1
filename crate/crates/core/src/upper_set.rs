//! Upper sets per BFS level, the private-children partition N′, child ids
//! used by collision tags, and node weights.

use std::collections::BTreeSet;

use crate::bits::bitlen;
use crate::graph::{Graph, LevelDecomposition, NodeId};

/// How a member entered its level's upper set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// Shares the tagged child `via_child` of the earlier member `via_member`;
    /// its first tagged child inherits that child's id.
    Shared { via_member: NodeId, via_child: NodeId },
    /// No tagged child of an earlier member reaches an eligible node; first
    /// tagged child gets id 1.
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPlan {
    /// US(l) in admission order.
    pub members: Vec<NodeId>,
    /// N′ of each member, ascending ids, parallel to `members`.
    pub private_children: Vec<Vec<NodeId>>,
    pub admissions: Vec<Admission>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperSetPlan {
    /// One entry per level `0..h`.
    pub levels: Vec<LevelPlan>,
    /// N′-owner of every node below the root.
    pub owner: Vec<Option<NodeId>>,
    /// Collision id of each tagged child, 0 for everyone else.
    pub child_id: Vec<u32>,
    /// ID(v) for members, empty otherwise.
    pub id_set: Vec<BTreeSet<u32>>,
    /// u₁..u_k of each member.
    pub tagged_children: Vec<Vec<NodeId>>,
    /// ⌊log Δ⌋ + 1.
    pub id_limit: u32,
}

impl UpperSetPlan {
    pub fn is_member(&self, v: NodeId) -> bool {
        !self.id_set[v].is_empty()
    }

    /// N′(v); empty for non-members.
    pub fn private_children(&self, v: NodeId) -> &[NodeId] {
        for level in &self.levels {
            if let Some(i) = level.members.iter().position(|&m| m == v) {
                return &level.private_children[i];
            }
        }
        &[]
    }

    /// Checks every structural invariant of the plan against the graph,
    /// independently of how the plan was built.
    pub fn check(&self, g: &Graph, d: &LevelDecomposition) -> Result<(), String> {
        for (l, lp) in self.levels.iter().enumerate() {
            let next: BTreeSet<NodeId> = d.levels[l + 1].iter().copied().collect();
            let mut covered = BTreeSet::new();
            let mut seen_children = BTreeSet::new();
            for (j, &v) in lp.members.iter().enumerate() {
                if d.level[v] != l {
                    return Err(format!("member {v} of US({l}) is at level {}", d.level[v]));
                }
                let nv: BTreeSet<NodeId> = d.lower_neighbors(g, v).into_iter().collect();
                let expected: BTreeSet<NodeId> = nv.difference(&covered).copied().collect();
                let got: BTreeSet<NodeId> = lp.private_children[j].iter().copied().collect();
                if got != expected {
                    return Err(format!("N'({v}) = {got:?}, expected {expected:?}"));
                }
                if got.is_empty() {
                    return Err(format!("N'({v}) is empty"));
                }
                for &u in &got {
                    if !seen_children.insert(u) || self.owner[u] != Some(v) {
                        return Err(format!("child {u} of {v} not uniquely owned"));
                    }
                }
                covered.extend(nv);

                let k = bitlen(got.len() as u64) as usize;
                let tagged = &self.tagged_children[v];
                if tagged.len() != k || !tagged.iter().all(|u| got.contains(u)) {
                    return Err(format!("member {v} has {} tagged children, expected {k}", tagged.len()));
                }
                let ids: BTreeSet<u32> = tagged.iter().map(|&u| self.child_id[u]).collect();
                if ids.len() != k || ids != self.id_set[v] {
                    return Err(format!("ids of {v}'s children are not distinct or differ from ID({v})"));
                }
                if ids.iter().any(|&id| id == 0 || id > self.id_limit) {
                    return Err(format!("id out of bounds under {v}: {ids:?}"));
                }
                let first_id = self.child_id[tagged[0]];
                let inherited = match lp.admissions[j] {
                    Admission::Fresh => 1,
                    Admission::Shared { via_member, via_child } => {
                        let earlier = lp.members[..j].contains(&via_member);
                        if !earlier
                            || !self.tagged_children[via_member].contains(&via_child)
                            || !g.has_edge(v, via_child)
                        {
                            return Err(format!("bad admission record for {v}"));
                        }
                        self.child_id[via_child]
                    }
                };
                if first_id != inherited {
                    return Err(format!("first tagged child of {v} has id {first_id}, expected {inherited}"));
                }
            }
            if covered != next {
                return Err(format!("US({l}) does not cover V({})", l + 1));
            }
        }
        Ok(())
    }
}

/// Builds US(l) for every level `0..h` by the admission rules, breaking
/// every free choice toward the smallest node id.
pub fn compute_upper_sets(g: &Graph, d: &LevelDecomposition) -> UpperSetPlan {
    assert!(d.h >= 1, "upper sets need at least two levels");
    let n = g.n();
    let id_limit = bitlen(d.delta as u64);
    let mut plan = UpperSetPlan {
        levels: Vec::with_capacity(d.h),
        owner: vec![None; n],
        child_id: vec![0; n],
        id_set: vec![BTreeSet::new(); n],
        tagged_children: vec![Vec::new(); n],
        id_limit,
    };
    let lower: Vec<Vec<NodeId>> = (0..n).map(|v| d.lower_neighbors(g, v)).collect();

    for l in 0..d.h {
        let target = d.levels[l + 1].len();
        let mut covered = vec![false; n];
        let mut covered_count = 0;
        let mut in_us = vec![false; n];
        let mut level_plan = LevelPlan { members: Vec::new(), private_children: Vec::new(), admissions: Vec::new() };

        while covered_count < target {
            let eligible = |v: NodeId, covered: &[bool], in_us: &[bool]| {
                !in_us[v] && lower[v].iter().any(|&u| !covered[u])
            };

            let mut choice = None;
            'rule1: for &a in level_plan.members.iter().rev() {
                for &u in &plan.tagged_children[a] {
                    let candidate = g
                        .neighbors(u)
                        .iter()
                        .copied()
                        .filter(|&v| d.level[v] == l)
                        .find(|&v| eligible(v, &covered, &in_us));
                    if let Some(v) = candidate {
                        choice = Some((v, Admission::Shared { via_member: a, via_child: u }, plan.child_id[u]));
                        break 'rule1;
                    }
                }
            }
            let (v, admission, inherited) = choice.unwrap_or_else(|| {
                let v = d.levels[l]
                    .iter()
                    .copied()
                    .find(|&v| eligible(v, &covered, &in_us))
                    .expect("connected graph: uncovered nodes always have an eligible parent");
                (v, Admission::Fresh, 1)
            });

            let private: Vec<NodeId> = lower[v].iter().copied().filter(|&u| !covered[u]).collect();
            for &u in &private {
                covered[u] = true;
                plan.owner[u] = Some(v);
            }
            covered_count += private.len();
            in_us[v] = true;

            let k = bitlen(private.len() as u64) as usize;
            let mut ids = BTreeSet::from([inherited]);
            plan.child_id[private[0]] = inherited;
            for &u in &private[1..k] {
                let id = (1..=id_limit).find(|i| !ids.contains(i)).expect("enough ids below ⌊log Δ⌋+1");
                ids.insert(id);
                plan.child_id[u] = id;
            }
            plan.id_set[v] = ids;
            plan.tagged_children[v] = private[..k].to_vec();

            level_plan.members.push(v);
            level_plan.private_children.push(private);
            level_plan.admissions.push(admission);
        }
        plan.levels.push(level_plan);
    }
    plan
}

/// Node weights: 1 at level h and outside the upper sets, otherwise one
/// plus the weights of the private children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMap {
    pub weight: Vec<u64>,
}

pub fn compute_weights(plan: &UpperSetPlan, d: &LevelDecomposition) -> WeightMap {
    let mut weight = vec![1u64; d.level.len()];
    for level in plan.levels.iter().rev() {
        for (v, children) in level.members.iter().zip(&level.private_children) {
            weight[*v] = 1 + children.iter().map(|&u| weight[u]).sum::<u64>();
        }
    }
    WeightMap { weight }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decompose;

    fn plan_for(n: usize, edges: &[(usize, usize)]) -> (Graph, LevelDecomposition, UpperSetPlan) {
        let g = Graph::from_edges(n, edges).unwrap();
        let d = decompose(&g);
        let p = compute_upper_sets(&g, &d);
        p.check(&g, &d).unwrap();
        (g, d, p)
    }

    #[test]
    fn star_has_root_only() {
        let (_, d, p) = plan_for(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(p.levels[0].members, vec![0]);
        assert_eq!(p.levels[0].private_children[0], vec![1, 2, 3, 4]);
        // k = ⌊log 4⌋ + 1 = 3 tagged leaves with ids 1, 2, 3
        assert_eq!(p.tagged_children[0], vec![1, 2, 3]);
        assert_eq!(p.child_id[1..], [1, 2, 3, 0]);
        let w = compute_weights(&p, &d);
        assert_eq!(w.weight, vec![5, 1, 1, 1, 1]);
    }

    #[test]
    fn diamond() {
        let (_, d, p) = plan_for(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(p.levels[1].members, vec![1]);
        assert_eq!(p.levels[1].private_children[0], vec![3]);
        assert!(!p.is_member(2));
        assert_eq!(p.child_id[3], 1);
        assert_eq!(compute_weights(&p, &d).weight, vec![4, 2, 1, 1]);
    }

    #[test]
    fn path_of_three() {
        let (_, d, p) = plan_for(3, &[(0, 1), (1, 2)]);
        assert_eq!(d.root, 1);
        assert_eq!(compute_weights(&p, &d).weight, vec![1, 3, 1]);
    }

    #[test]
    fn overlapping_parents() {
        // r=0 (degree 4); level 1: a=1, b=2; level 2: x=3, y=4, z=5; N(a)={x,y}, N(b)={y,z}
        let (_, _, p) = plan_for(8, &[(0, 1), (0, 2), (0, 6), (0, 7), (1, 3), (1, 4), (2, 4), (2, 5)]);
        assert_eq!(p.levels[1].members, vec![1, 2]);
        assert_eq!(p.levels[1].private_children, vec![vec![3, 4], vec![5]]);
        // b was admitted through y = u₂ of a, so z inherits y's id
        assert_eq!(p.levels[1].admissions[1], Admission::Shared { via_member: 1, via_child: 4 });
        assert_eq!(p.child_id[5], p.child_id[4]);
    }

    #[test]
    fn fresh_admission_after_shared_one() {
        // r=0 adjacent to 1,2,3; 1-{4,5}, 2-{4,6}, 3-{7}
        let (_, _, p) = plan_for(8, &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 4), (2, 6), (3, 7)]);
        assert_eq!(p.levels[1].members, vec![1, 2, 3]);
        assert_eq!(p.levels[1].admissions[2], Admission::Fresh);
        assert_eq!(p.child_id[7], 1);
    }
}
