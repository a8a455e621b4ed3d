//! Delete-free relaxation heuristics.
//!
//! Negative preconditions count as satisfied when the atom is false in the
//! evaluated state (atoms only ever become true), numeric preconditions are
//! checked against the evaluated state (the fluents they test only
//! decrease). Both over-approximate applicability, so an infinite estimate
//! proves a dead end.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::grounding::{GroundProblem, GroundState, PropId};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicKind {
    /// Unsatisfied goal demands.
    GoalCount,
    /// Relaxed plan extracted from additive best supporters.
    Ff,
    /// Max-cost relaxation; admissible.
    HMax,
}

impl HeuristicKind {
    pub fn from_name(s: &str) -> Option<HeuristicKind> {
        match s {
            "goal-count" => Some(HeuristicKind::GoalCount),
            "ff" => Some(HeuristicKind::Ff),
            "hmax" => Some(HeuristicKind::HMax),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::GoalCount => "goal-count",
            HeuristicKind::Ff => "ff",
            HeuristicKind::HMax => "hmax",
        }
    }
}

/// Quantity the search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    PlanLength,
    TotalCost,
}

impl Objective {
    pub fn from_name(s: &str) -> Option<Objective> {
        match s {
            "length" => Some(Objective::PlanLength),
            "cost" => Some(Objective::TotalCost),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::PlanLength => "length",
            Objective::TotalCost => "cost",
        }
    }
}

/// Per-problem index for repeated relaxed explorations.
pub struct Relaxation {
    weight: Vec<Q>,
    /// Number of conditions (positive atoms plus disjunctive groups).
    conds: Vec<u32>,
    pos_users: Vec<Vec<u32>>,
    /// `(action, group)` pairs the atom can satisfy.
    any_users: Vec<Vec<(u32, u32)>>,
    free: Vec<u32>,
}

impl Relaxation {
    pub fn new(p: &GroundProblem, objective: Objective) -> Relaxation {
        let mut pos_users = vec![Vec::new(); p.props.len()];
        let mut any_users = vec![Vec::new(); p.props.len()];
        let mut conds = Vec::with_capacity(p.actions.len());
        let mut free = Vec::new();
        for (i, a) in p.actions.iter().enumerate() {
            for &q in &a.pre_pos {
                pos_users[q as usize].push(i as u32);
            }
            for (g, grp) in a.pre_any.iter().enumerate() {
                for &q in grp {
                    any_users[q as usize].push((i as u32, g as u32));
                }
            }
            let n = (a.pre_pos.len() + a.pre_any.len()) as u32;
            if n == 0 {
                free.push(i as u32);
            }
            conds.push(n);
        }
        let weight = p
            .actions
            .iter()
            .map(|a| match objective {
                Objective::PlanLength => Q::ONE,
                Objective::TotalCost => a.cost,
            })
            .collect();
        Relaxation { weight, conds, pos_users, any_users, free }
    }

    pub fn weight(&self, action: usize) -> Q {
        self.weight[action]
    }

    pub fn evaluate(&self, p: &GroundProblem, s: &GroundState, kind: HeuristicKind) -> Option<Q> {
        match kind {
            HeuristicKind::GoalCount => {
                let unmet = p.goal.groups.iter().filter(|g| !g.iter().any(|&q| s.has(q))).count();
                if unmet > 0 && self.explore(p, s, false).goal_cost(p, false).is_none() {
                    return None;
                }
                Some(Q::int(unmet as i64))
            }
            HeuristicKind::HMax => self.explore(p, s, true).goal_cost(p, true),
            HeuristicKind::Ff => {
                let x = self.explore(p, s, false);
                x.goal_cost(p, false)?;
                Some(x.relaxed_plan(p, self))
            }
        }
    }

    fn explore(&self, p: &GroundProblem, s: &GroundState, use_max: bool) -> Exploration {
        let n = p.props.len();
        let mut cost: Vec<Option<Q>> = vec![None; n];
        let mut supporter: Vec<u32> = vec![u32::MAX; n];
        let mut done = vec![false; n];
        let mut remaining = self.conds.clone();
        let mut agg = vec![Q::ZERO; p.actions.len()];
        let mut group_by: Vec<Vec<u32>> = p.actions.iter().map(|a| vec![u32::MAX; a.pre_any.len()]).collect();
        let mut heap: BinaryHeap<Reverse<(Q, u32)>> = BinaryHeap::new();

        let enabled = |i: usize| {
            let a = &p.actions[i];
            a.static_ok
                && a.pre_neg.iter().all(|&q| !s.has(q))
                && a.pre_num.iter().all(|c| s.val(c.var).is_some_and(|v| v >= c.bound))
        };
        let fire = |i: usize, base: Q, cost: &mut Vec<Option<Q>>, supporter: &mut Vec<u32>, heap: &mut BinaryHeap<Reverse<(Q, u32)>>| {
            let c = base + self.weight[i];
            for &q in &p.actions[i].add {
                if cost[q as usize].is_none_or(|old| c < old) {
                    cost[q as usize] = Some(c);
                    supporter[q as usize] = i as u32;
                    heap.push(Reverse((c, q)));
                }
            }
        };

        for q in s.props.ones() {
            cost[q] = Some(Q::ZERO);
            heap.push(Reverse((Q::ZERO, q as u32)));
        }
        for &i in &self.free {
            if enabled(i as usize) {
                fire(i as usize, Q::ZERO, &mut cost, &mut supporter, &mut heap);
            }
        }
        while let Some(Reverse((c, q))) = heap.pop() {
            let qi = q as usize;
            if done[qi] || cost[qi] != Some(c) {
                continue;
            }
            done[qi] = true;
            let satisfy = |i: u32, remaining: &mut Vec<u32>, agg: &mut Vec<Q>| -> bool {
                let i = i as usize;
                agg[i] = if use_max { agg[i].max(c) } else { agg[i] + c };
                remaining[i] -= 1;
                remaining[i] == 0
            };
            for &i in &self.pos_users[qi] {
                if satisfy(i, &mut remaining, &mut agg) && enabled(i as usize) {
                    fire(i as usize, agg[i as usize], &mut cost, &mut supporter, &mut heap);
                }
            }
            for &(i, g) in &self.any_users[qi] {
                let slot = &mut group_by[i as usize][g as usize];
                if *slot != u32::MAX {
                    continue;
                }
                *slot = q;
                if satisfy(i, &mut remaining, &mut agg) && enabled(i as usize) {
                    fire(i as usize, agg[i as usize], &mut cost, &mut supporter, &mut heap);
                }
            }
        }
        Exploration { cost, supporter, group_by, initial: s.props.clone() }
    }
}

struct Exploration {
    cost: Vec<Option<Q>>,
    supporter: Vec<u32>,
    group_by: Vec<Vec<u32>>,
    initial: fixedbitset::FixedBitSet,
}

impl Exploration {
    fn cheapest(&self, group: &[PropId]) -> Option<(Q, PropId)> {
        group.iter().filter_map(|&q| self.cost[q as usize].map(|c| (c, q))).min()
    }

    fn goal_cost(&self, p: &GroundProblem, use_max: bool) -> Option<Q> {
        let mut total = Q::ZERO;
        for g in &p.goal.groups {
            let (c, _) = self.cheapest(g)?;
            total = if use_max { total.max(c) } else { total + c };
        }
        Some(total)
    }

    fn relaxed_plan(&self, p: &GroundProblem, r: &Relaxation) -> Q {
        let mut chosen = fixedbitset::FixedBitSet::with_capacity(p.actions.len());
        let mut visited = fixedbitset::FixedBitSet::with_capacity(p.props.len());
        let mut stack: Vec<PropId> = p.goal.groups.iter().filter_map(|g| self.cheapest(g).map(|(_, q)| q)).collect();
        let mut total = Q::ZERO;
        while let Some(q) = stack.pop() {
            if visited.put(q as usize) || self.initial.contains(q as usize) {
                continue;
            }
            let a = self.supporter[q as usize] as usize;
            if chosen.put(a) {
                continue;
            }
            total += r.weight[a];
            stack.extend(p.actions[a].pre_pos.iter().copied());
            stack.extend(self.group_by[a].iter().copied().filter(|&x| x != u32::MAX));
        }
        total
    }
}

/// Heuristic estimate of `s` for `objective`; `None` marks a proven dead end.
pub fn heuristic_value(p: &GroundProblem, s: &GroundState, kind: HeuristicKind, objective: Objective) -> Option<Q> {
    Relaxation::new(p, objective).evaluate(p, s, kind)
}
