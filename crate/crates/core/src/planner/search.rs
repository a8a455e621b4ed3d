use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heuristic::{HeuristicKind, Objective, Relaxation};
use crate::grounding::{GroundProblem, GroundState, Schema};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Greedy best-first: ordered by `h`, goal test on generation.
    Gbfs,
    /// `f = g + w*h`, goal test on expansion.
    WeightedAStar(Q),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub heuristic: HeuristicKind,
    pub objective: Objective,
    /// 0 breaks ties first-in first-out; other values shuffle ties.
    pub seed: u64,
    pub max_expansions: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Rough bound on stored search nodes, in MiB.
    pub memory_limit_mb: Option<u64>,
    /// Drop steps whose removal keeps the plan valid.
    pub minimize: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Gbfs,
            heuristic: HeuristicKind::Ff,
            objective: Objective::PlanLength,
            seed: 0,
            max_expansions: Some(1_000_000),
            time_limit: None,
            memory_limit_mb: Some(2048),
            minimize: true,
        }
    }
}

impl SearchConfig {
    /// Optimal for `objective`: A* with the admissible max heuristic.
    /// Elimination only removes steps of non-negative cost, so it keeps
    /// optimality.
    pub fn optimal(objective: Objective) -> SearchConfig {
        SearchConfig {
            strategy: Strategy::WeightedAStar(Q::ONE),
            heuristic: HeuristicKind::HMax,
            objective,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub schema: Schema,
    pub args: Vec<String>,
    pub cost: Q,
    pub latency: Q,
}

impl PlanStep {
    pub fn text(&self) -> String {
        let mut s = format!("({}", self.schema.name());
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub cost: Q,
    pub latency: Q,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn from_actions(p: &GroundProblem, actions: &[usize]) -> Plan {
        let steps: Vec<PlanStep> = actions
            .iter()
            .map(|&i| {
                let a = &p.actions[i];
                PlanStep { schema: a.schema, args: p.action_args(a), cost: a.cost, latency: a.latency }
            })
            .collect();
        Plan {
            cost: steps.iter().map(|s| s.cost).sum(),
            latency: steps.iter().map(|s| s.latency).sum(),
            steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanStatus {
    Solved,
    Unsolvable,
    BudgetExhausted(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub reopened: u64,
    pub dead_ends: u64,
    pub over_latency: u64,
    pub stored: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub status: PlanStatus,
    pub plan: Option<Plan>,
    pub stats: SearchStats,
}

struct Node {
    state: GroundState,
    parent: u32,
    action: u32,
    g: Q,
}

/// State identity for duplicate detection; the cost accumulator is left
/// out so equal states reached at different cost merge.
#[derive(PartialEq, Eq, Hash)]
struct Key {
    props: FixedBitSet,
    vals: Vec<Q>,
}

fn key(s: &GroundState, cost_var: u32) -> Key {
    let mut vals = s.vals.clone();
    vals[cost_var as usize] = Q::ZERO;
    Key { props: s.props.clone(), vals }
}

const ROOT: u32 = u32::MAX;

/// Open-list entry: priority, tie-break h, shuffle key, insertion order, node.
type OpenEntry = (Q, Q, u64, u64, u32);

pub fn plan(p: &GroundProblem, cfg: &SearchConfig) -> SearchOutcome {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let relax = Relaxation::new(p, cfg.objective);
    let mut order: Vec<usize> = (0..p.actions.len()).collect();
    order.sort_by_key(|&i| (p.actions[i].schema.expansion_rank(), i));
    let mut rng = (cfg.seed != 0).then(|| ChaCha8Rng::seed_from_u64(cfg.seed));
    let node_bytes = (p.props.len() / 8 + 16 * p.fluents.len() * 2 + 128) as u64;

    let finish = |status: PlanStatus, plan: Option<Plan>, mut stats: SearchStats| {
        stats.elapsed = start.elapsed();
        SearchOutcome { status, plan, stats }
    };
    let priority = |g: Q, h: Q| match cfg.strategy {
        Strategy::Gbfs => h,
        Strategy::WeightedAStar(w) => g + w * h,
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<Key, (Q, u32)> = HashMap::new();
    let mut open: BinaryHeap<Reverse<OpenEntry>> = BinaryHeap::new();
    let mut counter = 0u64;

    if p.init.vals[p.latency_var as usize] > p.goal.latency_bound {
        return finish(PlanStatus::Unsolvable, None, stats);
    }
    let Some(h0) = relax.evaluate(p, &p.init, cfg.heuristic) else {
        stats.dead_ends += 1;
        return finish(PlanStatus::Unsolvable, None, stats);
    };
    nodes.push(Node { state: p.init.clone(), parent: ROOT, action: ROOT, g: Q::ZERO });
    best.insert(key(&p.init, p.cost_var), (Q::ZERO, 0));
    let gbfs = matches!(cfg.strategy, Strategy::Gbfs);
    if gbfs && p.is_goal(&p.init) {
        return finish(PlanStatus::Solved, Some(Plan::default()), stats);
    }
    open.push(Reverse((priority(Q::ZERO, h0), h0, 0, 0, 0)));

    while let Some(Reverse((_, _, _, _, idx))) = open.pop() {
        let (g, state) = {
            let n = &nodes[idx as usize];
            (n.g, n.state.clone())
        };
        let k = key(&state, p.cost_var);
        if best.get(&k).is_some_and(|&(bg, bi)| bg < g || (bg == g && bi != idx)) {
            continue;
        }
        if !gbfs && p.is_goal(&state) {
            let plan = extract(p, &nodes, idx, cfg.minimize);
            return finish(PlanStatus::Solved, Some(plan), stats);
        }
        if let Some(m) = cfg.max_expansions {
            if stats.expanded >= m {
                return finish(PlanStatus::BudgetExhausted(format!("expansion limit {m} reached")), None, stats);
            }
        }
        if let Some(t) = cfg.time_limit {
            if start.elapsed() >= t {
                return finish(PlanStatus::BudgetExhausted(format!("time limit {:?} reached", t)), None, stats);
            }
        }
        if let Some(mb) = cfg.memory_limit_mb {
            if nodes.len() as u64 * node_bytes > mb * 1024 * 1024 {
                return finish(PlanStatus::BudgetExhausted(format!("memory limit {mb} MiB reached")), None, stats);
            }
        }
        stats.expanded += 1;
        for &ai in &order {
            let a = &p.actions[ai];
            if !state.applicable(a) {
                continue;
            }
            let next = state.apply(a);
            stats.generated += 1;
            if next.vals[p.latency_var as usize] > p.goal.latency_bound {
                stats.over_latency += 1;
                continue;
            }
            let ng = g + relax.weight(ai);
            let nk = key(&next, p.cost_var);
            let slot = nodes.len() as u32;
            match best.entry(nk) {
                Entry::Occupied(mut e) => {
                    if e.get().0 <= ng {
                        continue;
                    }
                    stats.reopened += 1;
                    e.insert((ng, slot));
                }
                Entry::Vacant(e) => {
                    e.insert((ng, slot));
                }
            }
            let goal = gbfs && p.is_goal(&next);
            let h = if goal { Some(Q::ZERO) } else { relax.evaluate(p, &next, cfg.heuristic) };
            nodes.push(Node { state: next, parent: idx, action: ai as u32, g: ng });
            if goal {
                let plan = extract(p, &nodes, slot, cfg.minimize);
                stats.stored = nodes.len() as u64;
                return finish(PlanStatus::Solved, Some(plan), stats);
            }
            let Some(h) = h else {
                stats.dead_ends += 1;
                continue;
            };
            counter += 1;
            let tie = rng.as_mut().map_or(0, |r| r.gen::<u64>());
            open.push(Reverse((priority(ng, h), h, tie, counter, slot)));
        }
        stats.stored = nodes.len() as u64;
    }
    finish(PlanStatus::Unsolvable, None, stats)
}

fn extract(p: &GroundProblem, nodes: &[Node], mut idx: u32, minimize: bool) -> Plan {
    let mut actions = Vec::new();
    while nodes[idx as usize].parent != ROOT {
        actions.push(nodes[idx as usize].action as usize);
        idx = nodes[idx as usize].parent;
    }
    actions.reverse();
    if minimize {
        actions = eliminate(p, actions);
    }
    Plan::from_actions(p, &actions)
}

fn reaches_goal(p: &GroundProblem, actions: &[usize]) -> bool {
    let mut s = p.init.clone();
    for &i in actions {
        let a = &p.actions[i];
        if !s.applicable(a) {
            return false;
        }
        s = s.apply(a);
    }
    p.is_goal(&s)
}

/// Greedy single-step elimination: repeatedly drops the first step whose
/// removal leaves a valid plan.
fn eliminate(p: &GroundProblem, mut actions: Vec<usize>) -> Vec<usize> {
    let mut i = 0;
    while i < actions.len() {
        let mut trial = actions.clone();
        trial.remove(i);
        if reaches_goal(p, &trial) {
            actions = trial;
            i = 0;
        } else {
            i += 1;
        }
    }
    actions
}

/// Applies greedy single-step elimination to a plan for `p`. Steps that do
/// not name a ground action of `p` are kept unchanged.
pub fn minimize_plan(p: &GroundProblem, plan: &Plan) -> Plan {
    let ids: Option<Vec<usize>> = plan.steps.iter().map(|s| p.find_action(s.schema, &s.args)).collect();
    match ids {
        Some(ids) if reaches_goal(p, &ids) => Plan::from_actions(p, &eliminate(p, ids)),
        _ => plan.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use crate::grounding::{ground, prune};

    fn solve(p: &GroundProblem, cfg: &SearchConfig) -> Plan {
        let out = plan(p, cfg);
        assert_eq!(out.status, PlanStatus::Solved);
        out.plan.unwrap()
    }

    #[test]
    fn minimal_chain_needs_six_steps() {
        let g = prune(&ground(&benchgen::minimal_chain())).problem;
        let plan = solve(&g, &SearchConfig::default());
        assert_eq!(plan.len(), 6);
        let opt = solve(&g, &SearchConfig::optimal(Objective::PlanLength));
        assert_eq!(opt.len(), 6);
    }

    #[test]
    fn plans_reach_goal_on_unpruned_problem() {
        let inst = benchgen::table4_instance(2, 2);
        let full = ground(&inst);
        let pruned = prune(&full).problem;
        let plan = solve(&pruned, &SearchConfig::default());
        let ids: Vec<usize> = plan.steps.iter().map(|s| full.find_action(s.schema, &s.args).unwrap()).collect();
        assert!(reaches_goal(&full, &ids));
    }

    #[test]
    fn latency_bound_makes_unsolvable() {
        let mut inst = benchgen::minimal_chain();
        inst.latency_bound = Q::new(1, 100);
        let g = ground(&inst);
        assert_eq!(plan(&g, &SearchConfig::default()).status, PlanStatus::Unsolvable);
    }

    #[test]
    fn expansion_budget_is_reported() {
        let g = ground(&benchgen::table4_instance(4, 3));
        let cfg = SearchConfig { max_expansions: Some(1), heuristic: HeuristicKind::GoalCount, ..SearchConfig::default() };
        assert!(matches!(plan(&g, &cfg).status, PlanStatus::BudgetExhausted(_)));
    }

    #[test]
    fn same_seed_same_plan() {
        let g = prune(&ground(&benchgen::gen_complex(2, 4).unwrap())).problem;
        for seed in [0, 17] {
            let cfg = SearchConfig { seed, ..SearchConfig::default() };
            assert_eq!(solve(&g, &cfg), solve(&g, &cfg));
        }
    }

    #[test]
    fn minimized_plans_are_locally_minimal() {
        let g = prune(&ground(&benchgen::table4_instance(2, 3))).problem;
        let plan = solve(&g, &SearchConfig::default());
        let ids: Vec<usize> = plan.steps.iter().map(|s| g.find_action(s.schema, &s.args).unwrap()).collect();
        for i in 0..ids.len() {
            let mut t = ids.clone();
            t.remove(i);
            assert!(!reaches_goal(&g, &t));
        }
    }
}
