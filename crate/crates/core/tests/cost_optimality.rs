mod common;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use fixedbitset::FixedBitSet;
use worksworld::benchgen;
use worksworld::grounding::{ground, prune, GroundProblem};
use worksworld::planner::{plan, Objective, SearchConfig};
use worksworld::Q;

/// Uniform-cost search over the unpruned state space; `None` when
/// unsolvable, `Err` when the space exceeds `max_states`.
fn min_cost(g: &GroundProblem, max_states: usize) -> Result<Option<Q>, ()> {
    let key = |s: &worksworld::grounding::GroundState| -> (FixedBitSet, Vec<Q>) {
        let mut v = s.vals.clone();
        v[g.cost_var as usize] = Q::ZERO;
        (s.props.clone(), v)
    };
    let mut best: HashMap<(FixedBitSet, Vec<Q>), Q> = HashMap::new();
    let mut states = vec![g.init.clone()];
    let mut heap = BinaryHeap::new();
    best.insert(key(&g.init), Q::ZERO);
    heap.push(Reverse((Q::ZERO, 0usize)));
    while let Some(Reverse((c, i))) = heap.pop() {
        let s = states[i].clone();
        if best.get(&key(&s)).is_some_and(|&b| b < c) {
            continue;
        }
        if g.is_goal(&s) {
            return Ok(Some(c));
        }
        for a in &g.actions {
            if !s.applicable(a) {
                continue;
            }
            let n = s.apply(a);
            if n.vals[g.latency_var as usize] > g.goal.latency_bound {
                continue;
            }
            let nc = c + a.cost;
            let k = key(&n);
            if best.get(&k).is_some_and(|&b| b <= nc) {
                continue;
            }
            best.insert(k, nc);
            if best.len() > max_states {
                return Err(());
            }
            states.push(n);
            heap.push(Reverse((nc, states.len() - 1)));
        }
    }
    Ok(None)
}

#[test]
fn optimal_cost_config_matches_uniform_cost_oracle() {
    let cfg = SearchConfig::optimal(Objective::TotalCost);
    let mut compared = 0;
    for seed in 0..300u64 {
        let inst = benchgen::gen_random_small(seed);
        if inst.components.len() > 4 {
            continue;
        }
        let full = ground(&inst);
        let Ok(expected) = min_cost(&full, 200_000) else { continue };
        let out = plan(&prune(&full).problem, &cfg);
        match expected {
            Some(c) => {
                let p = out.plan.unwrap_or_else(|| panic!("seed {seed}: oracle found cost {c}, planner none"));
                assert_eq!(p.cost, c, "seed {seed}");
                compared += 1;
            }
            None => assert!(out.plan.is_none(), "seed {seed}: planner solved an unsolvable instance"),
        }
        if compared >= 60 {
            break;
        }
    }
    assert!(compared >= 30, "only {compared} solvable instances compared");
}

#[test]
fn minimal_chain_cost_is_hand_computed() {
    let full = ground(&benchgen::minimal_chain());
    let expected = Q::new(1, 16) + Q::new(100, 10240) + Q::new(20, 1000);
    assert_eq!(min_cost(&full, 10_000), Ok(Some(expected)));
    let p = plan(&prune(&full).problem, &SearchConfig::optimal(Objective::TotalCost)).plan.unwrap();
    assert_eq!(p.cost, expected);
}
