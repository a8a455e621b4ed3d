//! Oracles shared by the integration suites. They re-derive results from
//! the instance and the written-down formulas rather than from the planner.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use worksworld::benchgen::{self, VaryKind};
use worksworld::grounding::{GroundProblem, GroundState, Schema};
use worksworld::model::{ProblemInstance, ResourceKind};
use worksworld::planner::Plan;
use worksworld::Q;

/// Total cost and latency of a plan, folded from the instance's numbers.
pub fn fold_metrics(inst: &ProblemInstance, plan: &Plan) -> (Q, Q) {
    let w = inst.cost_weights;
    let (mut cost, mut latency) = (Q::ZERO, Q::ZERO);
    for step in &plan.steps {
        let a = &step.args;
        let comp = |id: &str| inst.component(id).expect("component");
        let link = |id: &str| inst.link(id).expect("link");
        match step.schema {
            Schema::ReplicateCode => {
                cost += w[ResourceKind::Config] * comp(&a[0]).demand[ResourceKind::Config] / link(&a[3]).total_bw;
            }
            Schema::ScheduleComponent => {
                let r = ResourceKind::from_name(&a[1]).unwrap();
                let c = comp(&a[0]);
                cost += w[r] * c.demand[r] / inst.interface(&a[2]).unwrap().total[r];
                latency += c.msg_max_rate.recip();
            }
            Schema::ConnectDirectLink | Schema::ConnectCompositeLink => {
                let dc = comp(&a[3]);
                let size = inst.component_type(&a[4]).unwrap().msg_size.unwrap();
                let bw = dc.msg_max_rate * size;
                let hops: Vec<&str> =
                    if step.schema == Schema::ConnectDirectLink { vec![&a[7]] } else { vec![&a[8], &a[9]] };
                for h in hops {
                    cost += w[ResourceKind::Network] * bw / link(h).total_bw;
                }
                latency += link(&a[7]).latency + dc.msg_max_rate.recip();
            }
            Schema::PropagateInput | Schema::PropagateOutput => {}
        }
    }
    (cost, latency)
}

fn key(s: &GroundState, cost_var: u32) -> (FixedBitSet, Vec<Q>) {
    let mut v = s.vals.clone();
    v[cost_var as usize] = Q::ZERO;
    (s.props.clone(), v)
}

fn goal(g: &GroundProblem, s: &GroundState) -> bool {
    s.vals[g.latency_var as usize] <= g.goal.latency_bound
        && g.goal.groups.iter().all(|grp| grp.iter().any(|&q| s.props.contains(q as usize)))
}

pub enum Bfs {
    Length(usize),
    Unsolvable,
    TooLarge,
}

/// Breadth-first search over the full state space for the shortest plan.
pub fn bfs_min_length(g: &GroundProblem, max_states: usize) -> Bfs {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(key(&g.init, g.cost_var));
    queue.push_back((g.init.clone(), 0usize));
    while let Some((s, d)) = queue.pop_front() {
        if goal(g, &s) {
            return Bfs::Length(d);
        }
        for a in &g.actions {
            if !s.applicable(a) {
                continue;
            }
            let n = s.apply(a);
            if n.vals[g.latency_var as usize] > g.goal.latency_bound {
                continue;
            }
            if seen.insert(key(&n, g.cost_var)) {
                if seen.len() > max_states {
                    return Bfs::TooLarge;
                }
                queue.push_back((n, d + 1));
            }
        }
    }
    Bfs::Unsolvable
}

pub fn component_count(inst: &ProblemInstance) -> usize {
    inst.components.len()
}

/// Every generator output used by the corpus-wide checks.
pub fn corpus() -> Vec<ProblemInstance> {
    let mut v = vec![benchgen::minimal_chain()];
    for (w, s) in [(2, 1), (2, 2), (2, 3), (4, 3)] {
        v.push(benchgen::table4_instance(w, s));
    }
    for kind in [VaryKind::Wfc, VaryKind::Interfaces, VaryKind::DirectLinks, VaryKind::Sites] {
        for n in [2, 4] {
            v.push(benchgen::gen_vary(kind, n, 0).unwrap());
        }
    }
    v.push(benchgen::gen_complex(2, 1).unwrap());
    v.push(benchgen::gen_complex(4, 2).unwrap());
    for seed in 0..60 {
        v.push(benchgen::gen_random_small(seed));
    }
    v
}

/// `resource_available` stays within `[0, total]` for every interface and link.
pub fn resources_in_range(inst: &ProblemInstance, g: &GroundProblem, s: &GroundState) -> Result<(), String> {
    for (v, f) in g.fluents.iter().enumerate() {
        if f.fluent.name() != "resource_available" {
            continue;
        }
        let obj = g.object(f.args[0]);
        let r = ResourceKind::from_name(g.object(f.args[1])).unwrap();
        let total = match (inst.interface(obj), inst.link(obj)) {
            (Some(i), _) => i.total[r],
            (_, Some(l)) => l.total_bw,
            _ => return Err(format!("unknown resource holder {obj}")),
        };
        let Some(val) = s.val(v as u32) else { continue };
        if val.is_negative() || val > total {
            return Err(format!("{} = {val} outside [0, {total}]", g.fluent_text(v as u32)));
        }
    }
    Ok(())
}
