//! Relaxed-reachability pruning.
//!
//! Propositions accumulate without deletes; each fluent widens to an
//! interval: decreases open the lower bound, increases open the upper bound,
//! assignments add their value. An action survives when its preconditions are
//! satisfiable in the fixpoint. Any real plan only uses surviving actions, so
//! plans over the pruned problem are plans over the original.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{GroundAction, GroundProblem, GroundState, GroundingStats, NumOp};
use crate::rational::Q;

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub problem: GroundProblem,
    pub stats: GroundingStats,
    /// Witness text when some goal is unreachable even under relaxation.
    pub unsolvable: Option<String>,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    defined: bool,
    lo: Option<Q>,
    hi: Option<Q>,
}

impl Interval {
    fn admits_at_least(&self, bound: Q) -> bool {
        self.defined && self.hi.is_none_or(|h| h >= bound)
    }
}

struct Fixpoint {
    reached: FixedBitSet,
    usable: Vec<bool>,
    intervals: Vec<Interval>,
}

fn fixpoint(p: &GroundProblem) -> Fixpoint {
    let mut reached = p.init.props.clone();
    let init_props = &p.init.props;
    let mut intervals: Vec<Interval> = (0..p.fluents.len())
        .map(|v| match p.init.val(v as u32) {
            Some(q) => Interval { defined: true, lo: Some(q), hi: Some(q) },
            None => Interval { defined: false, lo: None, hi: None },
        })
        .collect();
    let mut usable = vec![false; p.actions.len()];
    let ok = |a: &GroundAction, reached: &FixedBitSet, iv: &[Interval]| -> bool {
        a.static_ok
            && a.pre_pos.iter().all(|&q| reached.contains(q as usize))
            && a.pre_neg.iter().all(|&q| !init_props.contains(q as usize))
            && a.pre_any.iter().all(|g| g.iter().any(|&q| reached.contains(q as usize)))
            && a.pre_num.iter().all(|c| iv[c.var as usize].admits_at_least(c.bound))
    };
    loop {
        let mut changed = false;
        for (i, a) in p.actions.iter().enumerate() {
            if usable[i] || !ok(a, &reached, &intervals) {
                continue;
            }
            usable[i] = true;
            changed = true;
            for &q in &a.add {
                reached.insert(q as usize);
            }
            for e in &a.num {
                let iv = &mut intervals[e.var as usize];
                match e.op {
                    NumOp::Decrease if e.value.is_positive() => iv.lo = None,
                    NumOp::Decrease if e.value.is_negative() => iv.hi = None,
                    NumOp::Increase if e.value.is_positive() => iv.hi = None,
                    NumOp::Increase if e.value.is_negative() => iv.lo = None,
                    NumOp::Assign => {
                        if iv.defined {
                            iv.lo = iv.lo.map(|l| l.min(e.value));
                            iv.hi = iv.hi.map(|h| h.max(e.value));
                        } else {
                            *iv = Interval { defined: true, lo: Some(e.value), hi: Some(e.value) };
                        }
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
    Fixpoint { reached, usable, intervals }
}

/// Removes actions unusable under relaxation and the propositions and
/// fluents no surviving action or goal mentions.
pub fn prune(p: &GroundProblem) -> PruneOutcome {
    let fx = fixpoint(p);
    let reached = |q: u32| fx.reached.contains(q as usize);

    let mut unsolvable = None;
    for (n, g) in p.goal.groups.iter().enumerate() {
        if !g.iter().any(|&q| reached(q)) {
            let shown: Vec<String> = g.iter().take(3).map(|&q| p.prop_text(q)).collect();
            let witness = if shown.is_empty() {
                format!("goal {n} has no candidate sink")
            } else {
                format!("goal {n} unreachable under relaxation: none of {} can be achieved", shown.join(", "))
            };
            unsolvable = Some(witness);
            break;
        }
    }
    let lat = fx.intervals[p.latency_var as usize];
    if unsolvable.is_none() && lat.lo.is_some_and(|l| l > p.goal.latency_bound) {
        unsolvable = Some("absolute-latency already exceeds the bound".to_string());
    }

    let mut keep_prop = FixedBitSet::with_capacity(p.props.len());
    let mut keep_var = FixedBitSet::with_capacity(p.fluents.len());
    let mut survivors: Vec<GroundAction> = Vec::new();
    for (i, a) in p.actions.iter().enumerate() {
        if !fx.usable[i] {
            continue;
        }
        let mut a = a.clone();
        a.pre_neg.retain(|&q| reached(q));
        for g in &mut a.pre_any {
            g.retain(|&q| reached(q));
        }
        for &q in a.pre_pos.iter().chain(&a.pre_neg).chain(a.pre_any.iter().flatten()).chain(&a.add) {
            keep_prop.insert(q as usize);
        }
        for v in a.pre_num.iter().map(|c| c.var).chain(a.num.iter().map(|e| e.var)) {
            keep_var.insert(v as usize);
        }
        survivors.push(a);
    }
    let groups: Vec<Vec<u32>> = p
        .goal
        .groups
        .iter()
        .map(|g| g.iter().copied().filter(|&q| reached(q)).collect())
        .collect();
    for &q in groups.iter().flatten() {
        keep_prop.insert(q as usize);
    }
    keep_var.insert(p.latency_var as usize);
    keep_var.insert(p.cost_var as usize);
    // total-cost stays last.
    let mut var_order: Vec<usize> = keep_var.ones().filter(|&v| v != p.cost_var as usize).collect();
    var_order.push(p.cost_var as usize);

    let prop_map: HashMap<u32, u32> = keep_prop.ones().enumerate().map(|(n, o)| (o as u32, n as u32)).collect();
    let var_map: HashMap<u32, u32> = var_order.iter().enumerate().map(|(n, &o)| (o as u32, n as u32)).collect();
    let mp = |q: &mut u32| *q = prop_map[q];
    let mv = |v: &mut u32| *v = var_map[v];

    for a in &mut survivors {
        a.pre_pos.iter_mut().for_each(mp);
        a.pre_neg.iter_mut().for_each(mp);
        a.pre_any.iter_mut().flatten().for_each(mp);
        a.add.iter_mut().for_each(mp);
        a.pre_num.iter_mut().for_each(|c| mv(&mut c.var));
        a.num.iter_mut().for_each(|e| mv(&mut e.var));
    }

    let mut init = GroundState::empty(prop_map.len(), var_order.len());
    for (&o, &n) in &prop_map {
        if p.init.has(o) {
            init.set_prop(n);
        }
    }
    for (n, &o) in var_order.iter().enumerate() {
        if let Some(q) = p.init.val(o as u32) {
            init.set_val(n as u32, q);
        }
    }

    let mut problem = GroundProblem {
        name: p.name.clone(),
        objects: p.objects.clone(),
        props: keep_prop.ones().map(|o| p.props[o].clone()).collect(),
        fluents: var_order.iter().map(|&o| p.fluents[o].clone()).collect(),
        actions: survivors,
        init,
        goal: super::Goal {
            groups: groups.into_iter().map(|g| g.into_iter().map(|q| prop_map[&q]).collect()).collect(),
            latency_bound: p.goal.latency_bound,
        },
        latency_var: var_map[&p.latency_var],
        cost_var: var_map[&p.cost_var],
        init_encoding: p.init_encoding.clone(),
        index: HashMap::new(),
        object_index: p.object_index.clone(),
    };
    problem.rebuild_index();
    let stats = GroundingStats {
        f_pruned: problem.num_props(),
        x_pruned: problem.num_fluents(),
        a_pruned: problem.num_actions(),
        ..p.stats()
    };
    PruneOutcome { problem, stats, unsolvable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use crate::grounding::ground;

    #[test]
    fn calibration_rows_shrink() {
        for (w, s) in [(2, 1), (2, 2), (2, 3), (4, 3)] {
            let g = ground(&benchgen::table4_instance(w, s));
            let out = prune(&g);
            let st = out.stats;
            assert!(st.f_pruned <= st.f && st.x_pruned <= st.x && st.a_pruned <= st.a);
            assert!(st.a_pruned < st.a);
            assert!(out.unsolvable.is_none());
        }
    }

    #[test]
    fn unreachable_format_is_unsolvable() {
        let mut inst = benchgen::minimal_chain();
        // Add a data format nothing produces, with a sink of that format.
        inst.component_types.push(crate::model::ComponentType {
            id: "orphan".into(),
            class: crate::model::ComponentClass::Data,
            msg_size: Some(Q::ONE),
            input_format: None,
            output_format: None,
        });
        let mut sink = inst.components.iter().find(|c| c.id == "dc1").unwrap().clone();
        sink.id = "dcx".into();
        sink.ctype = "orphan".into();
        inst.components.push(sink);
        inst.goals[0].dest_format = "orphan".into();
        let out = prune(&ground(&inst));
        assert!(out.unsolvable.is_some());
    }
}
