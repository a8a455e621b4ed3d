//! Plan text format and independent replay of plans against the unpruned
//! ground problem.
//!
//! Plan files hold one `(schema arg ...)` per line. Lines starting with `;`
//! are comments, except `; cost = X` and `; latency = X`, which declare the
//! expected totals. A leading `N:` or `N.N:` timestamp is accepted and
//! ignored.

use thiserror::Error;

use crate::grounding::{ground, GroundProblem, GroundState, Pred, Schema, Unmet};
use crate::model::{workflow_dag_check, ComponentClass, DagVerdict, ProblemInstance, WorkflowGraph};
use crate::planner::Plan;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionRef {
    pub schema: Schema,
    pub args: Vec<String>,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlanText {
    pub steps: Vec<ActionRef>,
    pub declared_cost: Option<Q>,
    pub declared_latency: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PlanParseError {
    pub line: usize,
    pub message: String,
}

fn strip_timestamp(s: &str) -> &str {
    if let Some((head, rest)) = s.split_once(':') {
        let head = head.trim();
        if !head.is_empty() && head.chars().all(|c| c.is_ascii_digit() || c == '.') {
            return rest.trim_start();
        }
    }
    s
}

pub fn parse_plan(text: &str) -> Result<PlanText, PlanParseError> {
    let mut out = PlanText::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| PlanParseError { line, message };
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(c) = s.strip_prefix(';') {
            if let Some((k, v)) = c.split_once('=') {
                let target = match k.trim() {
                    "cost" => &mut out.declared_cost,
                    "latency" => &mut out.declared_latency,
                    _ => continue,
                };
                let q: Q = v.trim().parse().map_err(|_| err(format!("bad number in header: {}", v.trim())))?;
                *target = Some(q);
            }
            continue;
        }
        let s = strip_timestamp(s);
        let s = s.split_once(';').map_or(s, |(a, _)| a).trim();
        let s = s
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| err(format!("expected `(action arg ...)`, found `{s}`")))?;
        let mut words = s.split_whitespace().map(|w| w.to_ascii_lowercase());
        let name = words.next().ok_or_else(|| err("empty action".into()))?;
        let schema = Schema::from_name(&name).ok_or_else(|| err(format!("unknown action `{name}`")))?;
        let args: Vec<String> = words.collect();
        if args.len() != schema.arity() {
            return Err(err(format!("{} expects {} arguments, got {}", schema.name(), schema.arity(), args.len())));
        }
        out.steps.push(ActionRef { schema, args, line });
    }
    Ok(out)
}

/// Plan file text with cost and latency headers.
pub fn emit_plan_text(plan: &Plan) -> String {
    let mut s = format!("; cost = {}\n; latency = {}\n", plan.cost.to_decimal(), plan.latency.to_decimal());
    for step in &plan.steps {
        s.push_str(&step.text());
        s.push('\n');
    }
    s
}

impl From<&Plan> for PlanText {
    fn from(plan: &Plan) -> PlanText {
        PlanText {
            steps: plan
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| ActionRef { schema: s.schema, args: s.args.clone(), line: i + 1 })
                .collect(),
            declared_cost: Some(plan.cost),
            declared_latency: Some(plan.latency),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
    /// Steps applied before the first failure (all of them when valid).
    pub applied: usize,
    pub cost: Q,
    pub latency: Q,
    pub goal_reached: bool,
    pub workflow: WorkflowGraph,
    pub dag: DagVerdict,
}

fn unmet_text(p: &GroundProblem, u: &Unmet) -> String {
    match u {
        Unmet::Static => "argument formats do not match the component's input/output format".into(),
        Unmet::Positive(q) => format!("precondition {} is false", p.prop_text(*q)),
        Unmet::Negative(q) => format!("precondition (not {}) is false", p.prop_text(*q)),
        Unmet::Disjunction(_) => "no link carries the required connection".into(),
        Unmet::Numeric { var, need, have } => {
            let f = p.fluent_text(*var);
            match have {
                Some(h) if f.starts_with("(resource_available") => format!(
                    "would make resource_available < 0 on {f}: needs {}, has {}",
                    need.to_decimal(),
                    h.to_decimal()
                ),
                Some(h) => format!("{f} = {} is below {}", h.to_decimal(), need.to_decimal()),
                None => format!("{f} is undefined"),
            }
        }
    }
}

/// Placed workflow implied by the `connected` atoms of a state.
pub fn workflow_of(p: &GroundProblem, s: &GroundState) -> WorkflowGraph {
    let mut g = WorkflowGraph::default();
    let mut atoms: Vec<_> = s
        .props
        .ones()
        .map(|q| &p.props[q])
        .filter(|a| a.pred == Pred::Connected)
        .map(|a| a.args.iter().map(|&o| p.object(o).to_string()).collect::<Vec<_>>())
        .collect();
    atoms.sort();
    for a in atoms {
        let (link, pc, dpi, dc, dsi, dir) = (&a[0], &a[1], &a[2], &a[3], &a[4], &a[5]);
        let pn = g.node_index(pc, dpi, ComponentClass::Processing);
        let dn = g.node_index(dc, dsi, ComponentClass::Data);
        if dir == "input" {
            g.add_edge(dn, pn, link);
        } else {
            g.add_edge(pn, dn, link);
        }
    }
    g
}

/// Replays `plan` on `p`, which should be the unpruned grounding.
pub fn validate_ground(p: &GroundProblem, plan: &PlanText) -> PlanReport {
    let mut diagnostics = Vec::new();
    let mut s = p.init.clone();
    let mut applied = 0;
    for step in &plan.steps {
        let text = format!("({} {})", step.schema.name(), step.args.join(" "));
        let Some(i) = p.find_action(step.schema, &step.args) else {
            diagnostics.push(format!("line {}: {text}: no such ground action (unknown object or wrong argument type)", step.line));
            break;
        };
        let a = &p.actions[i];
        if let Err(u) = s.check(a) {
            diagnostics.push(format!("line {}: {text} is not applicable: {}", step.line, unmet_text(p, &u)));
            break;
        }
        s = s.apply(a);
        applied += 1;
    }
    let cost = s.vals[p.cost_var as usize];
    let latency = s.vals[p.latency_var as usize];
    let complete = applied == plan.steps.len();
    let groups_met = p.goal.groups.iter().all(|g| g.iter().any(|&q| s.has(q)));
    if complete {
        for (n, g) in p.goal.groups.iter().enumerate() {
            if !g.iter().any(|&q| s.has(q)) {
                diagnostics.push(format!("goal {n} not reached: no sink holds the requested data"));
            }
        }
        if latency > p.goal.latency_bound {
            diagnostics.push(format!(
                "absolute-latency {} exceeds the bound {}",
                latency.to_decimal(),
                p.goal.latency_bound.to_decimal()
            ));
        }
        if let Some(c) = plan.declared_cost {
            if c.to_decimal() != cost.to_decimal() {
                diagnostics.push(format!("declared cost {} differs from replayed cost {}", c.to_decimal(), cost.to_decimal()));
            }
        }
        if let Some(l) = plan.declared_latency {
            if l.to_decimal() != latency.to_decimal() {
                diagnostics.push(format!(
                    "declared latency {} differs from replayed latency {}",
                    l.to_decimal(),
                    latency.to_decimal()
                ));
            }
        }
    }
    let workflow = workflow_of(p, &s);
    let dag = workflow_dag_check(&workflow);
    if complete {
        diagnostics.extend(dag.violations.iter().map(|v| format!("workflow: {v}")));
    }
    PlanReport {
        valid: diagnostics.is_empty(),
        diagnostics,
        applied,
        cost,
        latency,
        goal_reached: groups_met && latency <= p.goal.latency_bound,
        workflow,
        dag,
    }
}

pub fn validate(inst: &ProblemInstance, plan: &PlanText) -> PlanReport {
    validate_ground(&ground(inst), plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use crate::grounding::prune;
    use crate::planner::{plan, SearchConfig};

    fn solved(inst: &ProblemInstance) -> Plan {
        plan(&prune(&ground(inst)).problem, &SearchConfig::default()).plan.unwrap()
    }

    #[test]
    fn planner_output_validates() {
        let inst = benchgen::table4_instance(2, 2);
        let p = solved(&inst);
        let text = emit_plan_text(&p);
        let r = validate(&inst, &parse_plan(&text).unwrap());
        assert!(r.valid, "{:?}", r.diagnostics);
        assert_eq!(r.cost, p.cost);
        assert!(r.dag.ok());
        assert_eq!(r.workflow.nodes.len(), 3);
    }

    #[test]
    fn parse_accepts_timestamps_and_headers() {
        let t = "; cost = 0.5\n0.0: (SCHEDULE_COMPONENT pc1 compute dpi1 compute s1)\n\n1: (schedule_component dc1 storage dsi1 storage s1) ; note\n";
        let p = parse_plan(t).unwrap();
        assert_eq!(p.declared_cost, Some(Q::new(1, 2)));
        assert_eq!(p.steps.len(), 2);
        assert_eq!(p.steps[1].line, 4);
        assert_eq!(p.steps[0].args[0], "pc1");
    }

    #[test]
    fn arity_error_names_schema_and_line() {
        let e = parse_plan("\n(replicate_code pc1 s1 s2)").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("replicate_code"));
        assert!(parse_plan("(fly pc1)").is_err());
        assert!(parse_plan("schedule_component").is_err());
    }

    #[test]
    fn bandwidth_overdraft_is_reported() {
        let mut inst = benchgen::minimal_chain();
        let p = solved(&inst);
        inst.graph.links[0].available_bw = Q::int(5);
        let r = validate(&inst, &PlanText::from(&p));
        assert!(!r.valid);
        assert!(r.diagnostics[0].contains("resource_available < 0"), "{:?}", r.diagnostics);
    }

    #[test]
    fn dropping_a_step_invalidates() {
        let inst = benchgen::minimal_chain();
        let p = solved(&inst);
        for i in 0..p.len() {
            let mut t = PlanText::from(&p);
            t.steps.remove(i);
            t.declared_cost = None;
            t.declared_latency = None;
            assert!(!validate(&inst, &t).valid);
        }
    }

    #[test]
    fn declared_totals_are_checked() {
        let inst = benchgen::minimal_chain();
        let mut t = PlanText::from(&solved(&inst));
        t.declared_cost = Some(Q::int(99));
        let r = validate(&inst, &t);
        assert!(r.diagnostics.iter().any(|d| d.contains("declared cost")));
    }
}
