//! Reader for the emitted PDDL subset. Problems are lifted back into a
//! [`ProblemInstance`], so they ground through the same code path as
//! configuration files.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::sexpr::{parse, Sexpr};
use super::DOMAIN_NAME;
use crate::grounding::{ground, GroundProblem, Schema};
use crate::model::{
    validate_model, ComponentClass, ComponentType, GoalDemand, Interface, InterfaceKind, Link, LinkKind, ProblemInstance,
    ResourceGraph, ResourceKind, ResourceMap, Site, WorkflowComponent,
};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("{file}:{line}: syntax error: {message}")]
    Syntax { file: &'static str, line: usize, message: String },
    #[error("{file}:{line}: unsupported construct: {construct}")]
    Unsupported { file: &'static str, line: usize, construct: String },
    #[error("{file}:{line}: {message}")]
    Malformed { file: &'static str, line: usize, message: String },
    #[error("problem does not describe a valid instance: {0}")]
    Invalid(String),
}

const UNSUPPORTED: &[(&str, &str)] = &[
    (":durative-action", "durative action"),
    (":derived", "derived predicate"),
    (":constraints", "state trajectory constraints"),
    ("when", "conditional effect"),
    ("preference", "preference"),
    ("at", "timed condition or initial literal"),
    ("over", "timed condition"),
    (":process", "process"),
    (":event", "event"),
];

fn check_supported(e: &Sexpr, file: &'static str) -> Result<(), PddlError> {
    if let Some(items) = e.list() {
        if let Some(h) = e.head() {
            if let Some((_, name)) = UNSUPPORTED.iter().find(|(k, _)| *k == h) {
                // `at` is also a legal object name; only flag it as a list head
                // followed by a time specifier or number.
                let timed = h != "at"
                    || items.get(1).and_then(|x| x.atom()).is_some_and(|a| {
                        matches!(a.to_ascii_lowercase().as_str(), "start" | "end") || a.parse::<f64>().is_ok()
                    });
                if timed {
                    return Err(PddlError::Unsupported { file, line: e.line(), construct: name.to_string() });
                }
            }
        }
        for x in items {
            check_supported(x, file)?;
        }
    }
    Ok(())
}

fn syntax(file: &'static str, text: &str) -> Result<Sexpr, PddlError> {
    let e = parse(text).map_err(|(line, message)| PddlError::Syntax { file, line, message })?;
    check_supported(&e, file)?;
    if e.head().as_deref() != Some("define") {
        return Err(PddlError::Malformed { file, line: e.line(), message: "expected `(define ...)`".into() });
    }
    Ok(e)
}

fn check_domain(text: &str) -> Result<(), PddlError> {
    const F: &str = "domain";
    let d = syntax(F, text)?;
    let items = d.list().unwrap_or_default();
    let name = items.get(1).and_then(|x| x.list()).and_then(|v| v.get(1)).and_then(|x| x.atom());
    if name.map(|n| n.to_ascii_lowercase()) != Some(DOMAIN_NAME.to_string()) {
        return Err(PddlError::Malformed { file: F, line: d.line(), message: format!("expected domain `{DOMAIN_NAME}`") });
    }
    let actions: BTreeSet<String> = items
        .iter()
        .filter(|x| x.head().as_deref() == Some(":action"))
        .filter_map(|x| x.list()?.get(1)?.atom().map(|a| a.to_ascii_lowercase()))
        .collect();
    let expected: BTreeSet<String> = Schema::ALL.iter().map(|s| s.name().to_string()).collect();
    if actions != expected {
        let missing: Vec<_> = expected.difference(&actions).cloned().collect();
        let extra: Vec<_> = actions.difference(&expected).cloned().collect();
        return Err(PddlError::Malformed {
            file: F,
            line: d.line(),
            message: format!("action set differs: missing {missing:?}, unexpected {extra:?}"),
        });
    }
    Ok(())
}

#[derive(Default)]
struct Facts {
    types: BTreeMap<String, String>,
    order: Vec<String>,
    located: BTreeMap<String, String>,
    config: BTreeMap<String, BTreeSet<String>>,
    linked: BTreeMap<String, (String, String)>,
    hops: BTreeMap<String, Vec<String>>,
    type_of: BTreeMap<String, String>,
    input_format: BTreeMap<String, String>,
    output_format: BTreeMap<String, String>,
    fixed: BTreeSet<String>,
    scheduled: BTreeMap<String, String>,
    values: BTreeMap<(String, Vec<String>), Q>,
}

impl Facts {
    fn val(&self, f: &str, args: &[&str]) -> Option<Q> {
        self.values.get(&(f.to_string(), args.iter().map(|s| s.to_string()).collect())).copied()
    }

    fn of_type(&self, t: &str) -> Vec<String> {
        self.order.iter().filter(|o| self.types[*o] == t).cloned().collect()
    }
}

const OBJECT_TYPES: &[&str] = &["S", "DSI", "DPI", "DL", "CL", "DC", "PC", "DCT", "PCT"];

/// Lifts an emitted problem back into an instance.
pub fn read_problem(domain: &str, problem: &str) -> Result<ProblemInstance, PddlError> {
    const F: &str = "problem";
    check_domain(domain)?;
    let p = syntax(F, problem)?;
    let bad = |e: &Sexpr, m: String| PddlError::Malformed { file: F, line: e.line(), message: m };
    let items = p.list().unwrap_or_default();
    let name = items
        .get(1)
        .filter(|x| x.head().as_deref() == Some("problem"))
        .and_then(|x| x.list()?.get(1)?.atom())
        .ok_or_else(|| bad(&p, "expected `(problem NAME)`".into()))?
        .to_string();

    let mut facts = Facts::default();
    let mut goal: Option<&Sexpr> = None;
    for sec in &items[2..] {
        let args = &sec.list().ok_or_else(|| bad(&p, format!("unexpected `{sec}`")))?[1..];
        match sec.head().as_deref() {
            Some(":domain") => {
                if args.first().and_then(|a| a.atom()).map(|a| a.to_ascii_lowercase()) != Some(DOMAIN_NAME.into()) {
                    return Err(bad(sec, format!("problem is not for domain `{DOMAIN_NAME}`")));
                }
            }
            Some(":objects") => read_objects(args, &mut facts).map_err(|m| bad(sec, m))?,
            Some(":init") => {
                for e in args {
                    read_init(e, &mut facts).map_err(|m| bad(e, m))?;
                }
            }
            Some(":goal") => goal = args.first(),
            Some(":metric") => {
                if !sec.to_string().eq_ignore_ascii_case("(:metric minimize (total-cost))") {
                    return Err(bad(sec, "only `(:metric minimize (total-cost))` is supported".into()));
                }
            }
            Some(other) => {
                return Err(PddlError::Unsupported { file: F, line: sec.line(), construct: format!("section {other}") })
            }
            None => return Err(bad(sec, "section without a keyword".into())),
        }
    }
    let mut inst = lift(name, &facts).map_err(|m| bad(&p, m))?;
    if let Some(g) = goal {
        read_goal(g, &facts, &mut inst).map_err(|m| bad(g, m))?;
    }
    let diags = validate_model(&inst);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| format!("{}: {}", d.object, d.message)).collect();
        return Err(PddlError::Invalid(msgs.join("; ")));
    }
    Ok(inst)
}

/// Reads and grounds an emitted problem.
pub fn read_pddl(domain: &str, problem: &str) -> Result<GroundProblem, PddlError> {
    Ok(ground(&read_problem(domain, problem)?))
}

fn read_objects(args: &[Sexpr], facts: &mut Facts) -> Result<(), String> {
    let mut pending: Vec<String> = Vec::new();
    let mut it = args.iter();
    while let Some(x) = it.next() {
        let a = x.atom().ok_or("nested list in :objects")?;
        if a == "-" {
            let t = it.next().and_then(|t| t.atom()).ok_or("missing type after `-`")?;
            let canon = OBJECT_TYPES
                .iter()
                .find(|k| k.eq_ignore_ascii_case(t))
                .ok_or_else(|| format!("objects of type `{t}` are not supported"))?;
            for o in pending.drain(..) {
                if facts.types.insert(o.clone(), canon.to_string()).is_some() {
                    return Err(format!("object `{o}` declared twice"));
                }
                facts.order.push(o);
            }
        } else {
            pending.push(a.to_string());
        }
    }
    if !pending.is_empty() {
        return Err(format!("untyped objects: {}", pending.join(" ")));
    }
    Ok(())
}

fn atoms(e: &Sexpr) -> Result<Vec<&str>, String> {
    e.list()
        .ok_or_else(|| format!("expected a list, found `{e}`"))?
        .iter()
        .map(|x| x.atom().ok_or_else(|| format!("unexpected nested term in `{e}`")))
        .collect()
}

fn read_init(e: &Sexpr, f: &mut Facts) -> Result<(), String> {
    if e.head().as_deref() == Some("=") {
        let v = e.list().unwrap();
        if v.len() != 3 {
            return Err(format!("malformed assignment `{e}`"));
        }
        let lhs = atoms(&v[1])?;
        let value: Q = v[2].atom().and_then(|a| a.parse().ok()).ok_or_else(|| format!("bad number in `{e}`"))?;
        let (name, args) = lhs.split_first().ok_or("empty fluent")?;
        f.values.insert((name.to_ascii_lowercase(), args.iter().map(|s| s.to_string()).collect()), value);
        return Ok(());
    }
    let a = atoms(e)?;
    let (pred, args) = a.split_first().ok_or("empty atom")?;
    let s = |i: usize| -> Result<String, String> {
        args.get(i).map(|x| x.to_string()).ok_or_else(|| format!("too few arguments in `{e}`"))
    };
    match pred.to_ascii_lowercase().as_str() {
        "available_at" => {
            let (obj, res, site) = (s(0)?, s(1)?, s(2)?);
            if res == ResourceKind::Config.name() {
                f.config.entry(obj).or_default().insert(site);
            } else {
                f.located.entry(obj).or_insert(site);
            }
        }
        "linked" => {
            f.linked.entry(s(0)?).or_insert((s(1)?, s(2)?));
        }
        "link_uses" => f.hops.entry(s(0)?).or_default().push(s(1)?),
        "type_of" => {
            f.type_of.insert(s(0)?, s(1)?);
        }
        "input_format" => {
            f.input_format.insert(s(0)?, s(1)?);
        }
        "output_format" => {
            f.output_format.insert(s(0)?, s(1)?);
        }
        "fixed" => {
            f.fixed.insert(s(0)?);
        }
        "scheduled_on" => {
            f.scheduled.insert(s(0)?, s(1)?);
        }
        "has_data" | "has_input" | "connected" | "processed_by" => {}
        other => return Err(format!("unknown predicate `{other}`")),
    }
    Ok(())
}

fn lift(name: String, f: &Facts) -> Result<ProblemInstance, String> {
    let res = |kind: ResourceKind, fl: &str, obj: &str| f.val(fl, &[obj, kind.name()]);
    let mut graph = ResourceGraph::default();
    for s in f.of_type("S") {
        graph.sites.push(Site { id: s, annotations: Default::default() });
    }
    for (ty, kind) in [("DSI", InterfaceKind::DataSharing), ("DPI", InterfaceKind::DataProcessing)] {
        for id in f.of_type(ty) {
            let site = f.located.get(&id).cloned().ok_or_else(|| format!("interface `{id}` has no site"))?;
            let mut total = ResourceMap::new();
            let mut available = ResourceMap::new();
            for r in ResourceKind::ALL {
                total[r] = res(r, "resource_total", &id).unwrap_or(Q::ZERO);
                available[r] = res(r, "resource_available", &id).unwrap_or(total[r]);
            }
            graph.interfaces.push(Interface { id, site, kind, total, available, annotations: Default::default() });
        }
    }
    for (ty, kind) in [("DL", LinkKind::Direct), ("CL", LinkKind::Composite)] {
        for id in f.of_type(ty) {
            let endpoints = f.linked.get(&id).cloned().ok_or_else(|| format!("link `{id}` has no endpoints"))?;
            let total_bw = res(ResourceKind::Network, "resource_total", &id).ok_or_else(|| format!("link `{id}` has no bandwidth"))?;
            graph.links.push(Link {
                hops: f.hops.get(&id).cloned().unwrap_or_default(),
                kind,
                endpoints,
                total_bw,
                available_bw: res(ResourceKind::Network, "resource_available", &id).unwrap_or(total_bw),
                latency: f.val("network_latency", &[&id]).unwrap_or(Q::ZERO),
                id,
            });
        }
    }
    graph.interfaces.sort_by(|a, b| a.id.cmp(&b.id));
    graph.links.sort_by(|a, b| a.id.cmp(&b.id));

    let mut component_types = Vec::new();
    for id in f.of_type("DCT") {
        component_types.push(ComponentType {
            msg_size: f.val("msg_size", &[&id]),
            id,
            class: ComponentClass::Data,
            input_format: None,
            output_format: None,
        });
    }
    for id in f.of_type("PCT") {
        let user = f.type_of.iter().find(|(_, t)| **t == id).map(|(c, _)| c.clone());
        let fmt = |m: &BTreeMap<String, String>| user.as_ref().and_then(|u| m.get(u).cloned());
        component_types.push(ComponentType {
            input_format: fmt(&f.input_format),
            output_format: fmt(&f.output_format),
            id,
            class: ComponentClass::Processing,
            msg_size: None,
        });
    }
    component_types.sort_by(|a, b| a.id.cmp(&b.id));

    let mut components = Vec::new();
    for ty in ["DC", "PC"] {
        for id in f.of_type(ty) {
            let ctype = f.type_of.get(&id).cloned().ok_or_else(|| format!("component `{id}` has no type"))?;
            let mut demand = ResourceMap::new();
            for r in ResourceKind::ALL {
                demand[r] = f.val("work_amount", &[&id, r.name()]).unwrap_or(Q::ZERO);
            }
            let fixed = f.fixed.contains(&id);
            components.push(WorkflowComponent {
                ctype,
                fixed,
                demand,
                msg_max_rate: f.val("msg_max_rate", &[&id]).ok_or_else(|| format!("component `{id}` has no msg_max_rate"))?,
                config_sites: f.config.get(&id).cloned().unwrap_or_default(),
                placement: if fixed { f.scheduled.get(&id).cloned() } else { None },
                id,
            });
        }
    }
    components.sort_by(|a, b| a.id.cmp(&b.id));

    let mut cost_weights = ResourceMap::uniform(Q::ONE);
    for r in ResourceKind::ALL {
        if let Some(w) = f.val("work-cost-weight", &[r.name()]) {
            cost_weights[r] = w;
        }
    }
    Ok(ProblemInstance {
        name,
        graph,
        component_types,
        components,
        goals: Vec::new(),
        latency_bound: Q::int(crate::benchgen::DEFAULT_LATENCY_BOUND_S),
        cost_weights,
    })
}

fn read_goal(g: &Sexpr, f: &Facts, inst: &mut ProblemInstance) -> Result<(), String> {
    let parts: Vec<&Sexpr> = if g.head().as_deref() == Some("and") { g.list().unwrap()[1..].iter().collect() } else { vec![g] };
    for part in parts {
        match part.head().as_deref() {
            Some("<=") => {
                let v = part.list().unwrap();
                let is_latency = v.len() == 3 && v[1].head().as_deref() == Some("absolute-latency");
                let bound = v.get(2).and_then(|x| x.atom()).and_then(|a| a.parse::<Q>().ok());
                match (is_latency, bound) {
                    (true, Some(b)) => inst.latency_bound = b,
                    _ => return Err(format!("unsupported numeric goal `{part}`")),
                }
            }
            Some("or") | Some("has_data") => {
                let first = if part.head().as_deref() == Some("or") { part.list().unwrap().get(1) } else { Some(part) };
                let first = first.ok_or("empty goal disjunction")?;
                let a = atoms(first)?;
                if a.len() != 5 || !a[0].eq_ignore_ascii_case("has_data") {
                    return Err(format!("expected a has_data goal, found `{first}`"));
                }
                let dest_site = f.located.get(a[2]).cloned().ok_or_else(|| format!("unknown interface `{}`", a[2]))?;
                let dest_format = f.type_of.get(a[1]).cloned().ok_or_else(|| format!("unknown component `{}`", a[1]))?;
                inst.goals.push(GoalDemand { source: a[3].to_string(), dest_site, dest_format });
            }
            _ => return Err(format!("unsupported goal `{part}`")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{self, VaryKind};
    use crate::pddl::{emit_domain, emit_problem};

    #[test]
    fn round_trip_is_byte_stable() {
        for inst in [benchgen::minimal_chain(), benchgen::table4_instance(2, 3), benchgen::gen_complex(4, 2).unwrap()] {
            let p1 = emit_problem(&inst);
            let back = read_problem(&emit_domain(), &p1).unwrap();
            assert_eq!(emit_problem(&back), p1);
            assert_eq!(ground(&back).stats(), ground(&inst).stats());
        }
    }

    #[test]
    fn vary_families_round_trip() {
        for kind in [VaryKind::Interfaces, VaryKind::DirectLinks, VaryKind::Sites] {
            let inst = benchgen::gen_vary(kind, 3, 0).unwrap();
            let g = read_pddl(&emit_domain(), &emit_problem(&inst)).unwrap();
            assert_eq!(g.stats(), ground(&inst).stats());
        }
    }

    #[test]
    fn durative_actions_are_rejected() {
        let d = emit_domain().replace("(:action propagate_output", "(:durative-action propagate_output");
        let e = read_problem(&d, &emit_problem(&benchgen::minimal_chain())).unwrap_err();
        assert!(matches!(e, PddlError::Unsupported { ref construct, .. } if construct == "durative action"), "{e}");
    }

    #[test]
    fn foreign_domain_is_rejected() {
        let d = emit_domain().replace("(domain worksworld)", "(domain blocks)");
        assert!(read_problem(&d, &emit_problem(&benchgen::minimal_chain())).is_err());
    }
}
