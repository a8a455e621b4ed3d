use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{ComponentClass, LinkKind, ProblemInstance, ResourceKind};
use crate::rational::Q;

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub invariant: &'static str,
    pub object: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.object, self.invariant, self.message)
    }
}

const RESERVED: [&str; 6] = ["storage", "compute", "network", "config", "input", "output"];

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct Sink(Vec<Diagnostic>);

impl Sink {
    fn push(&mut self, invariant: &'static str, object: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            invariant,
            object: object.to_string(),
            message: message.into(),
        });
    }
}

/// Checks every model invariant and returns one diagnostic per violation.
/// An empty list means the instance is well formed.
pub fn validate_model(inst: &ProblemInstance) -> Vec<Diagnostic> {
    let mut d = Sink(Vec::new());
    let g = &inst.graph;

    let mut seen: BTreeMap<String, &'static str> = BTreeMap::new();
    let mut ids: Vec<(&str, &'static str)> = Vec::new();
    ids.extend(g.sites.iter().map(|s| (s.id.as_str(), "site")));
    ids.extend(g.interfaces.iter().map(|s| (s.id.as_str(), "interface")));
    ids.extend(g.links.iter().map(|s| (s.id.as_str(), "link")));
    ids.extend(inst.component_types.iter().map(|s| (s.id.as_str(), "component type")));
    ids.extend(inst.components.iter().map(|s| (s.id.as_str(), "component")));
    for (id, what) in ids {
        if !is_symbol(id) {
            d.push("symbol", id, format!("{what} id is not a valid symbol"));
        }
        if RESERVED.contains(&id.to_ascii_lowercase().as_str()) {
            d.push("unique-id", id, format!("{what} id collides with a domain constant"));
        }
        if let Some(prev) = seen.insert(id.to_ascii_lowercase(), what) {
            d.push("unique-id", id, format!("duplicate id (already used by a {prev})"));
        }
    }

    let site_ids: BTreeSet<&str> = g.sites.iter().map(|s| s.id.as_str()).collect();

    for i in &g.interfaces {
        if !site_ids.contains(i.site.as_str()) {
            d.push("reference", &i.id, format!("unknown site `{}`", i.site));
        }
        for r in ResourceKind::ALL {
            let (a, t) = (i.available[r], i.total[r]);
            if a.is_negative() || t.is_negative() {
                d.push("capacity-range", &i.id, format!("negative {r} capacity"));
            }
            if a > t {
                d.push("capacity-range", &i.id, format!("available {r} {a} exceeds total {t}"));
            }
        }
        if !i.capacity().is_positive() {
            let r = i.kind.resource();
            d.push("interface-kind", &i.id, format!("{} interface needs positive {r} capacity", i.kind.name()));
        }
    }

    let mut direct: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
    for l in &g.links {
        if l.kind == LinkKind::Direct {
            direct.insert(&l.id, (&l.endpoints.0, &l.endpoints.1));
        }
    }
    for l in &g.links {
        for s in [&l.endpoints.0, &l.endpoints.1] {
            if !site_ids.contains(s.as_str()) {
                d.push("reference", &l.id, format!("unknown site `{s}`"));
            }
        }
        if !l.total_bw.is_positive() {
            d.push("capacity-range", &l.id, "total bandwidth must be positive");
        }
        if l.available_bw.is_negative() || l.available_bw > l.total_bw {
            d.push("capacity-range", &l.id, "available bandwidth outside [0, total]");
        }
        if l.latency.is_negative() {
            d.push("capacity-range", &l.id, "negative latency");
        }
        match l.kind {
            LinkKind::Direct => {
                if !l.hops.is_empty() {
                    d.push("link-hops", &l.id, "direct link must not list hops");
                }
            }
            LinkKind::Composite => {
                if l.hops.len() != 2 {
                    d.push("link-hops", &l.id, format!("composite link needs exactly 2 hops, found {}", l.hops.len()));
                    continue;
                }
                if l.is_intrasite() {
                    d.push("link-hops", &l.id, "composite link must join two distinct sites");
                    continue;
                }
                let hops: Vec<Option<(&str, &str)>> = l.hops.iter().map(|h| direct.get(h.as_str()).copied()).collect();
                if hops.iter().any(|h| h.is_none()) || l.hops[0] == l.hops[1] {
                    d.push("link-hops", &l.id, "hops must be two distinct direct links");
                    continue;
                }
                let (a, b) = (l.endpoints.0.as_str(), l.endpoints.1.as_str());
                let (h1, h2) = (hops[0].unwrap(), hops[1].unwrap());
                let chain = |x: (&str, &str), y: (&str, &str)| -> bool {
                    let mid = if x.0 == a { Some(x.1) } else if x.1 == a { Some(x.0) } else { None };
                    match mid {
                        Some(m) if m != a && m != b => (y.0 == m && y.1 == b) || (y.1 == m && y.0 == b),
                        _ => false,
                    }
                };
                if !(chain(h1, h2) || chain(h2, h1)) {
                    d.push("link-hops", &l.id, "hops do not chain the endpoints through one intermediate site");
                }
            }
        }
    }

    let mut type_class: BTreeMap<&str, ComponentClass> = BTreeMap::new();
    for t in &inst.component_types {
        type_class.insert(&t.id, t.class);
    }
    for t in &inst.component_types {
        match t.class {
            ComponentClass::Data => {
                if !t.msg_size.map(|m| m.is_positive()).unwrap_or(false) {
                    d.push("msg-size", &t.id, "data type needs a positive msg_size");
                }
                if t.input_format.is_some() || t.output_format.is_some() {
                    d.push("formats", &t.id, "data type must not declare formats");
                }
            }
            ComponentClass::Processing => {
                for (label, f) in [("input_format", &t.input_format), ("output_format", &t.output_format)] {
                    match f {
                        None => d.push("formats", &t.id, format!("processing type lacks {label}")),
                        Some(f) if type_class.get(f.as_str()) != Some(&ComponentClass::Data) => {
                            d.push("formats", &t.id, format!("{label} `{f}` is not a data type"))
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    for c in &inst.components {
        let Some(class) = type_class.get(c.ctype.as_str()).copied() else {
            d.push("reference", &c.id, format!("unknown component type `{}`", c.ctype));
            continue;
        };
        if !c.msg_max_rate.is_positive() {
            d.push("msg-rate", &c.id, "msg_max_rate must be positive");
        }
        for (r, v) in c.demand.iter() {
            if v.is_negative() {
                d.push("demand-class", &c.id, format!("negative {r} demand"));
            }
        }
        if class == ComponentClass::Data && c.demand[ResourceKind::Compute].is_positive() {
            d.push("demand-class", &c.id, "data component demands compute");
        }
        if class == ComponentClass::Processing && c.demand[ResourceKind::Storage].is_positive() {
            d.push("demand-class", &c.id, "processing component demands storage");
        }
        for s in &c.config_sites {
            if !site_ids.contains(s.as_str()) {
                d.push("reference", &c.id, format!("unknown config site `{s}`"));
            }
        }
        match (&c.placement, c.fixed) {
            (None, true) => d.push("fixed-placement", &c.id, "fixed component lacks a placement"),
            (Some(_), false) => d.push("fixed-placement", &c.id, "only fixed components carry a placement"),
            (Some(p), true) => match inst.interface(p) {
                None => d.push("reference", &c.id, format!("unknown placement interface `{p}`")),
                Some(i) if i.kind != class.interface_kind() => {
                    d.push("fixed-placement", &c.id, format!("placement `{p}` is not a {} interface", class.interface_kind().pddl_type()))
                }
                _ => {}
            },
            (None, false) => {}
        }
    }

    for (n, goal) in inst.goals.iter().enumerate() {
        let label = format!("goal[{n}]");
        match inst.component(&goal.source) {
            Some(src) if src.fixed && inst.class_of(src) == Some(ComponentClass::Data) => {}
            _ => d.push("goal-source", &label, format!("source `{}` is not a fixed data component", goal.source)),
        }
        if !site_ids.contains(goal.dest_site.as_str()) {
            d.push("reference", &label, format!("unknown destination site `{}`", goal.dest_site));
        }
        if type_class.get(goal.dest_format.as_str()) != Some(&ComponentClass::Data) {
            d.push("goal-format", &label, format!("`{}` is not a data type", goal.dest_format));
        } else if inst.goal_candidates(goal).is_empty() {
            d.push("goal-candidates", &label, "no data component of the destination format can sit at the destination site");
        }
    }

    if !inst.latency_bound.is_positive() {
        d.push("latency-bound", "problem", "latency bound must be positive");
    }
    for (r, w) in inst.cost_weights.iter() {
        if w < Q::ZERO {
            d.push("cost-weight", "problem", format!("negative {r} weight"));
        }
    }
    d.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use crate::model::*;
    use proptest::prelude::*;

    fn base() -> ProblemInstance {
        benchgen::minimal_chain()
    }

    #[test]
    fn minimal_instance_is_clean() {
        assert_eq!(validate_model(&base()), vec![]);
    }

    #[test]
    fn available_above_total_is_reported() {
        let mut inst = base();
        let i = inst.graph.interfaces.iter_mut().find(|i| i.kind == InterfaceKind::DataSharing).unwrap();
        i.available[ResourceKind::Storage] = i.total[ResourceKind::Storage] + Q::ONE;
        let id = i.id.clone();
        let diags = validate_model(&inst);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].object, id);
        assert_eq!(diags[0].invariant, "capacity-range");
    }

    #[test]
    fn composite_with_three_hops_is_reported() {
        let mut inst = benchgen::gen_vary(benchgen::VaryKind::Sites, 3, 0).unwrap();
        let cl = inst.graph.links.iter_mut().find(|l| l.kind == LinkKind::Composite).unwrap();
        let extra = cl.hops[0].clone();
        cl.hops.push(extra);
        let diags = validate_model(&inst);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].invariant, "link-hops");
    }

    #[test]
    fn broken_hop_chain_is_reported() {
        let mut inst = benchgen::gen_vary(benchgen::VaryKind::Sites, 3, 0).unwrap();
        let intrasite = inst.graph.links.iter().find(|l| l.is_intrasite()).unwrap().id.clone();
        let cl = inst.graph.links.iter_mut().find(|l| l.kind == LinkKind::Composite).unwrap();
        cl.hops[1] = intrasite;
        let diags = validate_model(&inst);
        assert!(diags.iter().any(|d| d.invariant == "link-hops"), "{diags:?}");
    }

    #[test]
    fn duplicate_ids_and_bad_references() {
        let mut inst = base();
        let s = inst.graph.sites[0].clone();
        inst.graph.sites.push(s);
        inst.components[0].ctype = "nope".into();
        let diags = validate_model(&inst);
        assert!(diags.iter().any(|d| d.invariant == "unique-id"));
        assert!(diags.iter().any(|d| d.invariant == "reference" && d.message.contains("nope")));
    }

    #[test]
    fn fixed_needs_placement() {
        let mut inst = base();
        let c = inst.components.iter_mut().find(|c| c.fixed).unwrap();
        c.placement = None;
        let diags = validate_model(&inst);
        assert!(diags.iter().any(|d| d.invariant == "fixed-placement"));
    }

    proptest! {
        // Arbitrary field damage must produce diagnostics, never a panic.
        #[test]
        fn validate_model_is_total(
            seed in 0u64..2000,
            which in 0usize..8,
            n in -5i64..5,
        ) {
            let mut inst = benchgen::gen_random_small(seed);
            let v = Q::int(n);
            match which {
                0 => if let Some(i) = inst.graph.interfaces.first_mut() { i.available[ResourceKind::Storage] = v; },
                1 => if let Some(l) = inst.graph.links.first_mut() { l.total_bw = v; l.hops.push("x".into()); },
                2 => if let Some(c) = inst.components.first_mut() { c.msg_max_rate = v; c.placement = Some("zz".into()); },
                3 => inst.latency_bound = v,
                4 => inst.component_types.clear(),
                5 => inst.graph.sites.clear(),
                6 => if let Some(l) = inst.graph.links.last_mut() { l.kind = LinkKind::Composite; l.hops = vec!["a".into(), "a".into()]; },
                _ => if let Some(g) = inst.goals.first_mut() { g.dest_format = "missing".into(); },
            }
            let _ = validate_model(&inst);
        }

        #[test]
        fn generated_small_instances_validate(seed in 0u64..5000) {
            let inst = benchgen::gen_random_small(seed);
            prop_assert!(validate_model(&inst).is_empty());
        }
    }
}
