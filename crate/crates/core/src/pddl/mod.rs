//! PDDL 2.1 (level 2) domain and problem files.

mod read;
mod sexpr;

use std::fmt::Write;

use crate::grounding::{init_encoding, Fluent, Pred, Schema};
use crate::model::{ComponentClass, InterfaceKind, LinkKind, ProblemInstance};

pub use read::{read_pddl, read_problem, PddlError};
pub use sexpr::{parse as parse_sexpr, Sexpr};

pub const DOMAIN_NAME: &str = "worksworld";

/// Type hierarchy as `(children, parent)` lines.
const TYPES: &[(&str, &str)] = &[
    ("I S R Descriptor", "object"),
    ("L IF WC", "I"),
    ("DL CL", "L"),
    ("DSI DPI", "IF"),
    ("DC PC", "WC"),
    ("WCT DIR", "Descriptor"),
    ("DCT PCT", "WCT"),
];

fn params(sig: &[&str]) -> String {
    sig.iter()
        .enumerate()
        .map(|(i, t)| format!("?{} - {t}", (b'a' + i as u8) as char))
        .collect::<Vec<_>>()
        .join(" ")
}

const REPLICATE: &str = "  (:action replicate_code
    :parameters (?wc - WC ?from - S ?to - S ?l - L)
    :precondition (and
      (available_at ?wc config ?from)
      (not (available_at ?wc config ?to))
      (not (= ?from ?to))
      (linked ?l ?from ?to))
    :effect (and
      (available_at ?wc config ?to)
      (increase (total-cost)
        (/ (* (work-cost-weight config) (work_amount ?wc config)) (resource_total ?l network)))))
";

const SCHEDULE: &str = "  (:action schedule_component
    :parameters (?wc - WC ?r - R ?if - IF ?rk - R ?s - S)
    :precondition (and
      (not (fixed ?wc))
      (forall (?x - IF) (not (scheduled_on ?wc ?x)))
      (= ?r ?rk)
      (available_at ?if ?rk ?s)
      (available_at ?wc config ?s)
      (>= (resource_available ?if ?r) (work_amount ?wc ?r)))
    :effect (and
      (scheduled_on ?wc ?if)
      (decrease (resource_available ?if ?r) (work_amount ?wc ?r))
      (assign (msg_actual_rate ?wc ?if) (msg_max_rate ?wc))
      (increase (total-cost)
        (/ (* (work-cost-weight ?r) (work_amount ?wc ?r)) (resource_total ?if ?r)))
      (increase (absolute-latency) (/ 1 (msg_max_rate ?wc)))))
";

const CONNECT_HEAD: &str = "      (scheduled_on ?pc ?dpi)
      (scheduled_on ?dc ?dsi)
      (available_at ?dpi compute ?sp)
      (available_at ?dsi storage ?sd)
      (type_of ?dc ?dct)
      (linked ?l ?sp ?sd)
      (or (and (= ?dir input) (input_format ?pc ?dct))
          (and (= ?dir output) (output_format ?pc ?dct)))
      (forall (?x - L) (not (connected ?x ?pc ?dpi ?dc ?dsi ?dir)))
";

fn connect(composite: bool) -> String {
    let bw = "(* (msg_max_rate ?dc) (msg_size ?dct))";
    let mut s = String::new();
    if composite {
        s.push_str("  (:action connect_composite_link\n");
        s.push_str("    :parameters (?pc - PC ?dpi - DPI ?sp - S ?dc - DC ?dct - DCT ?dsi - DSI ?sd - S ?l - CL ?h1 - DL ?h2 - DL ?dir - DIR)\n");
    } else {
        s.push_str("  (:action connect_direct_link\n");
        s.push_str("    :parameters (?pc - PC ?dpi - DPI ?sp - S ?dc - DC ?dct - DCT ?dsi - DSI ?sd - S ?l - DL ?dir - DIR)\n");
    }
    s.push_str("    :precondition (and\n");
    s.push_str(CONNECT_HEAD);
    let links: &[&str] = if composite { &["?l", "?h1", "?h2"] } else { &["?l"] };
    if composite {
        s.push_str("      (link_uses ?l ?h1)\n      (link_uses ?l ?h2)\n      (not (= ?h1 ?h2))\n");
    }
    for l in links {
        let _ = writeln!(s, "      (>= (resource_available {l} network) {bw})");
    }
    s.pop();
    s.push_str(")\n    :effect (and\n      (connected ?l ?pc ?dpi ?dc ?dsi ?dir)\n");
    for l in links {
        let _ = writeln!(s, "      (decrease (resource_available {l} network) {bw})");
    }
    let cost_links: &[&str] = if composite { &["?h1", "?h2"] } else { &["?l"] };
    let terms: Vec<String> = cost_links
        .iter()
        .map(|l| format!("(/ (* (work-cost-weight network) {bw}) (resource_total {l} network))"))
        .collect();
    if terms.len() == 1 {
        let _ = writeln!(s, "      (increase (total-cost)\n        {})", terms[0]);
    } else {
        let _ = writeln!(s, "      (increase (total-cost) (+\n        {}\n        {}))", terms[0], terms[1]);
    }
    s.push_str("      (increase (absolute-latency) (+ (network_latency ?l) (/ 1 (msg_max_rate ?dc))))))\n");
    s
}

const PROPAGATE: &str = "  (:action propagate_input
    :parameters (?pc - PC ?dpi - DPI ?dc - DC ?dsi - DSI ?src - DC ?srci - DSI)
    :precondition (and
      (exists (?l - L) (connected ?l ?pc ?dpi ?dc ?dsi input))
      (has_data ?dc ?dsi ?src ?srci))
    :effect (and
      (has_input ?pc ?dpi)
      (processed_by ?src ?srci ?pc ?dpi)))

  (:action propagate_output
    :parameters (?pc - PC ?dpi - DPI ?dc - DC ?dsi - DSI ?src - DC ?srci - DSI)
    :precondition (and
      (exists (?l - L) (connected ?l ?pc ?dpi ?dc ?dsi output))
      (has_input ?pc ?dpi)
      (processed_by ?src ?srci ?pc ?dpi))
    :effect (and
      (has_data ?dc ?dsi ?src ?srci)
      (has_input ?dc ?dsi)))
";

pub fn emit_domain() -> String {
    let mut s = format!("(define (domain {DOMAIN_NAME})\n");
    s.push_str("  (:requirements :typing :fluents :negative-preconditions :disjunctive-preconditions\n");
    s.push_str("    :quantified-preconditions :equality)\n");
    s.push_str("  (:types\n");
    for (children, parent) in TYPES {
        let _ = writeln!(s, "    {children} - {parent}");
    }
    s.push_str("  )\n");
    s.push_str("  (:constants storage compute network config - R input output - DIR)\n");
    s.push_str("  (:predicates\n");
    for p in Pred::ALL {
        let _ = writeln!(s, "    ({} {})", p.name(), params(p.signature()));
    }
    s.push_str("  )\n  (:functions\n");
    for f in Fluent::ALL {
        if f.signature().is_empty() {
            let _ = writeln!(s, "    ({})", f.name());
        } else {
            let _ = writeln!(s, "    ({} {})", f.name(), params(f.signature()));
        }
    }
    s.push_str("  )\n\n");
    s.push_str(REPLICATE);
    s.push('\n');
    s.push_str(SCHEDULE);
    s.push('\n');
    s.push_str(&connect(false));
    s.push('\n');
    s.push_str(&connect(true));
    s.push('\n');
    s.push_str(PROPAGATE);
    s.push_str(")\n");
    s
}

/// PDDL-safe problem name.
pub fn problem_name(inst: &ProblemInstance) -> String {
    let s: String = inst
        .name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect();
    if s.chars().next().is_none_or(|c| !c.is_ascii_alphabetic()) {
        format!("p-{s}")
    } else {
        s
    }
}

fn sorted(mut v: Vec<&str>) -> Vec<&str> {
    v.sort_unstable();
    v
}

pub fn emit_problem(inst: &ProblemInstance) -> String {
    let g = &inst.graph;
    let comps_of = |k: ComponentClass| sorted(inst.components.iter().filter(|c| inst.class_of(c) == Some(k)).map(|c| c.id.as_str()).collect());
    let types_of = |k: ComponentClass| sorted(inst.component_types.iter().filter(|t| t.class == k).map(|t| t.id.as_str()).collect());
    let groups: Vec<(&str, Vec<&str>)> = vec![
        ("S", sorted(g.sites.iter().map(|s| s.id.as_str()).collect())),
        ("DSI", sorted(g.interfaces.iter().filter(|i| i.kind == InterfaceKind::DataSharing).map(|i| i.id.as_str()).collect())),
        ("DPI", sorted(g.interfaces.iter().filter(|i| i.kind == InterfaceKind::DataProcessing).map(|i| i.id.as_str()).collect())),
        ("DL", sorted(g.links.iter().filter(|l| l.kind == LinkKind::Direct).map(|l| l.id.as_str()).collect())),
        ("CL", sorted(g.links.iter().filter(|l| l.kind == LinkKind::Composite).map(|l| l.id.as_str()).collect())),
        ("DC", comps_of(ComponentClass::Data)),
        ("PC", comps_of(ComponentClass::Processing)),
        ("DCT", types_of(ComponentClass::Data)),
        ("PCT", types_of(ComponentClass::Processing)),
    ];

    let mut s = format!("(define (problem {})\n  (:domain {DOMAIN_NAME})\n  (:objects\n", problem_name(inst));
    for (ty, objs) in &groups {
        if !objs.is_empty() {
            let _ = writeln!(s, "    {} - {ty}", objs.join(" "));
        }
    }
    s.push_str("  )\n  (:init\n");
    let enc = init_encoding(inst);
    for f in &enc.facts {
        let _ = writeln!(s, "    ({} {})", f.pred.name(), f.args.join(" "));
    }
    for v in &enc.values {
        let head = if v.args.is_empty() { v.fluent.name().to_string() } else { format!("{} {}", v.fluent.name(), v.args.join(" ")) };
        let _ = writeln!(s, "    (= ({head}) {})", v.value.to_decimal());
    }
    s.push_str("  )\n  (:goal (and\n");
    for goal in &inst.goals {
        let Some(src) = inst.component(&goal.source) else { continue };
        let placement = src.placement.as_deref().unwrap_or("");
        let atoms: Vec<String> = inst
            .goal_candidates(goal)
            .iter()
            .map(|(dc, dsi)| format!("(has_data {dc} {dsi} {} {placement})", src.id))
            .collect();
        if atoms.len() == 1 {
            let _ = writeln!(s, "    {}", atoms[0]);
        } else {
            let _ = writeln!(s, "    (or {})", atoms.join("\n        "));
        }
    }
    let _ = writeln!(s, "    (<= (absolute-latency) {})))", inst.latency_bound.to_decimal());
    s.push_str("  (:metric minimize (total-cost))\n)\n");
    s
}

/// Schema names in declaration order, as they appear in `emit_domain`.
pub fn action_names() -> Vec<&'static str> {
    Schema::ALL.iter().map(|s| s.name()).collect()
}
