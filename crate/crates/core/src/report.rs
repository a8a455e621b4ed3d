//! DOT views, validation report text, and CSV tables.

use std::fmt::Write;

use crate::grounding::GroundingStats;
use crate::model::{ComponentClass, LinkKind, ProblemInstance};
use crate::rational::Q;
use crate::validator::PlanReport;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn site_node(s: &str) -> String {
    quote(&format!("site:{s}"))
}

fn graph_body(inst: &ProblemInstance, extra: impl Fn(&str, &mut String)) -> String {
    let mut out = String::new();
    let mut sites: Vec<_> = inst.graph.sites.iter().collect();
    sites.sort_by(|a, b| a.id.cmp(&b.id));
    let mut ifs: Vec<_> = inst.graph.interfaces.iter().collect();
    ifs.sort_by(|a, b| a.id.cmp(&b.id));
    for (n, s) in sites.iter().enumerate() {
        let label = match s.annotations.get("tier") {
            Some(t) => format!("{} ({t})", s.id),
            None => s.id.clone(),
        };
        let _ = writeln!(out, "  subgraph cluster_{n} {{");
        let _ = writeln!(out, "    label={};", quote(&label));
        let _ = writeln!(out, "    {} [shape=point, label=\"\"];", site_node(&s.id));
        for i in ifs.iter().filter(|i| i.site == s.id) {
            let r = i.kind.resource();
            let label = format!("{}\n{} {}/{}", i.id, r.name(), i.available[r].to_decimal(), i.total[r].to_decimal());
            let _ = writeln!(out, "    {} [shape=box, label={}];", quote(&format!("if:{}", i.id)), quote(&label));
        }
        extra(&s.id, &mut out);
        let _ = writeln!(out, "  }}");
    }
    let mut links: Vec<_> = inst.graph.links.iter().collect();
    links.sort_by(|a, b| a.id.cmp(&b.id));
    for l in links {
        let style = if l.kind == LinkKind::Composite { ", style=dashed" } else { "" };
        let label = format!("{}\n{} MB/s, {} s", l.id, l.available_bw.to_decimal(), l.latency.to_decimal());
        let _ = writeln!(
            out,
            "  {} -> {} [dir=none, label={}{style}];",
            site_node(&l.endpoints.0),
            site_node(&l.endpoints.1),
            quote(&label)
        );
    }
    out
}

/// Initial-state view: one cluster per site holding its interfaces; one
/// undirected edge per link.
pub fn render_dot_instance(inst: &ProblemInstance) -> String {
    format!("digraph {} {{\n  compound=true;\n{}}}\n", quote(&inst.name), graph_body(inst, |_, _| {}))
}

/// Result view: the instance plus placed components and bold workflow
/// edges labeled with the carrying link and the data's origin.
pub fn render_dot_report(inst: &ProblemInstance, report: &PlanReport) -> String {
    let wf = &report.workflow;
    let node_id = |i: usize| quote(&format!("wc:{}@{}", wf.nodes[i].component, wf.nodes[i].interface));
    let body = graph_body(inst, |site, out| {
        for (i, n) in wf.nodes.iter().enumerate() {
            if inst.interface(&n.interface).map(|x| x.site.as_str()) != Some(site) {
                continue;
            }
            let shape = if n.class == ComponentClass::Data { "cylinder" } else { "ellipse" };
            let label = format!("{}\non {}", n.component, n.interface);
            let _ = writeln!(out, "    {} [shape={shape}, label={}];", node_id(i), quote(&label));
        }
    });
    let mut out = format!("digraph {} {{\n  compound=true;\n{body}", quote(&inst.name));
    let origin = |i: usize| {
        let c = &wf.nodes[i].component;
        inst.component(c).map(|x| x.ctype.clone()).unwrap_or_default()
    };
    for e in &wf.edges {
        let data_end = if wf.nodes[e.from].class == ComponentClass::Data { e.from } else { e.to };
        let label = format!("{} [{}]", e.link, origin(data_end));
        let _ = writeln!(out, "  {} -> {} [style=bold, label={}];", node_id(e.from), node_id(e.to), quote(&label));
    }
    out.push_str("}\n");
    out
}

/// Key-value text form of a validation report; one `diagnostic:` line per
/// problem found.
pub fn report_text(r: &PlanReport, steps: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "valid: {}", r.valid);
    let _ = writeln!(s, "applied: {}/{}", r.applied, steps);
    let _ = writeln!(s, "goal_reached: {}", r.goal_reached);
    let _ = writeln!(s, "cost: {}", r.cost.to_decimal());
    let _ = writeln!(s, "latency: {}", r.latency.to_decimal());
    let _ = writeln!(s, "workflow_nodes: {}", r.workflow.nodes.len());
    let _ = writeln!(s, "workflow_edges: {}", r.workflow.edges.len());
    for n in &r.workflow.nodes {
        let _ = writeln!(s, "placement: {} {}", n.component, n.interface);
    }
    for e in &r.workflow.edges {
        let _ = writeln!(s, "edge: {} -> {} via {}", r.workflow.nodes[e.from].component, r.workflow.nodes[e.to].component, e.link);
    }
    for d in &r.diagnostics {
        let _ = writeln!(s, "diagnostic: {d}");
    }
    s
}

pub fn report_json(r: &PlanReport, steps: usize) -> String {
    let v = serde_json::json!({
        "valid": r.valid,
        "applied": r.applied,
        "steps": steps,
        "goal_reached": r.goal_reached,
        "cost": r.cost.to_decimal(),
        "latency": r.latency.to_decimal(),
        "placements": r.workflow.nodes.iter().map(|n| serde_json::json!({
            "component": n.component, "interface": n.interface, "class": n.class.name(),
        })).collect::<Vec<_>>(),
        "edges": r.workflow.edges.iter().map(|e| serde_json::json!({
            "from": r.workflow.nodes[e.from].component, "to": r.workflow.nodes[e.to].component, "link": e.link,
        })).collect::<Vec<_>>(),
        "diagnostics": r.diagnostics,
    });
    serde_json::to_string_pretty(&v).expect("json value") + "\n"
}

pub const STATS_HEADER: &str = "problem,F,X,A,F_pruned,X_pruned,A_pruned";

pub fn stats_row(problem: &str, s: &GroundingStats) -> String {
    format!("{problem},{},{},{},{},{},{}", s.f, s.x, s.a, s.f_pruned, s.x_pruned, s.a_pruned)
}

pub const METRICS_VERSION_LINE: &str = "# metrics-csv v1";
pub const METRICS_HEADER: &str =
    "problem,F,X,A,F_pruned,X_pruned,A_pruned,ground_ms,prune_ms,search_ms,expansions,plan_len,cost,latency,status";

/// One pipeline run. Timings are in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub problem: String,
    pub stats: GroundingStats,
    pub ground_ms: f64,
    pub prune_ms: f64,
    pub search_ms: f64,
    pub expansions: u64,
    pub plan_len: Option<usize>,
    pub cost: Option<Q>,
    pub latency: Option<Q>,
    pub status: String,
}

impl Metrics {
    /// CSV row; with `omit_timings` the three timing columns are left empty
    /// so the row is a pure function of the inputs.
    pub fn row(&self, omit_timings: bool) -> String {
        let ms = |v: f64| if omit_timings { String::new() } else { format!("{v:.3}") };
        let opt = |q: Option<Q>| q.map(|q| q.to_decimal()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            stats_row(&self.problem, &self.stats),
            ms(self.ground_ms),
            ms(self.prune_ms),
            ms(self.search_ms),
            self.expansions,
            self.plan_len.map(|n| n.to_string()).unwrap_or_default(),
            opt(self.cost),
            opt(self.latency),
            self.status,
        )
    }
}

pub fn metrics_csv(rows: &[Metrics], omit_timings: bool) -> String {
    let mut s = format!("{METRICS_VERSION_LINE}\n{METRICS_HEADER}\n");
    for r in rows {
        s.push_str(&r.row(omit_timings));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;

    #[test]
    fn one_site_view() {
        let d = render_dot_instance(&benchgen::minimal_chain());
        assert_eq!(d.matches("subgraph cluster_").count(), 1);
        assert_eq!(d.matches("[shape=box").count(), 2);
        assert_eq!(d.matches("dir=none").count(), 1);
    }

    #[test]
    fn complex_view_counts() {
        let d = render_dot_instance(&benchgen::gen_complex(2, 1).unwrap());
        assert_eq!(d.matches("subgraph cluster_").count(), 8);
        assert_eq!(d.matches("dir=none").count(), 29);
        assert_eq!(d, render_dot_instance(&benchgen::gen_complex(2, 1).unwrap()));
    }

    #[test]
    fn metrics_columns_match_header() {
        let m = Metrics {
            problem: "p".into(),
            stats: GroundingStats::default(),
            ground_ms: 1.0,
            prune_ms: 2.0,
            search_ms: 3.0,
            expansions: 4,
            plan_len: Some(6),
            cost: Some(Q::new(1, 4)),
            latency: None,
            status: "solved".into(),
        };
        let cols = METRICS_HEADER.split(',').count();
        assert_eq!(m.row(false).split(',').count(), cols);
        assert_eq!(m.row(true).split(',').count(), cols);
        assert!(m.row(true).contains(",,,4,6,0.25,,solved"));
    }
}
