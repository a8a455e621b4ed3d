use std::collections::BTreeSet;

use super::ComponentClass;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WorkflowNode {
    pub component: String,
    pub interface: String,
    pub class: ComponentClass,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WorkflowEdge {
    pub from: usize,
    pub to: usize,
    pub link: String,
}

/// Built workflow: placed components and the streams between them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkflowGraph {
    pub nodes: Vec<WorkflowNode>,
    pub edges: Vec<WorkflowEdge>,
}

impl WorkflowGraph {
    pub fn node_index(&mut self, component: &str, interface: &str, class: ComponentClass) -> usize {
        if let Some(i) = self.nodes.iter().position(|n| n.component == component && n.interface == interface) {
            return i;
        }
        self.nodes.push(WorkflowNode {
            component: component.to_string(),
            interface: interface.to_string(),
            class,
        });
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, link: &str) {
        self.edges.push(WorkflowEdge { from, to, link: link.to_string() });
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagVerdict {
    pub violations: Vec<String>,
}

impl DagVerdict {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks class alternation, acyclicity, and that every weakly connected
/// piece of the workflow starts and ends with data components.
pub fn workflow_dag_check(g: &WorkflowGraph) -> DagVerdict {
    let mut violations = Vec::new();
    let n = g.nodes.len();
    for e in &g.edges {
        let (a, b) = (&g.nodes[e.from], &g.nodes[e.to]);
        if a.class == b.class {
            violations.push(format!("class alternation: {} -> {} joins two {} components", a.component, b.component, a.class.name()));
        }
    }

    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for e in &g.edges {
        succ[e.from].push(e.to);
        indeg[e.to] += 1;
        outdeg[e.from] += 1;
    }
    let mut deg = indeg.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&i| deg[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &succ[v] {
            deg[w] -= 1;
            if deg[w] == 0 {
                stack.push(w);
            }
        }
    }
    if seen < n {
        violations.push("acyclicity: the workflow contains a cycle".to_string());
    }

    let touched: BTreeSet<usize> = g.edges.iter().flat_map(|e| [e.from, e.to]).collect();
    for &i in &touched {
        let node = &g.nodes[i];
        if node.class != ComponentClass::Data {
            if indeg[i] == 0 {
                violations.push(format!("must start with data component: {} has no input", node.component));
            }
            if outdeg[i] == 0 {
                violations.push(format!("must end with data component: {} has no output", node.component));
            }
        }
    }
    DagVerdict { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(nodes: &[(&str, ComponentClass)], edges: &[(usize, usize)]) -> WorkflowGraph {
        let mut g = WorkflowGraph::default();
        for (c, k) in nodes {
            g.node_index(c, "if", *k);
        }
        for &(a, b) in edges {
            g.add_edge(a, b, "l");
        }
        g
    }

    use ComponentClass::{Data as D, Processing as P};

    #[test]
    fn chain_is_ok() {
        let g = graph(&[("src", D), ("pc", P), ("dc", D)], &[(0, 1), (1, 2)]);
        assert!(workflow_dag_check(&g).ok());
    }

    #[test]
    fn data_to_data_breaks_alternation() {
        let g = graph(&[("a", D), ("b", D)], &[(0, 1)]);
        let v = workflow_dag_check(&g);
        assert!(v.violations.iter().any(|m| m.starts_with("class alternation")));
    }

    #[test]
    fn chain_without_terminal_data() {
        let g = graph(&[("src", D), ("pc", P)], &[(0, 1)]);
        let v = workflow_dag_check(&g);
        assert_eq!(v.violations.len(), 1);
        assert!(v.violations[0].starts_with("must end with data component"));
    }

    #[test]
    fn cycle_detected() {
        let g = graph(&[("a", D), ("p", P), ("b", D), ("q", P)], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let v = workflow_dag_check(&g);
        assert!(v.violations.iter().any(|m| m.starts_with("acyclicity")));
    }

    #[test]
    fn empty_workflow_is_ok() {
        assert!(workflow_dag_check(&WorkflowGraph::default()).ok());
    }
}
