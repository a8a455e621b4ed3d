//! In-memory problem model: resource graph, component catalog, goals.
//!
//! All quantities are normalized: storage and config in MB, bandwidth in
//! MB/s, latency in seconds, rates in messages per second, compute in cores.

mod validate;
mod workflow;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::rational::Q;

pub use validate::{validate_model, Diagnostic};
pub use workflow::{workflow_dag_check, DagVerdict, WorkflowEdge, WorkflowGraph, WorkflowNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResourceKind {
    Storage,
    Compute,
    Network,
    Config,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 4] = [
        ResourceKind::Storage,
        ResourceKind::Compute,
        ResourceKind::Network,
        ResourceKind::Config,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Storage => "storage",
            ResourceKind::Compute => "compute",
            ResourceKind::Network => "network",
            ResourceKind::Config => "config",
        }
    }

    pub fn from_name(s: &str) -> Option<ResourceKind> {
        ResourceKind::ALL.into_iter().find(|k| k.name() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One exact quantity per resource kind, zero when unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ResourceMap([Q; 4]);

impl ResourceMap {
    pub fn new() -> ResourceMap {
        ResourceMap::default()
    }

    pub fn with(mut self, kind: ResourceKind, v: Q) -> ResourceMap {
        self[kind] = v;
        self
    }

    pub fn uniform(v: Q) -> ResourceMap {
        ResourceMap([v; 4])
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResourceKind, Q)> + '_ {
        ResourceKind::ALL.into_iter().map(move |k| (k, self[k]))
    }
}

impl Index<ResourceKind> for ResourceMap {
    type Output = Q;
    fn index(&self, k: ResourceKind) -> &Q {
        &self.0[k.index()]
    }
}

impl IndexMut<ResourceKind> for ResourceMap {
    fn index_mut(&mut self, k: ResourceKind) -> &mut Q {
        &mut self.0[k.index()]
    }
}

pub type Annotations = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub id: String,
    pub annotations: Annotations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InterfaceKind {
    DataSharing,
    DataProcessing,
}

impl InterfaceKind {
    /// The resource an interface of this kind schedules.
    pub fn resource(self) -> ResourceKind {
        match self {
            InterfaceKind::DataSharing => ResourceKind::Storage,
            InterfaceKind::DataProcessing => ResourceKind::Compute,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InterfaceKind::DataSharing => "data-sharing",
            InterfaceKind::DataProcessing => "data-processing",
        }
    }

    pub fn pddl_type(self) -> &'static str {
        match self {
            InterfaceKind::DataSharing => "DSI",
            InterfaceKind::DataProcessing => "DPI",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub id: String,
    pub site: String,
    pub kind: InterfaceKind,
    pub total: ResourceMap,
    pub available: ResourceMap,
    pub annotations: Annotations,
}

impl Interface {
    pub fn capacity(&self) -> Q {
        self.total[self.kind.resource()]
    }

    pub fn free(&self) -> Q {
        self.available[self.kind.resource()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    Direct,
    Composite,
}

impl LinkKind {
    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Direct => "direct",
            LinkKind::Composite => "composite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub id: String,
    pub kind: LinkKind,
    pub endpoints: (String, String),
    pub hops: Vec<String>,
    pub total_bw: Q,
    pub available_bw: Q,
    pub latency: Q,
}

impl Link {
    pub fn is_intrasite(&self) -> bool {
        self.endpoints.0 == self.endpoints.1
    }

    /// True when the link joins `a` and `b` in either direction.
    pub fn joins(&self, a: &str, b: &str) -> bool {
        let (x, y) = (&self.endpoints.0, &self.endpoints.1);
        (x == a && y == b) || (x == b && y == a)
    }

    pub fn touches(&self, s: &str) -> bool {
        self.endpoints.0 == s || self.endpoints.1 == s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentClass {
    Data,
    Processing,
}

impl ComponentClass {
    /// The resource consumed when a component of this class is scheduled.
    pub fn work_resource(self) -> ResourceKind {
        match self {
            ComponentClass::Data => ResourceKind::Storage,
            ComponentClass::Processing => ResourceKind::Compute,
        }
    }

    pub fn interface_kind(self) -> InterfaceKind {
        match self {
            ComponentClass::Data => InterfaceKind::DataSharing,
            ComponentClass::Processing => InterfaceKind::DataProcessing,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentClass::Data => "data",
            ComponentClass::Processing => "processing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentType {
    pub id: String,
    pub class: ComponentClass,
    pub msg_size: Option<Q>,
    pub input_format: Option<String>,
    pub output_format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowComponent {
    pub id: String,
    pub ctype: String,
    pub fixed: bool,
    pub demand: ResourceMap,
    pub msg_max_rate: Q,
    pub config_sites: BTreeSet<String>,
    pub placement: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalDemand {
    pub source: String,
    pub dest_site: String,
    pub dest_format: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResourceGraph {
    pub sites: Vec<Site>,
    pub interfaces: Vec<Interface>,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub name: String,
    pub graph: ResourceGraph,
    pub component_types: Vec<ComponentType>,
    pub components: Vec<WorkflowComponent>,
    pub goals: Vec<GoalDemand>,
    pub latency_bound: Q,
    pub cost_weights: ResourceMap,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown site `{0}`")]
    UnknownSite(String),
}

impl ProblemInstance {
    pub fn site(&self, id: &str) -> Option<&Site> {
        self.graph.sites.iter().find(|s| s.id == id)
    }

    pub fn interface(&self, id: &str) -> Option<&Interface> {
        self.graph.interfaces.iter().find(|i| i.id == id)
    }

    pub fn link(&self, id: &str) -> Option<&Link> {
        self.graph.links.iter().find(|l| l.id == id)
    }

    pub fn component_type(&self, id: &str) -> Option<&ComponentType> {
        self.component_types.iter().find(|t| t.id == id)
    }

    pub fn component(&self, id: &str) -> Option<&WorkflowComponent> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn class_of(&self, c: &WorkflowComponent) -> Option<ComponentClass> {
        self.component_type(&c.ctype).map(|t| t.class)
    }

    /// Bandwidth a stream of this data component's messages occupies on a link.
    pub fn edge_bandwidth(&self, dc: &WorkflowComponent) -> Option<Q> {
        let t = self.component_type(&dc.ctype)?;
        Some(dc.msg_max_rate * t.msg_size?)
    }

    /// Candidate sinks for a goal: (data component, data-sharing interface)
    /// pairs at the destination site holding the destination format. Fixed
    /// components only qualify at their own placement.
    pub fn goal_candidates(&self, goal: &GoalDemand) -> Vec<(String, String)> {
        let mut dcs: Vec<&WorkflowComponent> = self
            .components
            .iter()
            .filter(|c| c.ctype == goal.dest_format && self.class_of(c) == Some(ComponentClass::Data))
            .collect();
        dcs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut dsis: Vec<&Interface> = self
            .graph
            .interfaces
            .iter()
            .filter(|i| i.kind == InterfaceKind::DataSharing && i.site == goal.dest_site)
            .collect();
        dsis.sort_by(|a, b| a.id.cmp(&b.id));
        let mut out = Vec::new();
        for dc in dcs {
            for dsi in &dsis {
                if dc.fixed && dc.placement.as_deref() != Some(dsi.id.as_str()) {
                    continue;
                }
                out.push((dc.id.clone(), dsi.id.clone()));
            }
        }
        out
    }
}

/// Sites joined to `site` by at least one direct or composite link,
/// including `site` itself when an intrasite link exists.
pub fn peers(instance: &ProblemInstance, site: &str) -> Result<BTreeSet<String>, ModelError> {
    if instance.site(site).is_none() {
        return Err(ModelError::UnknownSite(site.to_string()));
    }
    let mut out = BTreeSet::new();
    for l in &instance.graph.links {
        if l.endpoints.0 == site {
            out.insert(l.endpoints.1.clone());
        }
        if l.endpoints.1 == site {
            out.insert(l.endpoints.0.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use proptest::prelude::*;

    #[test]
    fn resource_map_indexing() {
        let m = ResourceMap::new().with(ResourceKind::Compute, Q::int(3));
        assert_eq!(m[ResourceKind::Compute], Q::int(3));
        assert_eq!(m[ResourceKind::Storage], Q::ZERO);
        assert_eq!(ResourceKind::ALL.len(), 4);
        for k in ResourceKind::ALL {
            assert_eq!(ResourceKind::from_name(k.name()), Some(k));
        }
    }

    #[test]
    fn peers_of_hub_and_isolated_site() {
        let inst = benchgen::gen_vary(benchgen::VaryKind::Sites, 3, 0).unwrap();
        let hub = peers(&inst, "s1").unwrap();
        assert_eq!(hub, ["s1", "s2", "s3"].iter().map(|s| s.to_string()).collect());
        let one = benchgen::gen_vary(benchgen::VaryKind::Sites, 1, 0).unwrap();
        assert_eq!(peers(&one, "s1").unwrap().len(), 1);
        assert!(peers(&one, "nowhere").is_err());
    }

    #[test]
    fn peers_of_complex_spoke() {
        let inst = benchgen::gen_complex(2, 1).unwrap();
        // Independent recomputation from the link list.
        let mut expected = BTreeSet::new();
        for l in &inst.graph.links {
            if l.endpoints.0 == "s2" || l.endpoints.1 == "s2" {
                expected.insert(l.endpoints.0.clone());
                expected.insert(l.endpoints.1.clone());
            }
        }
        let got = peers(&inst, "s2").unwrap();
        assert_eq!(got, expected);
        assert!(got.contains("s1") && got.contains("s2"));
    }

    proptest! {
        #[test]
        fn peers_is_symmetric(seed in 0u64..500) {
            let inst = benchgen::gen_complex(2, seed).unwrap();
            for a in &inst.graph.sites {
                for b in &inst.graph.sites {
                    let ab = peers(&inst, &a.id).unwrap().contains(&b.id);
                    let ba = peers(&inst, &b.id).unwrap().contains(&a.id);
                    prop_assert_eq!(ab, ba);
                }
            }
        }
    }
}
