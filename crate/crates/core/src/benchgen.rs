//! Seeded instance generators.
//!
//! Families:
//! * `vary`: a one-site baseline (one intrasite link, one DSI and DPI, one
//!   fixed source) scaled along one axis: workflow components, interfaces,
//!   intrasite links, or hub-spoke sites.
//! * `complex`: eight sites in a hub-spoke layout with fifteen direct links
//!   and fourteen composite links.
//!
//! Capacities the experiments leave open are fixed constants (see the
//! `DEFAULT_*` items).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    ComponentClass, ComponentType, GoalDemand, Interface, InterfaceKind, Link, LinkKind, ProblemInstance,
    ResourceGraph, ResourceKind, ResourceMap, Site, WorkflowComponent,
};
use crate::rational::Q;

pub const DEFAULT_DPI_CORES: i64 = 16;
pub const DEFAULT_DSI_MB: i64 = 10240;
pub const DEFAULT_LINK_MBPS: i64 = 1000;
pub fn default_intersite_latency() -> Q {
    Q::new(5, 1000)
}
pub fn default_intrasite_latency() -> Q {
    Q::new(5, 10000)
}
pub const DEFAULT_MSG_MB: i64 = 1;
pub const DEFAULT_RATE: i64 = 10;
pub const DEFAULT_CORES_DEMAND: i64 = 1;
pub const DEFAULT_STORAGE_DEMAND_MB: i64 = 100;
pub const DEFAULT_CONFIG_MB: i64 = 100;
pub const DEFAULT_LATENCY_BOUND_S: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaryKind {
    Wfc,
    Interfaces,
    DirectLinks,
    Sites,
}

impl VaryKind {
    pub fn from_name(s: &str) -> Option<VaryKind> {
        match s {
            "wfc" => Some(VaryKind::Wfc),
            "interfaces" => Some(VaryKind::Interfaces),
            "direct-links" => Some(VaryKind::DirectLinks),
            "sites" => Some(VaryKind::Sites),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VaryKind::Wfc => "wfc",
            VaryKind::Interfaces => "interfaces",
            VaryKind::DirectLinks => "direct-links",
            VaryKind::Sites => "sites",
        }
    }

    fn baseline(self) -> usize {
        match self {
            VaryKind::Wfc | VaryKind::Interfaces => 2,
            VaryKind::DirectLinks | VaryKind::Sites => 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("{kind}: n = {n} is below the baseline {min}")]
    BelowBaseline { kind: &'static str, n: usize, min: usize },
    #[error("workflow length must be even (alternating processing/data ending on data), got {0}")]
    OddChain(usize),
    #[error("complex chain length must be even and within 2..=16, got {0}")]
    ComplexChain(usize),
}

struct Builder {
    inst: ProblemInstance,
}

impl Builder {
    fn new(name: String) -> Builder {
        Builder {
            inst: ProblemInstance {
                name,
                graph: ResourceGraph::default(),
                component_types: Vec::new(),
                components: Vec::new(),
                goals: Vec::new(),
                latency_bound: Q::int(DEFAULT_LATENCY_BOUND_S),
                cost_weights: ResourceMap::uniform(Q::ONE),
            },
        }
    }

    fn site(&mut self, id: &str, tier: Option<&str>) {
        let mut annotations = crate::model::Annotations::new();
        if let Some(t) = tier {
            annotations.insert("tier".into(), t.into());
        }
        self.inst.graph.sites.push(Site { id: id.into(), annotations });
    }

    fn interface(&mut self, id: &str, site: &str, kind: InterfaceKind, capacity: Q, available: Q) {
        let r = kind.resource();
        self.inst.graph.interfaces.push(Interface {
            id: id.into(),
            site: site.into(),
            kind,
            total: ResourceMap::new().with(r, capacity),
            available: ResourceMap::new().with(r, available),
            annotations: Default::default(),
        });
    }

    fn standard_interfaces(&mut self, n: usize) {
        let s = format!("s{n}");
        self.interface(&format!("dsi{n}"), &s, InterfaceKind::DataSharing, Q::int(DEFAULT_DSI_MB), Q::int(DEFAULT_DSI_MB));
        self.interface(&format!("dpi{n}"), &s, InterfaceKind::DataProcessing, Q::int(DEFAULT_DPI_CORES), Q::int(DEFAULT_DPI_CORES));
    }

    fn direct(&mut self, id: &str, a: &str, b: &str, bw: Q) {
        let latency = if a == b { default_intrasite_latency() } else { default_intersite_latency() };
        self.inst.graph.links.push(Link {
            id: id.into(),
            kind: LinkKind::Direct,
            endpoints: (a.into(), b.into()),
            hops: vec![],
            total_bw: bw,
            available_bw: bw,
            latency,
        });
    }

    fn composite(&mut self, id: &str, a: &str, b: &str, h1: &str, h2: &str) {
        let hop = |h: &str| self.inst.link(h).expect("hop defined first").clone();
        let (l1, l2) = (hop(h1), hop(h2));
        let bw = l1.total_bw.min(l2.total_bw);
        self.inst.graph.links.push(Link {
            id: id.into(),
            kind: LinkKind::Composite,
            endpoints: (a.into(), b.into()),
            hops: vec![h1.into(), h2.into()],
            total_bw: bw,
            available_bw: bw,
            latency: l1.latency + l2.latency,
        });
    }

    /// Hub-spoke graph: every site has a DSI, DPI and intrasite link; spokes
    /// link to `s1`; every spoke pair gets a composite link through the hub.
    fn hub_spoke(&mut self, n: usize) {
        let bw = Q::int(DEFAULT_LINK_MBPS);
        for i in 1..=n {
            self.site(&format!("s{i}"), None);
            self.standard_interfaces(i);
        }
        for i in 1..=n {
            self.direct(&format!("l{i}"), &format!("s{i}"), &format!("s{i}"), bw);
        }
        for j in 2..=n {
            self.direct(&format!("h{j}"), "s1", &format!("s{j}"), bw);
        }
        for i in 2..=n {
            for j in i + 1..=n {
                self.composite(&format!("c{i}_{j}"), &format!("s{i}"), &format!("s{j}"), &format!("h{i}"), &format!("h{j}"));
            }
        }
    }

    /// Linear workflow src -> pc1 -> dc1 -> ... -> dc{n/2}, source fixed at
    /// `src_if`, configurations available only at `config_site`.
    fn chain(&mut self, wfc: usize, src_if: &str, config_site: &str, dest_site: &str) {
        let data_type = |k: usize| ComponentType {
            id: format!("t{k}"),
            class: ComponentClass::Data,
            msg_size: Some(Q::int(DEFAULT_MSG_MB)),
            input_format: None,
            output_format: None,
        };
        let stages = wfc / 2;
        self.inst.component_types.push(data_type(0));
        for k in 1..=stages {
            self.inst.component_types.push(data_type(k));
            self.inst.component_types.push(ComponentType {
                id: format!("p{k}"),
                class: ComponentClass::Processing,
                msg_size: None,
                input_format: Some(format!("t{}", k - 1)),
                output_format: Some(format!("t{k}")),
            });
        }
        let config: std::collections::BTreeSet<String> = [config_site.to_string()].into();
        let comp = |id: String, ctype: String, class: ComponentClass, fixed: bool, placement: Option<String>| {
            let r = class.work_resource();
            let amount = match class {
                ComponentClass::Data => DEFAULT_STORAGE_DEMAND_MB,
                ComponentClass::Processing => DEFAULT_CORES_DEMAND,
            };
            WorkflowComponent {
                id,
                ctype,
                fixed,
                demand: ResourceMap::new().with(r, Q::int(amount)).with(ResourceKind::Config, Q::int(DEFAULT_CONFIG_MB)),
                msg_max_rate: Q::int(DEFAULT_RATE),
                config_sites: config.clone(),
                placement,
            }
        };
        self.inst.components.push(comp("src".into(), "t0".into(), ComponentClass::Data, true, Some(src_if.into())));
        for k in 1..=stages {
            self.inst.components.push(comp(format!("pc{k}"), format!("p{k}"), ComponentClass::Processing, false, None));
            self.inst.components.push(comp(format!("dc{k}"), format!("t{k}"), ComponentClass::Data, false, None));
        }
        self.inst.goals.push(GoalDemand {
            source: "src".into(),
            dest_site: dest_site.into(),
            dest_format: format!("t{stages}"),
        });
    }
}

fn check_chain(wfc: usize) -> Result<(), BenchError> {
    if wfc < 2 {
        return Err(BenchError::BelowBaseline { kind: "wfc", n: wfc, min: 2 });
    }
    if wfc % 2 == 1 {
        return Err(BenchError::OddChain(wfc));
    }
    Ok(())
}

/// Calibration instance: `wfc` movable components on a hub-spoke graph of
/// `sites` sites, source at the hub, destination at the last site.
pub fn table4_instance(wfc: usize, sites: usize) -> ProblemInstance {
    let mut b = Builder::new(format!("wfc{wfc}-s{sites}"));
    b.hub_spoke(sites.max(1));
    b.chain(wfc, "dsi1", "s1", &format!("s{}", sites.max(1)));
    b.inst
}

/// One site, a fixed source, one processing and one sink component.
pub fn minimal_chain() -> ProblemInstance {
    let mut inst = table4_instance(2, 1);
    inst.name = "minimal-chain".into();
    inst
}

/// Scales the one-site baseline along `kind` to size `n`. The family is
/// fully determined by `(kind, n)`; `seed` only enters the instance name.
pub fn gen_vary(kind: VaryKind, n: usize, seed: u64) -> Result<ProblemInstance, BenchError> {
    if n < kind.baseline() {
        return Err(BenchError::BelowBaseline { kind: kind.name(), n, min: kind.baseline() });
    }
    let name = format!("vary-{}-{n}-seed{seed}", kind.name());
    let mut b = Builder::new(name);
    match kind {
        VaryKind::Wfc => {
            check_chain(n)?;
            b.hub_spoke(1);
            b.chain(n, "dsi1", "s1", "s1");
        }
        VaryKind::Interfaces => {
            b.hub_spoke(1);
            for k in 3..=n {
                if k % 2 == 1 {
                    b.interface(&format!("dsi1_{k}"), "s1", InterfaceKind::DataSharing, Q::int(DEFAULT_DSI_MB), Q::int(DEFAULT_DSI_MB));
                } else {
                    b.interface(&format!("dpi1_{k}"), "s1", InterfaceKind::DataProcessing, Q::int(DEFAULT_DPI_CORES), Q::int(DEFAULT_DPI_CORES));
                }
            }
            b.chain(2, "dsi1", "s1", "s1");
        }
        VaryKind::DirectLinks => {
            b.hub_spoke(1);
            for k in 2..=n {
                b.direct(&format!("l1_{k}"), "s1", "s1", Q::int(DEFAULT_LINK_MBPS));
            }
            b.chain(2, "dsi1", "s1", "s1");
        }
        VaryKind::Sites => {
            b.hub_spoke(n);
            b.chain(2, "dsi1", "s1", &format!("s{n}"));
        }
    }
    Ok(b.inst)
}

pub const COMPLEX_SITES: usize = 8;
pub const COMPLEX_COMPOSITES: usize = 14;

/// Eight-site hub-spoke graph (hub `s1`; `s1`,`s2` cloud, `s3`,`s4` fog,
/// `s5`..`s8` edge) with 14 of the 21 spoke-pair composite links chosen by
/// `seed` and interface availability drawn uniformly from [0.5, 1.0] of the
/// total in steps of 0.001. The source sits at `s8`; the goal asks for the
/// chain's final format at `s2`.
pub fn gen_complex(chain_len: usize, seed: u64) -> Result<ProblemInstance, BenchError> {
    if !(2..=16).contains(&chain_len) || chain_len % 2 == 1 {
        return Err(BenchError::ComplexChain(chain_len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(format!("complex-{chain_len}-seed{seed}"));
    let bw = Q::int(DEFAULT_LINK_MBPS);
    for i in 1..=COMPLEX_SITES {
        let tier = match i {
            1 | 2 => "cloud",
            3 | 4 => "fog",
            _ => "edge",
        };
        b.site(&format!("s{i}"), Some(tier));
        for (kind, cap) in [
            (InterfaceKind::DataSharing, DEFAULT_DSI_MB),
            (InterfaceKind::DataProcessing, DEFAULT_DPI_CORES),
        ] {
            let k: i64 = rng.gen_range(500..=1000);
            let total = Q::int(cap);
            let prefix = if kind == InterfaceKind::DataSharing { "dsi" } else { "dpi" };
            b.interface(&format!("{prefix}{i}"), &format!("s{i}"), kind, total, total * Q::new(k as i128, 1000));
        }
    }
    for i in 1..=COMPLEX_SITES {
        b.direct(&format!("l{i}"), &format!("s{i}"), &format!("s{i}"), bw);
    }
    for j in 2..=COMPLEX_SITES {
        b.direct(&format!("h{j}"), "s1", &format!("s{j}"), bw);
    }
    let mut pairs: Vec<(usize, usize)> = (2..=COMPLEX_SITES)
        .flat_map(|i| (i + 1..=COMPLEX_SITES).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(&mut rng);
    let mut chosen: Vec<(usize, usize)> = pairs.into_iter().take(COMPLEX_COMPOSITES).collect();
    chosen.sort();
    for (i, j) in chosen {
        b.composite(&format!("c{i}_{j}"), &format!("s{i}"), &format!("s{j}"), &format!("h{i}"), &format!("h{j}"));
    }
    b.chain(chain_len, &format!("dsi{COMPLEX_SITES}"), &format!("s{COMPLEX_SITES}"), "s2");
    Ok(b.inst)
}

/// Small randomized instance for property suites: one or two sites, a short
/// chain, optional alternative components, and capacities, bandwidths and
/// latency bounds that are sometimes too tight to solve.
pub fn gen_random_small(seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5a11);
    let sites = rng.gen_range(1..=2usize);
    let wfc = if sites == 1 && rng.gen_bool(0.25) { 4 } else { 2 };
    let mut b = Builder::new(format!("small-{seed}"));
    for i in 1..=sites {
        b.site(&format!("s{i}"), None);
        let cores = rng.gen_range(1..=4i64);
        let cores_avail = rng.gen_range(0..=cores);
        b.interface(&format!("dsi{i}"), &format!("s{i}"), InterfaceKind::DataSharing, Q::int(100 * rng.gen_range(1..=4i64)), Q::ZERO);
        let dsi = b.inst.graph.interfaces.last_mut().unwrap();
        let total = dsi.total[ResourceKind::Storage];
        dsi.available[ResourceKind::Storage] = total - Q::int(100 * rng.gen_range(0..=1i64)).min(total - Q::int(100));
        b.interface(&format!("dpi{i}"), &format!("s{i}"), InterfaceKind::DataProcessing, Q::int(cores), Q::int(cores_avail.max(if rng.gen_bool(0.9) { 1 } else { 0 })));
    }
    for i in 1..=sites {
        let bw = Q::int(rng.gen_range(10..=60i64));
        b.direct(&format!("l{i}"), &format!("s{i}"), &format!("s{i}"), bw);
    }
    if sites == 2 {
        let bw = Q::int(rng.gen_range(10..=60i64));
        b.direct("h2", "s1", "s2", bw);
    }
    let src_site = rng.gen_range(1..=sites);
    let dest_site = rng.gen_range(1..=sites);
    b.chain(wfc, &format!("dsi{src_site}"), &format!("s{src_site}"), &format!("s{dest_site}"));
    for c in b.inst.components.iter_mut() {
        if !c.fixed && sites == 2 && rng.gen_bool(0.3) {
            c.config_sites.insert(format!("s{}", 3 - src_site));
        }
        c.msg_max_rate = Q::int(rng.gen_range(5..=20i64));
    }
    if wfc == 2 && rng.gen_bool(0.5) {
        let template = if rng.gen_bool(0.5) { "pc1" } else { "dc1" };
        let mut extra = b.inst.component(template).unwrap().clone();
        extra.id = format!("{template}b");
        extra.msg_max_rate = Q::int(rng.gen_range(5..=20i64));
        b.inst.components.push(extra);
    }
    b.inst.latency_bound = [Q::new(1, 2), Q::int(2), Q::int(10), Q::int(10)][rng.gen_range(0..4usize)];
    b.inst.cost_weights[ResourceKind::Network] = Q::int(rng.gen_range(0..=3i64));
    b.inst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;
    use proptest::prelude::*;

    #[test]
    fn vary_sites_two() {
        let inst = gen_vary(VaryKind::Sites, 2, 7).unwrap();
        assert_eq!(inst.graph.sites.len(), 2);
        assert_eq!(inst.graph.interfaces.len(), 4);
        let intra = inst.graph.links.iter().filter(|l| l.is_intrasite()).count();
        let inter = inst.graph.links.iter().filter(|l| !l.is_intrasite() && l.kind == LinkKind::Direct).count();
        assert_eq!((intra, inter), (2, 1));
    }

    #[test]
    fn vary_direct_links_64() {
        let inst = gen_vary(VaryKind::DirectLinks, 64, 0).unwrap();
        assert_eq!(inst.graph.links.iter().filter(|l| l.is_intrasite()).count(), 64);
        assert!(validate_model(&inst).is_empty());
    }

    #[test]
    fn vary_rejects_below_baseline() {
        assert!(gen_vary(VaryKind::Wfc, 1, 0).is_err());
        assert!(gen_vary(VaryKind::Wfc, 3, 0).is_err());
        assert!(gen_vary(VaryKind::Sites, 0, 0).is_err());
    }

    #[test]
    fn complex_shape() {
        let inst = gen_complex(2, 1).unwrap();
        let g = &inst.graph;
        let dl = g.links.iter().filter(|l| l.kind == LinkKind::Direct).count();
        let cl = g.links.iter().filter(|l| l.kind == LinkKind::Composite).count();
        assert_eq!((g.sites.len(), g.interfaces.len(), dl, cl), (8, 16, 15, 14));
        for i in &g.interfaces {
            let r = i.free() / i.capacity();
            assert!(r >= Q::new(1, 2) && r <= Q::ONE);
        }
        assert!(gen_complex(3, 1).is_err());
        assert!(gen_complex(18, 1).is_err());
    }

    #[test]
    fn complex_is_seed_deterministic() {
        assert_eq!(gen_complex(4, 9).unwrap(), gen_complex(4, 9).unwrap());
        let picks = |s| {
            gen_complex(2, s)
                .unwrap()
                .graph
                .links
                .iter()
                .filter(|l| l.kind == LinkKind::Composite)
                .map(|l| l.id.clone())
                .collect::<Vec<_>>()
        };
        assert!((0..20).any(|s| picks(s) != picks(0)));
    }

    #[test]
    fn all_families_validate() {
        for kind in [VaryKind::Wfc, VaryKind::Interfaces, VaryKind::DirectLinks, VaryKind::Sites] {
            for n in [2, 4, 8] {
                let inst = gen_vary(kind, n, 0).unwrap();
                assert!(validate_model(&inst).is_empty(), "{kind:?} {n}: {:?}", validate_model(&inst));
            }
        }
        for len in (2..=16).step_by(2) {
            assert!(validate_model(&gen_complex(len, 3).unwrap()).is_empty());
        }
    }

    proptest! {
        #[test]
        fn complex_validates_for_any_seed(seed in any::<u64>()) {
            prop_assert!(validate_model(&gen_complex(2, seed).unwrap()).is_empty());
        }
    }
}
