//! Grounding of the six action schemas over an instance's objects.
//!
//! State variables are the atoms and fluents that some action can change;
//! static facts (types, link topology, formats, capacities) are compiled
//! into the ground actions. Objects are enumerated in lexicographic order
//! within each type, so the ground problem is a stable function of the
//! instance.

mod init;
mod prune;
mod state;

use std::collections::HashMap;
use std::fmt;

use crate::model::{ComponentClass, InterfaceKind, LinkKind, ProblemInstance, ResourceKind};
use crate::rational::Q;

pub use init::{init_encoding, InitEncoding, InitFact, InitValue};
pub use prune::{prune, PruneOutcome};
pub use state::{GroundState, Unmet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    ReplicateCode,
    ScheduleComponent,
    ConnectDirectLink,
    ConnectCompositeLink,
    PropagateInput,
    PropagateOutput,
}

impl Schema {
    pub const ALL: [Schema; 6] = [
        Schema::ReplicateCode,
        Schema::ScheduleComponent,
        Schema::ConnectDirectLink,
        Schema::ConnectCompositeLink,
        Schema::PropagateInput,
        Schema::PropagateOutput,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::ReplicateCode => "replicate_code",
            Schema::ScheduleComponent => "schedule_component",
            Schema::ConnectDirectLink => "connect_direct_link",
            Schema::ConnectCompositeLink => "connect_composite_link",
            Schema::PropagateInput => "propagate_input",
            Schema::PropagateOutput => "propagate_output",
        }
    }

    pub fn from_name(s: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Parameter types in signature order.
    pub fn signature(self) -> &'static [&'static str] {
        match self {
            Schema::ReplicateCode => &["WC", "S", "S", "L"],
            Schema::ScheduleComponent => &["WC", "R", "IF", "R", "S"],
            Schema::ConnectDirectLink => &["PC", "DPI", "S", "DC", "DCT", "DSI", "S", "DL", "DIR"],
            Schema::ConnectCompositeLink => &["PC", "DPI", "S", "DC", "DCT", "DSI", "S", "CL", "DL", "DL", "DIR"],
            Schema::PropagateInput | Schema::PropagateOutput => &["PC", "DPI", "DC", "DSI", "DC", "DSI"],
        }
    }

    pub fn arity(self) -> usize {
        self.signature().len()
    }

    /// Successor ordering rank: propagate, connect, schedule, replicate.
    pub fn expansion_rank(self) -> u8 {
        match self {
            Schema::PropagateInput | Schema::PropagateOutput => 0,
            Schema::ConnectDirectLink | Schema::ConnectCompositeLink => 1,
            Schema::ScheduleComponent => 2,
            Schema::ReplicateCode => 3,
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    AvailableAt,
    ScheduledOn,
    TypeOf,
    Fixed,
    Linked,
    LinkUses,
    Connected,
    HasInput,
    InputFormat,
    OutputFormat,
    ProcessedBy,
    HasData,
}

impl Pred {
    pub const ALL: [Pred; 12] = [
        Pred::AvailableAt,
        Pred::ScheduledOn,
        Pred::TypeOf,
        Pred::Fixed,
        Pred::Linked,
        Pred::LinkUses,
        Pred::Connected,
        Pred::HasInput,
        Pred::InputFormat,
        Pred::OutputFormat,
        Pred::ProcessedBy,
        Pred::HasData,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pred::AvailableAt => "available_at",
            Pred::ScheduledOn => "scheduled_on",
            Pred::TypeOf => "type_of",
            Pred::Fixed => "fixed",
            Pred::Linked => "linked",
            Pred::LinkUses => "link_uses",
            Pred::Connected => "connected",
            Pred::HasInput => "has_input",
            Pred::InputFormat => "input_format",
            Pred::OutputFormat => "output_format",
            Pred::ProcessedBy => "processed_by",
            Pred::HasData => "has_data",
        }
    }

    pub fn signature(self) -> &'static [&'static str] {
        match self {
            Pred::AvailableAt => &["I", "R", "S"],
            Pred::ScheduledOn => &["WC", "IF"],
            Pred::TypeOf => &["WC", "WCT"],
            Pred::Fixed => &["WC"],
            Pred::Linked => &["L", "S", "S"],
            Pred::LinkUses => &["CL", "DL"],
            Pred::Connected => &["L", "PC", "DPI", "DC", "DSI", "DIR"],
            Pred::HasInput => &["WC", "IF"],
            Pred::InputFormat | Pred::OutputFormat => &["PC", "DCT"],
            Pred::ProcessedBy => &["DC", "DSI", "PC", "DPI"],
            Pred::HasData => &["DC", "DSI", "DC", "DSI"],
        }
    }

    pub fn from_name(s: &str) -> Option<Pred> {
        Pred::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fluent {
    ResourceTotal,
    ResourceAvailable,
    WorkAmount,
    MsgMaxRate,
    MsgActualRate,
    MsgSize,
    NetworkLatency,
    WorkCostWeight,
    TotalCost,
    AbsoluteLatency,
}

impl Fluent {
    pub const ALL: [Fluent; 10] = [
        Fluent::ResourceTotal,
        Fluent::ResourceAvailable,
        Fluent::WorkAmount,
        Fluent::MsgMaxRate,
        Fluent::MsgActualRate,
        Fluent::MsgSize,
        Fluent::NetworkLatency,
        Fluent::WorkCostWeight,
        Fluent::TotalCost,
        Fluent::AbsoluteLatency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fluent::ResourceTotal => "resource_total",
            Fluent::ResourceAvailable => "resource_available",
            Fluent::WorkAmount => "work_amount",
            Fluent::MsgMaxRate => "msg_max_rate",
            Fluent::MsgActualRate => "msg_actual_rate",
            Fluent::MsgSize => "msg_size",
            Fluent::NetworkLatency => "network_latency",
            Fluent::WorkCostWeight => "work-cost-weight",
            Fluent::TotalCost => "total-cost",
            Fluent::AbsoluteLatency => "absolute-latency",
        }
    }

    pub fn signature(self) -> &'static [&'static str] {
        match self {
            Fluent::ResourceTotal | Fluent::ResourceAvailable => &["I", "R"],
            Fluent::WorkAmount => &["WC", "R"],
            Fluent::MsgMaxRate => &["WC"],
            Fluent::MsgActualRate => &["WC", "IF"],
            Fluent::MsgSize => &["DCT"],
            Fluent::NetworkLatency => &["L"],
            Fluent::WorkCostWeight => &["R"],
            Fluent::TotalCost | Fluent::AbsoluteLatency => &[],
        }
    }

    pub fn from_name(s: &str) -> Option<Fluent> {
        Fluent::ALL.into_iter().find(|p| p.name() == s)
    }
}

pub type PropId = u32;
pub type VarId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Pred,
    pub args: Box<[u32]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FluentAtom {
    pub fluent: Fluent,
    pub args: Box<[u32]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumOp {
    Increase,
    Decrease,
    Assign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumEffect {
    pub var: VarId,
    pub op: NumOp,
    pub value: Q,
}

/// `var >= bound`, the only numeric precondition form the domain uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumCond {
    pub var: VarId,
    pub bound: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: Schema,
    pub args: Box<[u32]>,
    /// Static part of the precondition (format match); false means the
    /// action can never be applied.
    pub static_ok: bool,
    pub pre_pos: Vec<PropId>,
    pub pre_neg: Vec<PropId>,
    /// Disjunctive groups: at least one member must hold.
    pub pre_any: Vec<Vec<PropId>>,
    pub pre_num: Vec<NumCond>,
    pub add: Vec<PropId>,
    pub num: Vec<NumEffect>,
    pub cost: Q,
    pub latency: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    /// One disjunction of `has_data` atoms per goal demand.
    pub groups: Vec<Vec<PropId>>,
    pub latency_bound: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroundingStats {
    pub f: usize,
    pub x: usize,
    pub a: usize,
    pub f_pruned: usize,
    pub x_pruned: usize,
    pub a_pruned: usize,
    pub init_facts: usize,
    pub init_values: usize,
}

#[derive(Debug, Clone)]
pub struct GroundProblem {
    pub name: String,
    pub objects: Vec<String>,
    pub props: Vec<Atom>,
    /// State fluents; the last entry is always `total-cost`.
    pub fluents: Vec<FluentAtom>,
    pub actions: Vec<GroundAction>,
    pub init: GroundState,
    pub goal: Goal,
    pub latency_var: VarId,
    pub cost_var: VarId,
    pub init_encoding: InitEncoding,
    index: HashMap<(Schema, Box<[u32]>), u32>,
    object_index: HashMap<String, u32>,
}

impl GroundProblem {
    /// Proposition count (F).
    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    /// Numeric state variable count (X); the metric accumulator is excluded.
    pub fn num_fluents(&self) -> usize {
        self.fluents.len() - 1
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn stats(&self) -> GroundingStats {
        GroundingStats {
            f: self.num_props(),
            x: self.num_fluents(),
            a: self.num_actions(),
            f_pruned: self.num_props(),
            x_pruned: self.num_fluents(),
            a_pruned: self.num_actions(),
            init_facts: self.init_encoding.facts.len(),
            init_values: self.init_encoding.values.len(),
        }
    }

    pub fn object(&self, id: u32) -> &str {
        &self.objects[id as usize]
    }

    pub fn object_id(&self, name: &str) -> Option<u32> {
        self.object_index.get(name).copied()
    }

    pub fn action_args(&self, a: &GroundAction) -> Vec<String> {
        a.args.iter().map(|&o| self.objects[o as usize].clone()).collect()
    }

    /// `(schema arg ...)` text of an action.
    pub fn action_text(&self, a: &GroundAction) -> String {
        let mut s = format!("({}", a.schema.name());
        for &o in a.args.iter() {
            s.push(' ');
            s.push_str(&self.objects[o as usize]);
        }
        s.push(')');
        s
    }

    pub fn prop_text(&self, p: PropId) -> String {
        let atom = &self.props[p as usize];
        let mut s = format!("({}", atom.pred.name());
        for &o in atom.args.iter() {
            s.push(' ');
            s.push_str(&self.objects[o as usize]);
        }
        s.push(')');
        s
    }

    pub fn fluent_text(&self, v: VarId) -> String {
        let f = &self.fluents[v as usize];
        let mut s = format!("({}", f.fluent.name());
        for &o in f.args.iter() {
            s.push(' ');
            s.push_str(&self.objects[o as usize]);
        }
        s.push(')');
        s
    }

    /// Looks up a ground action by schema and argument names.
    pub fn find_action(&self, schema: Schema, args: &[String]) -> Option<usize> {
        let ids: Option<Box<[u32]>> = args.iter().map(|a| self.object_id(a)).collect();
        self.index.get(&(schema, ids?)).map(|&i| i as usize)
    }

    /// Applicability and successor of a named ground action; `None` when no
    /// such ground action exists.
    pub fn action_semantics(&self, schema: Schema, args: &[String], state: &GroundState) -> Option<(bool, GroundState)> {
        let a = &self.actions[self.find_action(schema, args)?];
        match state.check(a) {
            Ok(()) => Some((true, state.apply(a))),
            Err(_) => Some((false, state.clone())),
        }
    }

    pub fn is_goal(&self, s: &GroundState) -> bool {
        s.vals[self.latency_var as usize] <= self.goal.latency_bound
            && self.goal.groups.iter().all(|g| g.iter().any(|&p| s.props.contains(p as usize)))
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.schema, a.args.clone()), i as u32))
            .collect();
    }
}

struct Tables {
    objects: Vec<String>,
    object_index: HashMap<String, u32>,
    props: Vec<Atom>,
    prop_index: HashMap<Atom, u32>,
    fluents: Vec<FluentAtom>,
    fluent_index: HashMap<FluentAtom, u32>,
}

impl Tables {
    fn obj(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.object_index.get(name) {
            return i;
        }
        self.objects.push(name.to_string());
        let i = (self.objects.len() - 1) as u32;
        self.object_index.insert(name.to_string(), i);
        i
    }

    fn add_prop(&mut self, pred: Pred, args: &[u32]) {
        let atom = Atom { pred, args: args.into() };
        if !self.prop_index.contains_key(&atom) {
            self.prop_index.insert(atom.clone(), self.props.len() as u32);
            self.props.push(atom);
        }
    }

    fn prop(&self, pred: Pred, args: &[u32]) -> u32 {
        self.prop_index[&Atom { pred, args: args.into() }]
    }

    fn add_fluent(&mut self, fluent: Fluent, args: &[u32]) {
        let f = FluentAtom { fluent, args: args.into() };
        let i = self.fluents.len() as u32;
        if self.fluent_index.insert(f.clone(), i).is_none() {
            self.fluents.push(f);
        }
    }

    fn fluent(&self, fluent: Fluent, args: &[u32]) -> u32 {
        self.fluent_index[&FluentAtom { fluent, args: args.into() }]
    }
}

#[derive(Clone)]
struct Obj<'a> {
    id: u32,
    name: &'a str,
}

/// Grounds every schema over the instance. The instance must pass
/// `validate_model`.
pub fn ground(inst: &ProblemInstance) -> GroundProblem {
    let mut t = Tables {
        objects: Vec::new(),
        object_index: HashMap::new(),
        props: Vec::new(),
        prop_index: HashMap::new(),
        fluents: Vec::new(),
        fluent_index: HashMap::new(),
    };
    let w = inst.cost_weights;

    let constants: Vec<u32> = ["storage", "compute", "network", "config", "input", "output"]
        .iter()
        .map(|c| t.obj(c))
        .collect();
    let res_obj = |k: ResourceKind| constants[k as usize];
    let (input, output) = (constants[4], constants[5]);

    let mut sorted_sites: Vec<&str> = inst.graph.sites.iter().map(|s| s.id.as_str()).collect();
    sorted_sites.sort();
    let sites: Vec<Obj> = sorted_sites.iter().map(|s| Obj { id: t.obj(s), name: s }).collect();

    let mut ifs: Vec<&crate::model::Interface> = inst.graph.interfaces.iter().collect();
    ifs.sort_by(|a, b| a.id.cmp(&b.id));
    let if_ids: Vec<u32> = ifs.iter().map(|i| t.obj(&i.id)).collect();
    let dsis: Vec<usize> = (0..ifs.len()).filter(|&i| ifs[i].kind == InterfaceKind::DataSharing).collect();
    let dpis: Vec<usize> = (0..ifs.len()).filter(|&i| ifs[i].kind == InterfaceKind::DataProcessing).collect();

    let mut links: Vec<&crate::model::Link> = inst.graph.links.iter().collect();
    links.sort_by(|a, b| a.id.cmp(&b.id));
    let link_ids: Vec<u32> = links.iter().map(|l| t.obj(&l.id)).collect();
    let link_pos: HashMap<&str, usize> = links.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();

    let mut types: Vec<&crate::model::ComponentType> = inst.component_types.iter().collect();
    types.sort_by(|a, b| a.id.cmp(&b.id));
    for ty in &types {
        t.obj(&ty.id);
    }

    let mut wcs: Vec<&crate::model::WorkflowComponent> = inst.components.iter().collect();
    wcs.sort_by(|a, b| a.id.cmp(&b.id));
    let wc_ids: Vec<u32> = wcs.iter().map(|c| t.obj(&c.id)).collect();
    let class: Vec<ComponentClass> = wcs.iter().map(|c| inst.class_of(c).expect("validated instance")).collect();
    let pcs: Vec<usize> = (0..wcs.len()).filter(|&i| class[i] == ComponentClass::Processing).collect();
    let dcs: Vec<usize> = (0..wcs.len()).filter(|&i| class[i] == ComponentClass::Data).collect();
    let type_of = |i: usize| inst.component_type(&wcs[i].ctype).expect("validated instance");

    let site_of_if: Vec<u32> = ifs.iter().map(|i| t.object_index[&i.site]).collect();
    let config = res_obj(ResourceKind::Config);

    // Propositions.
    for &wc in &wc_ids {
        for s in &sites {
            t.add_prop(Pred::AvailableAt, &[wc, config, s.id]);
        }
    }
    for &wc in &wc_ids {
        for &i in &if_ids {
            t.add_prop(Pred::ScheduledOn, &[wc, i]);
        }
    }
    for &p in &pcs {
        for &i in &dpis {
            t.add_prop(Pred::HasInput, &[wc_ids[p], if_ids[i]]);
        }
    }
    for &d in &dcs {
        for &i in &dsis {
            t.add_prop(Pred::HasInput, &[wc_ids[d], if_ids[i]]);
        }
    }
    for &l in &link_ids {
        for &p in &pcs {
            for &pi in &dpis {
                for &d in &dcs {
                    for &di in &dsis {
                        for dir in [input, output] {
                            t.add_prop(Pred::Connected, &[l, wc_ids[p], if_ids[pi], wc_ids[d], if_ids[di], dir]);
                        }
                    }
                }
            }
        }
    }
    for &d in &dcs {
        for &di in &dsis {
            for &p in &pcs {
                for &pi in &dpis {
                    t.add_prop(Pred::ProcessedBy, &[wc_ids[d], if_ids[di], wc_ids[p], if_ids[pi]]);
                }
            }
        }
    }
    for &d in &dcs {
        for &di in &dsis {
            for &d2 in &dcs {
                for &di2 in &dsis {
                    t.add_prop(Pred::HasData, &[wc_ids[d], if_ids[di], wc_ids[d2], if_ids[di2]]);
                }
            }
        }
    }

    // Numeric state variables.
    for (n, i) in ifs.iter().enumerate() {
        t.add_fluent(Fluent::ResourceAvailable, &[if_ids[n], res_obj(i.kind.resource())]);
    }
    let network = res_obj(ResourceKind::Network);
    for &l in &link_ids {
        t.add_fluent(Fluent::ResourceAvailable, &[l, network]);
    }
    for &p in &pcs {
        for &i in &dpis {
            t.add_fluent(Fluent::MsgActualRate, &[wc_ids[p], if_ids[i]]);
        }
    }
    for &d in &dcs {
        for &i in &dsis {
            t.add_fluent(Fluent::MsgActualRate, &[wc_ids[d], if_ids[i]]);
        }
    }
    t.add_fluent(Fluent::AbsoluteLatency, &[]);
    t.add_fluent(Fluent::TotalCost, &[]);
    let latency_var = t.fluent(Fluent::AbsoluteLatency, &[]);
    let cost_var = t.fluent(Fluent::TotalCost, &[]);

    let mut actions = Vec::new();

    // replicate_code WC S S L
    for (n, wc) in wcs.iter().enumerate() {
        let amount = wc.demand[ResourceKind::Config];
        for from in &sites {
            for to in &sites {
                if from.id == to.id {
                    continue;
                }
                for (li, l) in links.iter().enumerate() {
                    if !l.joins(from.name, to.name) {
                        continue;
                    }
                    actions.push(GroundAction {
                        schema: Schema::ReplicateCode,
                        args: vec![wc_ids[n], from.id, to.id, link_ids[li]].into(),
                        static_ok: true,
                        pre_pos: vec![t.prop(Pred::AvailableAt, &[wc_ids[n], config, from.id])],
                        pre_neg: vec![t.prop(Pred::AvailableAt, &[wc_ids[n], config, to.id])],
                        pre_any: vec![],
                        pre_num: vec![],
                        add: vec![t.prop(Pred::AvailableAt, &[wc_ids[n], config, to.id])],
                        num: vec![],
                        cost: w[ResourceKind::Config] * amount / l.total_bw,
                        latency: Q::ZERO,
                    });
                }
            }
        }
    }

    // schedule_component WC R IF R S
    for (n, wc) in wcs.iter().enumerate() {
        if wc.fixed {
            continue;
        }
        let r = class[n].work_resource();
        let demand = wc.demand[r];
        for (k, i) in ifs.iter().enumerate() {
            if i.kind.resource() != r {
                continue;
            }
            let s = site_of_if[k];
            let avail = t.fluent(Fluent::ResourceAvailable, &[if_ids[k], res_obj(r)]);
            actions.push(GroundAction {
                schema: Schema::ScheduleComponent,
                args: vec![wc_ids[n], res_obj(r), if_ids[k], res_obj(i.kind.resource()), s].into(),
                static_ok: true,
                pre_pos: vec![t.prop(Pred::AvailableAt, &[wc_ids[n], config, s])],
                pre_neg: if_ids.iter().map(|&x| t.prop(Pred::ScheduledOn, &[wc_ids[n], x])).collect(),
                pre_any: vec![],
                pre_num: vec![NumCond { var: avail, bound: demand }],
                add: vec![t.prop(Pred::ScheduledOn, &[wc_ids[n], if_ids[k]])],
                num: vec![
                    NumEffect { var: avail, op: NumOp::Decrease, value: demand },
                    NumEffect {
                        var: t.fluent(Fluent::MsgActualRate, &[wc_ids[n], if_ids[k]]),
                        op: NumOp::Assign,
                        value: wc.msg_max_rate,
                    },
                ],
                cost: w[r] * demand / i.total[r],
                latency: wc.msg_max_rate.recip(),
            });
        }
    }

    // connect_direct_link / connect_composite_link
    for &p in &pcs {
        let pt = type_of(p);
        for &pi in &dpis {
            let sp = site_of_if[pi];
            for &d in &dcs {
                let dt = type_of(d);
                let dct = t.object_index[&dt.id];
                let bw = wcs[d].msg_max_rate * dt.msg_size.expect("validated data type");
                let per_msg = wcs[d].msg_max_rate.recip();
                for &di in &dsis {
                    let sd = site_of_if[di];
                    let (sp_name, sd_name) = (ifs[pi].site.as_str(), ifs[di].site.as_str());
                    let base_pre = vec![
                        t.prop(Pred::ScheduledOn, &[wc_ids[p], if_ids[pi]]),
                        t.prop(Pred::ScheduledOn, &[wc_ids[d], if_ids[di]]),
                    ];
                    for (li, l) in links.iter().enumerate() {
                        let matches = l.joins(sp_name, sd_name) && (l.is_intrasite() == (sp_name == sd_name));
                        if !matches {
                            continue;
                        }
                        let hop_orders: Vec<(usize, usize)> = match l.kind {
                            LinkKind::Direct => vec![(usize::MAX, usize::MAX)],
                            LinkKind::Composite => {
                                let (a, b) = (link_pos[l.hops[0].as_str()], link_pos[l.hops[1].as_str()]);
                                vec![(a, b), (b, a)]
                            }
                        };
                        for (h1, h2) in hop_orders {
                            for dir in [input, output] {
                                let format = if dir == input { &pt.input_format } else { &pt.output_format };
                                let static_ok = format.as_deref() == Some(dt.id.as_str());
                                let conn = |t: &Tables, l: u32| {
                                    t.prop(Pred::Connected, &[l, wc_ids[p], if_ids[pi], wc_ids[d], if_ids[di], dir])
                                };
                                let avail = |t: &Tables, li: usize| t.fluent(Fluent::ResourceAvailable, &[link_ids[li], network]);
                                let mut args = vec![wc_ids[p], if_ids[pi], sp, wc_ids[d], dct, if_ids[di], sd, link_ids[li]];
                                let mut used = vec![li];
                                let mut cost = Q::ZERO;
                                let schema = if l.kind == LinkKind::Direct {
                                    cost += w[ResourceKind::Network] * bw / l.total_bw;
                                    Schema::ConnectDirectLink
                                } else {
                                    args.push(link_ids[h1]);
                                    args.push(link_ids[h2]);
                                    used.push(h1);
                                    used.push(h2);
                                    cost += w[ResourceKind::Network] * bw / links[h1].total_bw;
                                    cost += w[ResourceKind::Network] * bw / links[h2].total_bw;
                                    Schema::ConnectCompositeLink
                                };
                                args.push(dir);
                                actions.push(GroundAction {
                                    schema,
                                    args: args.into(),
                                    static_ok,
                                    pre_pos: base_pre.clone(),
                                    pre_neg: link_ids.iter().map(|&x| conn(&t, x)).collect(),
                                    pre_any: vec![],
                                    pre_num: used.iter().map(|&u| NumCond { var: avail(&t, u), bound: bw }).collect(),
                                    add: vec![conn(&t, link_ids[li])],
                                    num: used
                                        .iter()
                                        .map(|&u| NumEffect { var: avail(&t, u), op: NumOp::Decrease, value: bw })
                                        .collect(),
                                    cost,
                                    latency: l.latency + per_msg,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    // propagate_input / propagate_output PC DPI DC DSI DC DSI
    for schema in [Schema::PropagateInput, Schema::PropagateOutput] {
        let dir = if schema == Schema::PropagateInput { input } else { output };
        for &p in &pcs {
            for &pi in &dpis {
                let (pc, dpi) = (wc_ids[p], if_ids[pi]);
                for &d in &dcs {
                    for &di in &dsis {
                        let (dc, dsi) = (wc_ids[d], if_ids[di]);
                        let any: Vec<u32> = link_ids.iter().map(|&l| t.prop(Pred::Connected, &[l, pc, dpi, dc, dsi, dir])).collect();
                        for &s in &dcs {
                            for &si in &dsis {
                                let (src, srci) = (wc_ids[s], if_ids[si]);
                                let (pre_pos, add) = if schema == Schema::PropagateInput {
                                    (
                                        vec![t.prop(Pred::HasData, &[dc, dsi, src, srci])],
                                        vec![t.prop(Pred::HasInput, &[pc, dpi]), t.prop(Pred::ProcessedBy, &[src, srci, pc, dpi])],
                                    )
                                } else {
                                    (
                                        vec![t.prop(Pred::HasInput, &[pc, dpi]), t.prop(Pred::ProcessedBy, &[src, srci, pc, dpi])],
                                        vec![t.prop(Pred::HasData, &[dc, dsi, src, srci]), t.prop(Pred::HasInput, &[dc, dsi])],
                                    )
                                };
                                actions.push(GroundAction {
                                    schema,
                                    args: vec![pc, dpi, dc, dsi, src, srci].into(),
                                    static_ok: true,
                                    pre_pos,
                                    pre_neg: vec![],
                                    pre_any: if any.is_empty() { vec![vec![]] } else { vec![any.clone()] },
                                    pre_num: vec![],
                                    add,
                                    num: vec![],
                                    cost: Q::ZERO,
                                    latency: Q::ZERO,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    for a in &mut actions {
        if a.schema.expansion_rank() > 0 {
            a.num.push(NumEffect { var: cost_var, op: NumOp::Increase, value: a.cost });
        }
        if !a.latency.is_zero() {
            a.num.push(NumEffect { var: latency_var, op: NumOp::Increase, value: a.latency });
        }
    }

    // Initial state.
    let mut init = GroundState::empty(t.props.len(), t.fluents.len());
    for (n, wc) in wcs.iter().enumerate() {
        for s in &wc.config_sites {
            init.set_prop(t.prop(Pred::AvailableAt, &[wc_ids[n], config, t.object_index[s]]));
        }
        if let (true, Some(pl)) = (wc.fixed, &wc.placement) {
            let pl = t.object_index[pl];
            init.set_prop(t.prop(Pred::ScheduledOn, &[wc_ids[n], pl]));
            init.set_val(t.fluent(Fluent::MsgActualRate, &[wc_ids[n], pl]), wc.msg_max_rate);
            if class[n] == ComponentClass::Data {
                init.set_prop(t.prop(Pred::HasData, &[wc_ids[n], pl, wc_ids[n], pl]));
            }
        }
    }
    for (n, i) in ifs.iter().enumerate() {
        init.set_val(t.fluent(Fluent::ResourceAvailable, &[if_ids[n], res_obj(i.kind.resource())]), i.free());
    }
    for (n, l) in links.iter().enumerate() {
        init.set_val(t.fluent(Fluent::ResourceAvailable, &[link_ids[n], network]), l.available_bw);
    }
    init.set_val(latency_var, Q::ZERO);
    init.set_val(cost_var, Q::ZERO);

    let groups = inst
        .goals
        .iter()
        .map(|g| {
            let src = inst.component(&g.source).expect("validated goal");
            let (s, si) = (t.object_index[&src.id], t.object_index[src.placement.as_ref().expect("fixed source")]);
            inst.goal_candidates(g)
                .iter()
                .map(|(dc, dsi)| t.prop(Pred::HasData, &[t.object_index[dc], t.object_index[dsi], s, si]))
                .collect()
        })
        .collect();

    let mut gp = GroundProblem {
        name: inst.name.clone(),
        objects: t.objects,
        props: t.props,
        fluents: t.fluents,
        actions,
        init,
        goal: Goal { groups, latency_bound: inst.latency_bound },
        latency_var,
        cost_var,
        init_encoding: init_encoding(inst),
        index: HashMap::new(),
        object_index: t.object_index,
    };
    gp.rebuild_index();
    gp
}
