//! Configuration documents: a YAML subset describing the resource graph,
//! component catalog, and goals.
//!
//! ```yaml
//! schema: 1
//! sites:
//!   - id: s1
//! interfaces:
//!   - { id: dsi1, site: s1, kind: data-sharing, total: { storage: 10 GB } }
//! ```
//!
//! Quantities are numbers (read in the `units` default for their dimension)
//! or strings such as `"10 GB"`, `"5 ms"`, `"1000 MB/s"`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::{
    validate_model, ComponentClass, ComponentType, GoalDemand, Interface, InterfaceKind, Link, LinkKind,
    ProblemInstance, ResourceGraph, ResourceKind, ResourceMap, Site, WorkflowComponent,
};
use crate::rational::Q;
use crate::units::{exact_text, format_quantity, parse_quantity, Dimension};

pub const SCHEMA_VERSION: u32 = 1;

/// Bound applied when a document declares no goals and no bound.
pub const DEFAULT_LATENCY_BOUND_S: i64 = 10;

/// Raw quantity text, kept as written until lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantity(pub String);

impl Quantity {
    pub fn new(s: impl Into<String>) -> Quantity {
        Quantity(s.into())
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Quantity, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(v) => Quantity(v.to_string()),
            Raw::Float(v) => {
                let q = Q::from_f64_decimal(v).ok_or_else(|| serde::de::Error::custom("non-finite number"))?;
                Quantity(exact_text(q))
            }
            Raw::Str(s) => Quantity(s),
        })
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub units: BTreeMap<String, String>,
    pub sites: Vec<SiteDoc>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceDoc>,
    #[serde(default)]
    pub links: Vec<LinkDoc>,
    #[serde(default)]
    pub component_types: Vec<TypeDoc>,
    #[serde(default)]
    pub components: Vec<ComponentDoc>,
    #[serde(default)]
    pub goals: Vec<GoalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_bound: Option<Quantity>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cost_weights: BTreeMap<String, Quantity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub annotations: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterfaceKindDoc {
    DataSharing,
    DataProcessing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDoc {
    pub id: String,
    pub site: String,
    pub kind: InterfaceKindDoc,
    pub total: BTreeMap<String, Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available: Option<BTreeMap<String, Quantity>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub annotations: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKindDoc {
    #[default]
    Direct,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub id: String,
    #[serde(default)]
    pub kind: LinkKindDoc,
    pub endpoints: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hops: Vec<String>,
    pub bandwidth: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available_bandwidth: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency: Option<Quantity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassDoc {
    Data,
    Processing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeDoc {
    pub id: String,
    pub class: ClassDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msg_size: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub id: String,
    #[serde(rename = "type")]
    pub ctype: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub fixed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
    #[serde(default)]
    pub demand: BTreeMap<String, Quantity>,
    pub msg_max_rate: Quantity,
    #[serde(default)]
    pub config_sites: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalDoc {
    pub source: String,
    pub dest_site: String,
    pub dest_format: String,
}

/// Error with an optional 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl ConfigError {
    fn plain(message: impl Into<String>) -> ConfigError {
        ConfigError { line: None, column: None, message: message.into() }
    }

    fn at(text: &str, needle: &str, nth: usize, message: impl Into<String>) -> ConfigError {
        let (line, column) = locate(text, needle, nth).map_or((None, None), |(l, c)| (Some(l), Some(c)));
        ConfigError { line, column, message: message.into() }
    }

    /// `file:line:col: message`, or `file: message` without a position.
    pub fn render(&self, file: &str) -> String {
        match (self.line, self.column) {
            (Some(l), Some(c)) => format!("{file}:{l}:{c}: {}", self.message),
            _ => format!("{file}: {}", self.message),
        }
    }
}

/// Lowering failure carrying the text that best locates it in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerError {
    pub message: String,
    pub needle: String,
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// 1-based line and column of the `nth` (0-based) occurrence of `needle`
/// as a whole token.
fn locate(text: &str, needle: &str, nth: usize) -> Option<(usize, usize)> {
    if needle.is_empty() {
        return None;
    }
    let boundary = |c: Option<char>| c.is_none_or(|c| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'));
    let mut count = 0;
    for (ln, line) in text.lines().enumerate() {
        let mut from = 0;
        while let Some(off) = line[from..].find(needle) {
            let start = from + off;
            let end = start + needle.len();
            if boundary(line[..start].chars().last()) && boundary(line[end..].chars().next()) {
                if count == nth {
                    return Some((ln + 1, line[..start].chars().count() + 1));
                }
                count += 1;
            }
            from = end;
        }
    }
    None
}

/// Rejects YAML anchors, aliases and merge keys, which the subset excludes.
fn reject_yaml_extensions(text: &str) -> Result<(), ConfigError> {
    for (ln, line) in text.lines().enumerate() {
        let mut quote: Option<char> = None;
        let mut prev = ' ';
        for (col, c) in line.chars().enumerate() {
            match quote {
                Some(q) if c == q => quote = None,
                Some(_) => {}
                None => {
                    if c == '#' && (prev.is_whitespace() || col == 0) {
                        break;
                    }
                    if c == '"' || c == '\'' {
                        quote = Some(c);
                    } else if (c == '&' || c == '*') && (prev.is_whitespace() || matches!(prev, '[' | '{' | ',' | ':' | '-')) {
                        let next = line.chars().nth(col + 1).unwrap_or(' ');
                        if next.is_ascii_alphanumeric() || next == '_' {
                            return Err(ConfigError {
                                line: Some(ln + 1),
                                column: Some(col + 1),
                                message: "anchors and aliases are not supported".into(),
                            });
                        }
                    } else if c == '<' && line[line.char_indices().nth(col).map(|x| x.0).unwrap_or(0)..].starts_with("<<:") {
                        return Err(ConfigError {
                            line: Some(ln + 1),
                            column: Some(col + 1),
                            message: "merge keys are not supported".into(),
                        });
                    }
                }
            }
            prev = c;
        }
    }
    Ok(())
}

/// Parses a configuration document. Syntax errors, unknown keys, an
/// unsupported schema version and duplicate ids are reported with positions.
pub fn parse_config(text: &str) -> Result<ConfigDocument, ConfigError> {
    reject_yaml_extensions(text)?;
    let doc: ConfigDocument = serde_yaml::from_str(text).map_err(|e| {
        let loc = e.location();
        ConfigError {
            line: loc.as_ref().map(|l| l.line()),
            column: loc.as_ref().map(|l| l.column()),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        }
    })?;
    if doc.schema != SCHEMA_VERSION {
        return Err(ConfigError::at(text, "schema", 0, format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.schema)));
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let ids = doc
        .sites
        .iter()
        .map(|s| s.id.as_str())
        .chain(doc.interfaces.iter().map(|s| s.id.as_str()))
        .chain(doc.links.iter().map(|s| s.id.as_str()))
        .chain(doc.component_types.iter().map(|s| s.id.as_str()))
        .chain(doc.components.iter().map(|s| s.id.as_str()));
    for id in ids {
        let n = seen.entry(id).or_insert(0);
        *n += 1;
        if *n == 2 {
            let nth = nth_id_occurrence(text, id);
            return Err(ConfigError::at(text, id, nth, format!("duplicate id `{id}`")));
        }
    }
    Ok(doc)
}

/// Index of the second `id: <id>` declaration among all token occurrences.
fn nth_id_occurrence(text: &str, id: &str) -> usize {
    let mut decl = 0;
    let mut n = 0;
    while let Some((l, c)) = locate(text, id, n) {
        let line = text.lines().nth(l - 1).unwrap_or("");
        let before: String = line.chars().take(c - 1).collect();
        if before.trim_end().ends_with("id:") {
            decl += 1;
            if decl == 2 {
                return n;
            }
        }
        n += 1;
    }
    0
}

/// Serializes a document back to YAML.
pub fn serialize_config(doc: &ConfigDocument) -> String {
    serde_yaml::to_string(doc).expect("config documents always serialize")
}

struct Lowering<'a> {
    units: &'a BTreeMap<String, String>,
}

impl Lowering<'_> {
    fn qty(&self, q: &Quantity, dim: Dimension, what: &str) -> Result<Q, LowerError> {
        let default = self.units.get(dim.name()).map(|s| s.as_str());
        parse_quantity(&q.0, dim, default).map_err(|m| LowerError { message: format!("{what}: {m}"), needle: q.0.clone() })
    }

    fn resources(&self, m: &BTreeMap<String, Quantity>, owner: &str) -> Result<ResourceMap, LowerError> {
        let mut out = ResourceMap::new();
        for (k, v) in m {
            let kind = ResourceKind::from_name(k).ok_or_else(|| LowerError {
                message: format!("{owner}: unknown resource `{k}`"),
                needle: k.clone(),
            })?;
            out[kind] = self.qty(v, resource_dimension(kind), owner)?;
        }
        Ok(out)
    }
}

fn resource_dimension(kind: ResourceKind) -> Dimension {
    match kind {
        ResourceKind::Storage | ResourceKind::Config => Dimension::Storage,
        ResourceKind::Compute => Dimension::Compute,
        ResourceKind::Network => Dimension::Bandwidth,
    }
}

fn err(message: impl Into<String>, needle: &str) -> LowerError {
    LowerError { message: message.into(), needle: needle.to_string() }
}

/// Normalizes units, applies defaults and checks every cross-reference,
/// producing a validated instance.
pub fn lower_config(doc: &ConfigDocument) -> Result<ProblemInstance, LowerError> {
    for (dim, unit) in &doc.units {
        let d = Dimension::from_name(dim).ok_or_else(|| err(format!("units: unknown dimension `{dim}`"), dim))?;
        if crate::units::unit_factor(d, unit).is_none() {
            return Err(err(format!("units: unknown {dim} unit `{unit}`"), unit));
        }
    }
    let lw = Lowering { units: &doc.units };

    let sites: Vec<Site> = doc
        .sites
        .iter()
        .map(|s| Site { id: s.id.clone(), annotations: s.annotations.clone() })
        .collect();
    let site_ids: BTreeSet<&str> = doc.sites.iter().map(|s| s.id.as_str()).collect();
    let need_site = |s: &str, owner: &str| -> Result<(), LowerError> {
        if site_ids.contains(s) {
            Ok(())
        } else {
            Err(err(format!("{owner}: unknown site `{s}`"), s))
        }
    };

    let mut interfaces = Vec::new();
    for i in &doc.interfaces {
        need_site(&i.site, &i.id)?;
        let kind = match i.kind {
            InterfaceKindDoc::DataSharing => InterfaceKind::DataSharing,
            InterfaceKindDoc::DataProcessing => InterfaceKind::DataProcessing,
        };
        let total = lw.resources(&i.total, &i.id)?;
        if !total[kind.resource()].is_positive() {
            return Err(err(format!("{}: {} capacity must be positive", i.id, kind.resource()), &i.id));
        }
        let available = match &i.available {
            Some(a) => {
                let mut av = total;
                for (k, v) in lw.resources(a, &i.id)?.iter() {
                    if a.contains_key(k.name()) {
                        av[k] = v;
                    }
                }
                av
            }
            None => total,
        };
        interfaces.push(Interface {
            id: i.id.clone(),
            site: i.site.clone(),
            kind,
            total,
            available,
            annotations: i.annotations.clone(),
        });
    }

    let mut links: Vec<Link> = Vec::new();
    for l in &doc.links {
        if l.endpoints.len() != 2 {
            return Err(err(format!("{}: a link needs exactly two endpoints", l.id), &l.id));
        }
        for s in &l.endpoints {
            need_site(s, &l.id)?;
        }
        let total_bw = lw.qty(&l.bandwidth, Dimension::Bandwidth, &l.id)?;
        if !total_bw.is_positive() {
            return Err(err(format!("{}: bandwidth must be positive", l.id), &l.bandwidth.0));
        }
        let available_bw = match &l.available_bandwidth {
            Some(a) => lw.qty(a, Dimension::Bandwidth, &l.id)?,
            None => total_bw,
        };
        let kind = match l.kind {
            LinkKindDoc::Direct => LinkKind::Direct,
            LinkKindDoc::Composite => LinkKind::Composite,
        };
        let latency = match &l.latency {
            Some(q) => Some(lw.qty(q, Dimension::Time, &l.id)?),
            None if kind == LinkKind::Direct => {
                return Err(err(format!("{}: direct link needs a latency", l.id), &l.id));
            }
            None => None,
        };
        links.push(Link {
            id: l.id.clone(),
            kind,
            endpoints: (l.endpoints[0].clone(), l.endpoints[1].clone()),
            hops: l.hops.clone(),
            total_bw,
            available_bw,
            latency: latency.unwrap_or(Q::ZERO),
        });
    }
    // Composite latency defaults to the sum of its hops.
    for (n, l) in doc.links.iter().enumerate() {
        if l.latency.is_none() {
            let mut sum = Q::ZERO;
            for h in &l.hops {
                let hop = doc
                    .links
                    .iter()
                    .position(|x| &x.id == h && x.kind == LinkKindDoc::Direct)
                    .ok_or_else(|| err(format!("{}: hop `{h}` is not a direct link", l.id), h))?;
                sum += links[hop].latency;
            }
            links[n].latency = sum;
        }
    }

    let type_ids: BTreeMap<&str, ClassDoc> = doc.component_types.iter().map(|t| (t.id.as_str(), t.class)).collect();
    let mut component_types = Vec::new();
    for t in &doc.component_types {
        let class = match t.class {
            ClassDoc::Data => ComponentClass::Data,
            ClassDoc::Processing => ComponentClass::Processing,
        };
        let msg_size = t.msg_size.as_ref().map(|q| lw.qty(q, Dimension::Storage, &t.id)).transpose()?;
        if class == ComponentClass::Data && !msg_size.is_some_and(|m| m.is_positive()) {
            return Err(err(format!("{}: data type needs a positive msg_size", t.id), &t.id));
        }
        for f in [&t.input_format, &t.output_format].into_iter().flatten() {
            if type_ids.get(f.as_str()) != Some(&ClassDoc::Data) {
                return Err(err(format!("{}: format `{f}` is not a data type", t.id), f));
            }
        }
        component_types.push(ComponentType {
            id: t.id.clone(),
            class,
            msg_size,
            input_format: t.input_format.clone(),
            output_format: t.output_format.clone(),
        });
    }

    let mut components = Vec::new();
    for c in &doc.components {
        if !type_ids.contains_key(c.ctype.as_str()) {
            return Err(err(format!("{}: unknown component type `{}`", c.id, c.ctype), &c.ctype));
        }
        let msg_max_rate = lw.qty(&c.msg_max_rate, Dimension::Rate, &c.id)?;
        if !msg_max_rate.is_positive() {
            return Err(err(format!("{}: msg_max_rate must be positive", c.id), &c.msg_max_rate.0));
        }
        for s in &c.config_sites {
            need_site(s, &c.id)?;
        }
        if let Some(p) = &c.placement {
            if !doc.interfaces.iter().any(|i| &i.id == p) {
                return Err(err(format!("{}: unknown placement interface `{p}`", c.id), p));
            }
        }
        components.push(WorkflowComponent {
            id: c.id.clone(),
            ctype: c.ctype.clone(),
            fixed: c.fixed,
            demand: lw.resources(&c.demand, &c.id)?,
            msg_max_rate,
            config_sites: c.config_sites.iter().cloned().collect(),
            placement: c.placement.clone(),
        });
    }

    let mut goals = Vec::new();
    for g in &doc.goals {
        if !doc.components.iter().any(|c| c.id == g.source) {
            return Err(err(format!("goal: unknown source `{}`", g.source), &g.source));
        }
        need_site(&g.dest_site, "goal")?;
        if !type_ids.contains_key(g.dest_format.as_str()) {
            return Err(err(format!("goal: unknown format `{}`", g.dest_format), &g.dest_format));
        }
        goals.push(GoalDemand {
            source: g.source.clone(),
            dest_site: g.dest_site.clone(),
            dest_format: g.dest_format.clone(),
        });
    }

    let latency_bound = match &doc.latency_bound {
        Some(q) => lw.qty(q, Dimension::Time, "latency_bound")?,
        None if goals.is_empty() => Q::int(DEFAULT_LATENCY_BOUND_S),
        None => return Err(err("latency_bound is required when goals are present", "goals")),
    };
    let mut cost_weights = ResourceMap::uniform(Q::ONE);
    for (k, v) in &doc.cost_weights {
        let kind = ResourceKind::from_name(k).ok_or_else(|| err(format!("cost_weights: unknown resource `{k}`"), k))?;
        cost_weights[kind] = lw.qty(v, Dimension::Scalar, "cost_weights")?;
    }

    let inst = ProblemInstance {
        name: doc.name.clone().unwrap_or_else(|| "problem".to_string()),
        graph: ResourceGraph { sites, interfaces, links },
        component_types,
        components,
        goals,
        latency_bound,
        cost_weights,
    };
    if let Some(d) = validate_model(&inst).into_iter().next() {
        let needle = if d.object.starts_with("goal[") || d.object == "problem" { String::new() } else { d.object.clone() };
        return Err(LowerError { message: d.to_string(), needle });
    }
    Ok(inst)
}

/// Parses and lowers in one step, locating lowering errors in `text`.
pub fn load_config(text: &str) -> Result<ProblemInstance, ConfigError> {
    let doc = parse_config(text)?;
    lower_config(&doc).map_err(|e| {
        if e.needle.is_empty() {
            ConfigError::plain(e.message)
        } else {
            ConfigError::at(text, &e.needle, 0, e.message)
        }
    })
}

impl ConfigDocument {
    /// Canonical document for an instance, with every quantity written in
    /// canonical units.
    pub fn from_instance(inst: &ProblemInstance) -> ConfigDocument {
        let res_map = |m: &ResourceMap, only: &[ResourceKind]| -> BTreeMap<String, Quantity> {
            m.iter()
                .filter(|(k, v)| only.contains(k) || !v.is_zero())
                .map(|(k, v)| (k.name().to_string(), Quantity(format_quantity(v, resource_dimension(k)))))
                .collect()
        };
        ConfigDocument {
            schema: SCHEMA_VERSION,
            name: Some(inst.name.clone()),
            units: BTreeMap::new(),
            sites: inst
                .graph
                .sites
                .iter()
                .map(|s| SiteDoc { id: s.id.clone(), annotations: s.annotations.clone() })
                .collect(),
            interfaces: inst
                .graph
                .interfaces
                .iter()
                .map(|i| {
                    let total = res_map(&i.total, &[i.kind.resource()]);
                    let available = (i.available != i.total).then(|| {
                        i.available
                            .iter()
                            .filter(|(k, v)| total.contains_key(k.name()) || !v.is_zero())
                            .map(|(k, v)| (k.name().to_string(), Quantity(format_quantity(v, resource_dimension(k)))))
                            .collect()
                    });
                    InterfaceDoc {
                        id: i.id.clone(),
                        site: i.site.clone(),
                        kind: match i.kind {
                            InterfaceKind::DataSharing => InterfaceKindDoc::DataSharing,
                            InterfaceKind::DataProcessing => InterfaceKindDoc::DataProcessing,
                        },
                        total,
                        available,
                        annotations: i.annotations.clone(),
                    }
                })
                .collect(),
            links: inst
                .graph
                .links
                .iter()
                .map(|l| LinkDoc {
                    id: l.id.clone(),
                    kind: match l.kind {
                        LinkKind::Direct => LinkKindDoc::Direct,
                        LinkKind::Composite => LinkKindDoc::Composite,
                    },
                    endpoints: vec![l.endpoints.0.clone(), l.endpoints.1.clone()],
                    hops: l.hops.clone(),
                    bandwidth: Quantity(format_quantity(l.total_bw, Dimension::Bandwidth)),
                    available_bandwidth: (l.available_bw != l.total_bw)
                        .then(|| Quantity(format_quantity(l.available_bw, Dimension::Bandwidth))),
                    latency: Some(Quantity(format_quantity(l.latency, Dimension::Time))),
                })
                .collect(),
            component_types: inst
                .component_types
                .iter()
                .map(|t| TypeDoc {
                    id: t.id.clone(),
                    class: match t.class {
                        ComponentClass::Data => ClassDoc::Data,
                        ComponentClass::Processing => ClassDoc::Processing,
                    },
                    msg_size: t.msg_size.map(|m| Quantity(format_quantity(m, Dimension::Storage))),
                    input_format: t.input_format.clone(),
                    output_format: t.output_format.clone(),
                })
                .collect(),
            components: inst
                .components
                .iter()
                .map(|c| ComponentDoc {
                    id: c.id.clone(),
                    ctype: c.ctype.clone(),
                    fixed: c.fixed,
                    placement: c.placement.clone(),
                    demand: res_map(&c.demand, &[]),
                    msg_max_rate: Quantity(format_quantity(c.msg_max_rate, Dimension::Rate)),
                    config_sites: c.config_sites.iter().cloned().collect(),
                })
                .collect(),
            goals: inst
                .goals
                .iter()
                .map(|g| GoalDoc {
                    source: g.source.clone(),
                    dest_site: g.dest_site.clone(),
                    dest_format: g.dest_format.clone(),
                })
                .collect(),
            latency_bound: Some(Quantity(format_quantity(inst.latency_bound, Dimension::Time))),
            cost_weights: inst
                .cost_weights
                .iter()
                .map(|(k, v)| (k.name().to_string(), Quantity(exact_text(v))))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;
    use proptest::prelude::*;

    const MINIMAL: &str = "\
schema: 1
name: tiny
sites:
  - id: s1
interfaces:
  - { id: dsi1, site: s1, kind: data-sharing, total: { storage: 10 GB } }
  - { id: dpi1, site: s1, kind: data-processing, total: { compute: 16 } }
links:
  - { id: l1, endpoints: [s1, s1], bandwidth: 1 GB/s, latency: 0.5 ms }
component_types:
  - { id: raw, class: data, msg_size: 2 MB }
  - { id: out, class: data, msg_size: 1 MB }
  - { id: proc, class: processing, input_format: raw, output_format: out }
components:
  - { id: src, type: raw, fixed: true, placement: dsi1, demand: { storage: 100, config: 100 }, msg_max_rate: 10, config_sites: [s1] }
  - { id: pc, type: proc, demand: { compute: 1, config: 100 }, msg_max_rate: 10, config_sites: [s1] }
  - { id: sink, type: out, demand: { storage: 100, config: 100 }, msg_max_rate: 10, config_sites: [s1] }
goals:
  - { source: src, dest_site: s1, dest_format: out }
latency_bound: 10 s
";

    #[test]
    fn minimal_document_lowers() {
        let doc = parse_config(MINIMAL).unwrap();
        assert_eq!(doc.goals.len(), 1);
        let inst = lower_config(&doc).unwrap();
        assert_eq!(inst.graph.links[0].total_bw, Q::int(1024));
        assert_eq!(inst.graph.links[0].latency, Q::new(1, 2000));
        assert_eq!(inst.graph.interfaces[0].total[ResourceKind::Storage], Q::int(10240));
        assert_eq!(inst.graph.interfaces[0].available, inst.graph.interfaces[0].total);
        assert_eq!(inst.cost_weights, ResourceMap::uniform(Q::ONE));
        let src = inst.component("src").unwrap();
        assert_eq!(inst.edge_bandwidth(src), Some(Q::int(20)));
    }

    #[test]
    fn duplicate_site_is_located() {
        let text = MINIMAL.replace("  - id: s1\n", "  - id: s1\n  - id: s1\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("duplicate id `s1`"), "{e}");
        assert_eq!((e.line, e.column), (Some(5), Some(9)));
    }

    #[test]
    fn unknown_key_and_syntax_errors_carry_positions() {
        let e = parse_config(&MINIMAL.replace("name: tiny", "nmae: tiny")).unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
        assert_eq!(e.line, Some(2));
        let e = parse_config("schema: 1\nsites: [\n").unwrap_err();
        assert!(e.line.is_some());
        let e = parse_config("schema: 2\nsites: []\n").unwrap_err();
        assert!(e.message.contains("schema version"));
    }

    #[test]
    fn anchors_are_rejected() {
        let text = MINIMAL.replace("latency_bound: 10 s", "latency_bound: &b 10 s");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("anchors"));
    }

    #[test]
    fn lowering_errors_are_located() {
        let e = load_config(&MINIMAL.replace("type: proc", "type: procz")).unwrap_err();
        assert!(e.message.contains("unknown component type"), "{e}");
        assert!(e.line.is_some());
        let e = load_config(&MINIMAL.replace("latency_bound: 10 s\n", "")).unwrap_err();
        assert!(e.message.contains("latency_bound is required"));
        let e = load_config(&MINIMAL.replace("msg_max_rate: 10, config_sites: [s1] }\n  - { id: sink", "msg_max_rate: 0, config_sites: [s1] }\n  - { id: sink")).unwrap_err();
        assert!(e.message.contains("msg_max_rate"), "{e}");
    }

    #[test]
    fn defaults_apply() {
        let text = MINIMAL.replace("goals:\n  - { source: src, dest_site: s1, dest_format: out }\nlatency_bound: 10 s\n", "");
        let inst = load_config(&text).unwrap();
        assert_eq!(inst.latency_bound, Q::int(DEFAULT_LATENCY_BOUND_S));
        let with_units = MINIMAL.replace("schema: 1\n", "schema: 1\nunits: { storage: GB }\n");
        let inst = load_config(&with_units).unwrap();
        assert_eq!(inst.component("src").unwrap().demand[ResourceKind::Storage], Q::int(102400));
    }

    #[test]
    fn composite_latency_defaults_to_hop_sum() {
        let inst = benchgen::gen_vary(benchgen::VaryKind::Sites, 3, 0).unwrap();
        let mut doc = ConfigDocument::from_instance(&inst);
        let cl = doc.links.iter_mut().find(|l| l.kind == LinkKindDoc::Composite).unwrap();
        cl.latency = None;
        let lowered = lower_config(&doc).unwrap();
        let cl = lowered.graph.links.iter().find(|l| l.kind == LinkKind::Composite).unwrap();
        let hops: Q = cl.hops.iter().map(|h| lowered.link(h).unwrap().latency).sum();
        assert_eq!(cl.latency, hops);
    }

    #[test]
    fn float_quantities_are_exact() {
        let doc = parse_config(&MINIMAL.replace("latency: 0.5 ms", "latency: 0.1")).unwrap();
        let inst = lower_config(&doc).unwrap();
        assert_eq!(inst.graph.links[0].latency, Q::new(1, 10));
    }

    #[test]
    fn lowering_is_deterministic() {
        let a = load_config(MINIMAL).unwrap();
        let b = load_config(MINIMAL).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    proptest! {
        #[test]
        fn serialize_parse_is_a_fixed_point(seed in 0u64..300) {
            let inst = benchgen::gen_random_small(seed);
            let doc = ConfigDocument::from_instance(&inst);
            let text = serialize_config(&doc);
            let again = parse_config(&text).unwrap();
            prop_assert_eq!(&again, &doc);
            prop_assert_eq!(serialize_config(&again), text);
            prop_assert_eq!(lower_config(&again).unwrap(), inst);
        }
    }
}
