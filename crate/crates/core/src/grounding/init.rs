use super::{Fluent, Pred};
use crate::model::{ComponentClass, LinkKind, ProblemInstance, ResourceKind};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitFact {
    pub pred: Pred,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitValue {
    pub fluent: Fluent,
    pub args: Vec<String>,
    pub value: Q,
}

/// Problem encoding of an instance: every fact and fluent value written in
/// the initial state of the problem file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InitEncoding {
    pub facts: Vec<InitFact>,
    pub values: Vec<InitValue>,
}

impl InitEncoding {
    fn fact(&mut self, pred: Pred, args: &[&str]) {
        self.facts.push(InitFact { pred, args: args.iter().map(|s| s.to_string()).collect() });
    }

    fn value(&mut self, fluent: Fluent, args: &[&str], value: Q) {
        self.values.push(InitValue { fluent, args: args.iter().map(|s| s.to_string()).collect(), value });
    }
}

pub fn init_encoding(inst: &ProblemInstance) -> InitEncoding {
    let mut e = InitEncoding::default();
    let net = ResourceKind::Network.name();
    let cfg = ResourceKind::Config.name();

    let mut ifs: Vec<_> = inst.graph.interfaces.iter().collect();
    ifs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut links: Vec<_> = inst.graph.links.iter().collect();
    links.sort_by(|a, b| a.id.cmp(&b.id));
    let mut wcs: Vec<_> = inst.components.iter().collect();
    wcs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut dcts: Vec<_> = inst.component_types.iter().filter(|t| t.class == ComponentClass::Data).collect();
    dcts.sort_by(|a, b| a.id.cmp(&b.id));

    for i in &ifs {
        e.fact(Pred::AvailableAt, &[&i.id, i.kind.resource().name(), &i.site]);
    }
    for l in &links {
        let (a, b) = (l.endpoints.0.as_str(), l.endpoints.1.as_str());
        match l.kind {
            LinkKind::Direct => {
                e.fact(Pred::AvailableAt, &[&l.id, net, a]);
                if a != b {
                    e.fact(Pred::AvailableAt, &[&l.id, net, b]);
                }
            }
            LinkKind::Composite => {}
        }
        e.fact(Pred::Linked, &[&l.id, a, b]);
        if a != b {
            e.fact(Pred::Linked, &[&l.id, b, a]);
        }
        for h in &l.hops {
            e.fact(Pred::LinkUses, &[&l.id, h]);
        }
    }
    for c in &wcs {
        let Some(t) = inst.component_type(&c.ctype) else { continue };
        e.fact(Pred::TypeOf, &[&c.id, &t.id]);
        for s in &c.config_sites {
            e.fact(Pred::AvailableAt, &[&c.id, cfg, s]);
        }
        if let (Some(i), Some(o)) = (&t.input_format, &t.output_format) {
            e.fact(Pred::InputFormat, &[&c.id, i]);
            e.fact(Pred::OutputFormat, &[&c.id, o]);
        }
        if let (true, Some(pl)) = (c.fixed, &c.placement) {
            e.fact(Pred::Fixed, &[&c.id]);
            e.fact(Pred::ScheduledOn, &[&c.id, pl]);
            if t.class == ComponentClass::Data {
                e.fact(Pred::HasData, &[&c.id, pl, &c.id, pl]);
            }
        }
    }

    for i in &ifs {
        let r = i.kind.resource();
        e.value(Fluent::ResourceTotal, &[&i.id, r.name()], i.total[r]);
        e.value(Fluent::ResourceAvailable, &[&i.id, r.name()], i.available[r]);
    }
    for l in &links {
        e.value(Fluent::ResourceTotal, &[&l.id, net], l.total_bw);
        e.value(Fluent::ResourceAvailable, &[&l.id, net], l.available_bw);
        e.value(Fluent::NetworkLatency, &[&l.id], l.latency);
    }
    for c in &wcs {
        let Some(t) = inst.component_type(&c.ctype) else { continue };
        let r = t.class.work_resource();
        e.value(Fluent::WorkAmount, &[&c.id, r.name()], c.demand[r]);
        e.value(Fluent::WorkAmount, &[&c.id, cfg], c.demand[ResourceKind::Config]);
        e.value(Fluent::MsgMaxRate, &[&c.id], c.msg_max_rate);
        if let (true, Some(pl)) = (c.fixed, &c.placement) {
            e.value(Fluent::MsgActualRate, &[&c.id, pl], c.msg_max_rate);
        }
    }
    for t in &dcts {
        e.value(Fluent::MsgSize, &[&t.id], t.msg_size.unwrap_or(Q::ZERO));
    }
    for r in ResourceKind::ALL {
        e.value(Fluent::WorkCostWeight, &[r.name()], inst.cost_weights[r]);
    }
    e.value(Fluent::TotalCost, &[], Q::ZERO);
    e.value(Fluent::AbsoluteLatency, &[], Q::ZERO);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;

    #[test]
    fn one_weight_value_per_resource() {
        let e = init_encoding(&benchgen::minimal_chain());
        let weights = e.values.iter().filter(|v| v.fluent == Fluent::WorkCostWeight).count();
        assert_eq!(weights, ResourceKind::ALL.len());
        assert!(e.facts.iter().all(|f| f.args.len() == f.pred.signature().len()));
        assert!(e.values.iter().all(|v| v.args.len() == v.fluent.signature().len()));
    }
}
