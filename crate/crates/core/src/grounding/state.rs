use fixedbitset::FixedBitSet;

use super::{GroundAction, NumOp, PropId, VarId};
use crate::rational::Q;

/// Closed-world proposition set plus a partial fluent assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundState {
    pub props: FixedBitSet,
    pub vals: Vec<Q>,
    pub defined: FixedBitSet,
}

/// First unmet precondition of an action in a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unmet {
    Static,
    Positive(PropId),
    Negative(PropId),
    Disjunction(usize),
    Numeric { var: VarId, need: Q, have: Option<Q> },
}

impl GroundState {
    pub fn empty(props: usize, fluents: usize) -> GroundState {
        GroundState {
            props: FixedBitSet::with_capacity(props),
            vals: vec![Q::ZERO; fluents],
            defined: FixedBitSet::with_capacity(fluents),
        }
    }

    pub fn set_prop(&mut self, p: PropId) {
        self.props.insert(p as usize);
    }

    pub fn has(&self, p: PropId) -> bool {
        self.props.contains(p as usize)
    }

    pub fn set_val(&mut self, v: VarId, q: Q) {
        self.vals[v as usize] = q;
        self.defined.insert(v as usize);
    }

    pub fn val(&self, v: VarId) -> Option<Q> {
        self.defined.contains(v as usize).then(|| self.vals[v as usize])
    }

    pub fn check(&self, a: &GroundAction) -> Result<(), Unmet> {
        if !a.static_ok {
            return Err(Unmet::Static);
        }
        if let Some(&p) = a.pre_pos.iter().find(|&&p| !self.has(p)) {
            return Err(Unmet::Positive(p));
        }
        if let Some(&p) = a.pre_neg.iter().find(|&&p| self.has(p)) {
            return Err(Unmet::Negative(p));
        }
        if let Some(i) = a.pre_any.iter().position(|g| !g.iter().any(|&p| self.has(p))) {
            return Err(Unmet::Disjunction(i));
        }
        for c in &a.pre_num {
            match self.val(c.var) {
                Some(v) if v >= c.bound => {}
                have => return Err(Unmet::Numeric { var: c.var, need: c.bound, have }),
            }
        }
        Ok(())
    }

    pub fn applicable(&self, a: &GroundAction) -> bool {
        self.check(a).is_ok()
    }

    /// Successor state; the caller must have checked applicability.
    pub fn apply(&self, a: &GroundAction) -> GroundState {
        let mut s = self.clone();
        for &p in &a.add {
            s.set_prop(p);
        }
        for e in &a.num {
            let cur = s.vals[e.var as usize];
            let next = match e.op {
                NumOp::Increase => cur + e.value,
                NumOp::Decrease => cur - e.value,
                NumOp::Assign => e.value,
            };
            s.set_val(e.var, next);
        }
        s
    }
}
