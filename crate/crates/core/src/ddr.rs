//! Disjunctive datalog rules and conjunctive queries.

use alloc::string::String;
use alloc::vec::Vec;

use crate::database::Atom;
use crate::vars::{VarNames, VarSet};
use crate::{Error, Result};

/// `head_1 ∨ … ∨ head_k :- body`. A model must hold, for every tuple of the
/// body's full join, its projection in at least one head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddr {
    pub names: VarNames,
    pub heads: Vec<Atom>,
    pub body: Vec<Atom>,
}

impl Ddr {
    pub fn new(names: VarNames, heads: Vec<Atom>, body: Vec<Atom>) -> Result<Self> {
        if heads.is_empty() {
            return Err(Error::InvalidInput(String::from("a rule needs at least one head")));
        }
        if body.is_empty() {
            return Err(Error::InvalidInput(String::from("a rule needs at least one body atom")));
        }
        let universe = body.iter().fold(VarSet::EMPTY, |s, a| s.union(a.vars()));
        for (i, h) in heads.iter().enumerate() {
            if !h.vars().is_subset(universe) {
                return Err(Error::InvalidInput(alloc::format!(
                    "head {} uses a variable that appears in no body atom",
                    h.name
                )));
            }
            if heads[..i].iter().any(|g| g.vars() == h.vars()) {
                return Err(Error::InvalidInput(alloc::format!(
                    "heads must have pairwise distinct variable sets ({} repeats one)",
                    h.name
                )));
            }
        }
        Ok(Ddr { names, heads, body })
    }

    pub fn universe(&self) -> VarSet {
        self.body.iter().fold(VarSet::EMPTY, |s, a| s.union(a.vars()))
    }

    pub fn head_sets(&self) -> Vec<VarSet> {
        self.heads.iter().map(Atom::vars).collect()
    }

    pub fn is_single_head(&self) -> bool {
        self.heads.len() == 1
    }
}

/// `head :- body` with free variables `vars(head)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cq {
    pub names: VarNames,
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Cq {
    pub fn new(names: VarNames, head: Atom, body: Vec<Atom>) -> Result<Self> {
        // Reuse the rule checks.
        let d = Ddr::new(names, alloc::vec![head], body)?;
        let Ddr { names, mut heads, body } = d;
        Ok(Cq { names, head: heads.pop().unwrap(), body })
    }

    pub fn free(&self) -> VarSet {
        self.head.vars()
    }

    pub fn universe(&self) -> VarSet {
        self.body.iter().fold(VarSet::EMPTY, |s, a| s.union(a.vars()))
    }

    pub fn is_full(&self) -> bool {
        self.free() == self.universe()
    }

    pub fn is_boolean(&self) -> bool {
        self.free().is_empty()
    }

    pub fn edges(&self) -> Vec<VarSet> {
        self.body.iter().map(Atom::vars).collect()
    }

    pub fn as_ddr(&self) -> Ddr {
        Ddr {
            names: self.names.clone(),
            heads: alloc::vec![self.head.clone()],
            body: self.body.clone(),
        }
    }
}
