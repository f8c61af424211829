//! Atoms, database instances and the active domain.

use alloc::string::String;
use alloc::vec::Vec;

use crate::relation::Relation;
use crate::value::Value;
use crate::vars::{Var, VarSet};
use crate::{Error, Result};

/// A relation symbol applied to variables, in the order written.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: String,
    pub cols: Vec<Var>,
}

impl Atom {
    pub fn new(name: impl Into<String>, cols: Vec<Var>) -> Result<Self> {
        let name = name.into();
        let vars = VarSet::from_vars(cols.iter().copied());
        if vars.len() != cols.len() {
            return Err(Error::InvalidInput(alloc::format!(
                "atom {name} repeats a variable"
            )));
        }
        Ok(Atom { name, cols })
    }

    pub fn vars(&self) -> VarSet {
        VarSet::from_vars(self.cols.iter().copied())
    }
}

/// Per-variable set of values observed in any input column of that variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveDomain {
    values: Vec<Vec<Value>>,
}

impl ActiveDomain {
    pub fn insert(&mut self, v: Var, x: Value) {
        if self.values.len() <= v {
            self.values.resize(v + 1, Vec::new());
        }
        let col = &mut self.values[v];
        if let Err(i) = col.binary_search(&x) {
            col.insert(i, x);
        }
    }

    pub fn values(&self, v: Var) -> &[Value] {
        self.values.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn size(&self, v: Var) -> usize {
        self.values(v).len()
    }
}

/// A database instance: one relation per body atom.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    atoms: Vec<Atom>,
    rels: Vec<Relation>,
    dom: ActiveDomain,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: Atom, rel: Relation) -> Result<()> {
        if rel.vars() != atom.vars() {
            return Err(Error::InvalidInput(alloc::format!(
                "relation for atom {} has the wrong variables",
                atom.name
            )));
        }
        for row in rel.iter() {
            for (v, &x) in rel.vars().iter().zip(row) {
                self.dom.insert(v, x);
            }
        }
        if let Some(i) = self.atoms.iter().position(|a| a == &atom) {
            self.rels[i] = self.rels[i].union(&rel);
            return Ok(());
        }
        self.atoms.push(atom);
        self.rels.push(rel);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn relations(&self) -> &[Relation] {
        &self.rels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Relation)> {
        self.atoms.iter().zip(&self.rels)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.atoms.iter().position(|a| a.name == name).map(|i| &self.rels[i])
    }

    /// The union of all atom variable sets.
    pub fn universe(&self) -> VarSet {
        self.atoms.iter().fold(VarSet::EMPTY, |s, a| s.union(a.vars()))
    }

    pub fn active_domain(&self) -> &ActiveDomain {
        &self.dom
    }

    /// Total number of input tuples.
    pub fn size(&self) -> usize {
        self.rels.iter().map(Relation::len).sum()
    }
}
