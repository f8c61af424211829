//! Degrees and degree constraints.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::database::{ActiveDomain, Database};
use crate::relation::Relation;
use crate::value::Value;
use crate::vars::{VarNames, VarSet};
use crate::{Error, Result};

/// A monotonicity term `(Y|X)`, read `h(XY) - h(X)`. Unconditional when
/// `X` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonTerm {
    pub y: VarSet,
    pub x: VarSet,
}

impl MonTerm {
    pub fn new(y: VarSet, x: VarSet) -> Self {
        debug_assert!(y.is_disjoint(x), "monotonicity term with overlapping sides");
        MonTerm { y, x }
    }

    pub fn unconditional(y: VarSet) -> Self {
        MonTerm { y, x: VarSet::EMPTY }
    }

    pub fn is_unconditional(&self) -> bool {
        self.x.is_empty()
    }

    /// `X ∪ Y`.
    pub fn all(&self) -> VarSet {
        self.x.union(self.y)
    }

    pub fn render(&self, names: &VarNames) -> String {
        if self.x.is_empty() {
            names.render(self.y)
        } else {
            alloc::format!("{}|{}", names.render(self.y), names.render(self.x))
        }
    }
}

/// Degree constraints `deg(Y|X) ≤ N`. Duplicates keep the smaller bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeConstraints {
    entries: BTreeMap<MonTerm, u64>,
}

impl DegreeConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, term: MonTerm, bound: u64) -> Result<()> {
        if bound == 0 {
            return Err(Error::InvalidInput(String::from("degree bounds must be positive")));
        }
        if term.y.is_empty() {
            return Err(Error::InvalidInput(String::from(
                "degree constraint with no measured variables",
            )));
        }
        if !term.y.is_disjoint(term.x) {
            return Err(Error::InvalidInput(String::from(
                "degree constraint with overlapping sides",
            )));
        }
        let e = self.entries.entry(term).or_insert(bound);
        *e = (*e).min(bound);
        Ok(())
    }

    pub fn get(&self, term: &MonTerm) -> Option<u64> {
        self.entries.get(term).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonTerm, u64)> + '_ {
        self.entries.iter().map(|(&t, &n)| (t, n))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn remove(&mut self, term: &MonTerm) -> Option<u64> {
        self.entries.remove(term)
    }

    /// Variables mentioned by some constraint.
    pub fn covered(&self) -> VarSet {
        self.entries.keys().fold(VarSet::EMPTY, |s, t| s.union(t.all()))
    }

    /// The common bound when every constraint shares it.
    pub fn uniform_bound(&self) -> Option<u64> {
        let mut it = self.entries.values();
        let first = *it.next()?;
        it.all(|&n| n == first).then_some(first)
    }

    pub fn max_bound(&self) -> Option<u64> {
        self.entries.values().copied().max()
    }
}

impl FromIterator<(MonTerm, u64)> for DegreeConstraints {
    fn from_iter<I: IntoIterator<Item = (MonTerm, u64)>>(iter: I) -> Self {
        let mut dc = DegreeConstraints::new();
        for (t, n) in iter {
            dc.insert(t, n).expect("invalid degree constraint");
        }
        dc
    }
}

/// Splits a term against a relation: the parts of `X` and `Y` the relation
/// has, and the active-domain factor contributed by the `Y` variables it
/// lacks. `None` when some missing variable has an empty domain.
fn split(r: &Relation, t: &MonTerm, dom: &ActiveDomain) -> Option<(VarSet, VarSet, u64)> {
    let rv = r.vars();
    let mut extra = 1u64;
    for v in t.y.difference(rv).iter() {
        extra = extra.saturating_mul(dom.size(v) as u64);
    }
    if t.x.difference(rv).iter().any(|v| dom.size(v) == 0) || extra == 0 {
        return None;
    }
    Some((t.x.intersection(rv), t.y.intersection(rv), extra))
}

/// Number of distinct `y` with `(x, y)` in the restriction of `r` onto `XY`.
/// `x` is in canonical column order of `t.x`.
pub fn degree_at(r: &Relation, t: &MonTerm, x: &[Value], dom: &ActiveDomain) -> u64 {
    assert_eq!(x.len(), t.x.len(), "condition tuple arity mismatch");
    if r.is_empty() {
        return 0;
    }
    let Some((xr, yr, extra)) = split(r, t, dom) else { return 0 };
    for (i, v) in t.x.iter().enumerate() {
        if !r.vars().contains(v) && dom.values(v).binary_search(&x[i]).is_err() {
            return 0;
        }
    }
    let key: Vec<Value> = xr.iter().map(|v| x[t.x.rank(v).unwrap()]).collect();
    let p = r.project(xr.union(yr));
    let kpos = p.vars().positions_of(xr);
    let count = p
        .iter()
        .filter(|row| kpos.iter().zip(&key).all(|(&i, k)| row[i] == *k))
        .count() as u64;
    count.saturating_mul(extra)
}

/// Per-key distinct counts of `Y` grouped by `X`, within the relation's own
/// columns.
fn group_degrees(p: &Relation, xr: VarSet) -> BTreeMap<Vec<Value>, u64> {
    let kpos = p.vars().positions_of(xr);
    let mut groups: BTreeMap<Vec<Value>, u64> = BTreeMap::new();
    for row in p.iter() {
        let k: Vec<Value> = kpos.iter().map(|&i| row[i]).collect();
        *groups.entry(k).or_default() += 1;
    }
    groups
}

/// `max_x deg_R(Y | X = x)`; zero on an empty relation.
pub fn max_degree(r: &Relation, t: &MonTerm, dom: &ActiveDomain) -> u64 {
    if r.is_empty() {
        return 0;
    }
    let Some((xr, yr, extra)) = split(r, t, dom) else { return 0 };
    let p = r.project(xr.union(yr));
    let best = group_degrees(&p, xr).values().copied().max().unwrap_or(0);
    best.saturating_mul(extra)
}

/// Cardinality of the restriction of `r` onto `XY` without materializing it.
pub fn restricted_len(r: &Relation, w: VarSet, dom: &ActiveDomain) -> u64 {
    if r.is_empty() {
        return 0;
    }
    let mut n = r.project(w.intersection(r.vars())).len() as u64;
    for v in w.difference(r.vars()).iter() {
        n = n.saturating_mul(dom.size(v) as u64);
    }
    n
}

/// Minimum over the database's relations of [`max_degree`].
pub fn schema_degree(db: &Database, t: &MonTerm) -> u64 {
    db.relations()
        .iter()
        .map(|r| max_degree(r, t, db.active_domain()))
        .min()
        .unwrap_or(0)
}

/// The first constraint the database violates, with its actual degree.
pub fn first_violation(db: &Database, dc: &DegreeConstraints) -> Option<(MonTerm, u64, u64)> {
    dc.iter().find_map(|(t, n)| {
        let d = schema_degree(db, &t);
        (d > n).then_some((t, d, n))
    })
}

pub fn satisfies(db: &Database, dc: &DegreeConstraints) -> bool {
    first_violation(db, dc).is_none()
}

/// Every `(Y|X)` with `Y ≠ ∅` and `XY` inside some atom.
pub fn default_terms(db: &Database) -> Vec<MonTerm> {
    let mut terms = BTreeSet::new();
    for a in db.atoms() {
        for w in a.vars().subsets() {
            for y in w.subsets() {
                if !y.is_empty() {
                    terms.insert(MonTerm::new(y, w.difference(y)));
                }
            }
        }
    }
    terms.into_iter().collect()
}

/// Tight constraints `N = max(1, schema_degree)` for the given terms, or for
/// [`default_terms`] when `terms` is `None`.
pub fn infer_constraints(db: &Database, terms: Option<&[MonTerm]>) -> Result<DegreeConstraints> {
    let universe = db.universe();
    let owned;
    let terms = match terms {
        Some(t) => t,
        None => {
            owned = default_terms(db);
            &owned
        }
    };
    let mut dc = DegreeConstraints::new();
    for t in terms {
        if !t.all().is_subset(universe) {
            return Err(Error::InvalidInput(String::from(
                "constraint term mentions a variable that appears in no atom",
            )));
        }
        dc.insert(*t, schema_degree(db, t).max(1))?;
    }
    Ok(dc)
}

/// Only the cardinality constraints `|R| ≤ N` of each atom.
pub fn infer_cardinalities(db: &Database) -> DegreeConstraints {
    let mut dc = DegreeConstraints::new();
    for (a, _) in db.iter() {
        let t = MonTerm::unconditional(a.vars());
        dc.insert(t, schema_degree(db, &t).max(1)).unwrap();
    }
    dc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::Atom;
    use alloc::vec;

    fn vals(xs: &[u32]) -> Vec<Value> {
        xs.iter().map(|&x| Value(x)).collect()
    }

    fn rel_ab() -> Relation {
        let ab = VarSet::from_vars([0, 1]);
        Relation::from_rows(ab, [vals(&[1, 2]), vals(&[1, 3]), vals(&[2, 2])])
    }

    #[test]
    fn degrees_of_small_relation() {
        let r = rel_ab();
        let dom = ActiveDomain::default();
        let b_a = MonTerm::new(VarSet::singleton(1), VarSet::singleton(0));
        assert_eq!(degree_at(&r, &b_a, &vals(&[1]), &dom), 2);
        assert_eq!(degree_at(&r, &b_a, &vals(&[7]), &dom), 0);
        assert_eq!(max_degree(&r, &b_a, &dom), 2);
        let b = MonTerm::unconditional(VarSet::singleton(1));
        assert_eq!(max_degree(&r, &b, &dom), 2);
        let ab = MonTerm::unconditional(VarSet::from_vars([0, 1]));
        assert_eq!(max_degree(&r, &ab, &dom), 3);
        assert_eq!(max_degree(&Relation::empty(r.vars()), &ab, &dom), 0);
    }

    #[test]
    fn degree_over_missing_variable() {
        let r = rel_ab();
        let mut dom = ActiveDomain::default();
        for x in [5, 6, 7] {
            dom.insert(2, Value(x));
        }
        let c_a = MonTerm::new(VarSet::singleton(2), VarSet::singleton(0));
        assert_eq!(max_degree(&r, &c_a, &dom), 3);
        let b_c = MonTerm::new(VarSet::singleton(1), VarSet::singleton(2));
        assert_eq!(max_degree(&r, &b_c, &dom), 2);
        assert_eq!(degree_at(&r, &b_c, &vals(&[5]), &dom), 2);
        assert_eq!(degree_at(&r, &b_c, &vals(&[9]), &dom), 0);
    }

    #[test]
    fn satisfaction_and_inference() {
        let mut db = Database::new();
        db.insert(Atom::new("R", vec![0, 1]).unwrap(), rel_ab()).unwrap();
        let dc = infer_constraints(&db, None).unwrap();
        assert!(satisfies(&db, &dc));
        let b_a = MonTerm::new(VarSet::singleton(1), VarSet::singleton(0));
        assert_eq!(dc.get(&b_a), Some(2));
        let mut tighter = dc.clone();
        tighter.remove(&b_a);
        tighter.insert(b_a, 1).unwrap();
        assert!(!satisfies(&db, &tighter));
        let bad = [MonTerm::unconditional(VarSet::singleton(4))];
        assert!(infer_constraints(&db, Some(&bad)).is_err());
    }

    #[test]
    fn duplicate_constraints_keep_min() {
        let mut dc = DegreeConstraints::new();
        let t = MonTerm::unconditional(VarSet::singleton(0));
        dc.insert(t, 10).unwrap();
        dc.insert(t, 4).unwrap();
        dc.insert(t, 7).unwrap();
        assert_eq!(dc.get(&t), Some(4));
        assert!(dc.insert(t, 0).is_err());
    }
}
