//! Finite relations over interned values, keyed by a variable set.
//!
//! Rows are stored flat, with columns in ascending variable order, sorted
//! lexicographically and deduplicated. Lookups by prefix are binary searches.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::database::ActiveDomain;
use crate::value::Value;
use crate::vars::{Var, VarSet};

/// A tuple in canonical column order of some [`VarSet`].
pub type Tuple = Vec<Value>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    vars: VarSet,
    arity: usize,
    len: usize,
    data: Vec<Value>,
}

impl Relation {
    pub fn empty(vars: VarSet) -> Self {
        Relation { vars, arity: vars.len(), len: 0, data: Vec::new() }
    }

    /// The nullary relation holding the empty tuple.
    pub fn unit() -> Self {
        Relation { vars: VarSet::EMPTY, arity: 0, len: 1, data: Vec::new() }
    }

    /// Builds a relation from rows already in canonical column order.
    pub fn from_rows<I, R>(vars: VarSet, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[Value]>,
    {
        let arity = vars.len();
        let mut data = Vec::new();
        let mut n = 0usize;
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), arity, "row arity mismatch");
            data.extend_from_slice(r);
            n += 1;
        }
        Self::from_flat(vars, data, n)
    }

    /// Builds a relation from rows whose columns follow `cols` (a permutation
    /// of the members of the resulting variable set).
    pub fn from_columns<I, R>(cols: &[Var], rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[Value]>,
    {
        let vars = VarSet::from_vars(cols.iter().copied());
        assert_eq!(vars.len(), cols.len(), "repeated column variable");
        let dest: Vec<usize> = cols.iter().map(|&v| vars.rank(v).unwrap()).collect();
        let arity = cols.len();
        let mut data = Vec::new();
        let mut n = 0usize;
        let mut buf = alloc::vec![Value(0); arity];
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), arity, "row arity mismatch");
            for (i, &x) in r.iter().enumerate() {
                buf[dest[i]] = x;
            }
            data.extend_from_slice(&buf);
            n += 1;
        }
        Self::from_flat(vars, data, n)
    }

    fn from_flat(vars: VarSet, data: Vec<Value>, n: usize) -> Self {
        let arity = vars.len();
        if arity == 0 {
            return Relation { vars, arity, len: usize::from(n > 0), data: Vec::new() };
        }
        let mut rows: Vec<&[Value]> = data.chunks_exact(arity).collect();
        rows.sort_unstable();
        rows.dedup();
        let len = rows.len();
        let mut out = Vec::with_capacity(len * arity);
        for r in rows {
            out.extend_from_slice(r);
        }
        Relation { vars, arity, len, data: out }
    }

    pub fn vars(&self) -> VarSet {
        self.vars
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn row(&self, i: usize) -> &[Value] {
        assert!(i < self.len);
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Value]> + '_ {
        (0..self.len).map(move |i| &self.data[i * self.arity..(i + 1) * self.arity])
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        if self.arity == 0 {
            return t.is_empty() && self.len == 1;
        }
        let r = self.prefix_range(t);
        !r.is_empty()
    }

    /// Rows whose leading columns equal `prefix`.
    pub fn prefix_range(&self, prefix: &[Value]) -> Range<usize> {
        let k = prefix.len();
        assert!(k <= self.arity);
        if k == 0 {
            return 0..self.len;
        }
        let key = |i: usize| &self.data[i * self.arity..i * self.arity + k];
        let lo = partition_point(self.len, |i| key(i) < prefix);
        let hi = partition_point(self.len, |i| key(i) <= prefix);
        lo..hi
    }

    /// Projection onto `w ⊆ vars`.
    pub fn project(&self, w: VarSet) -> Relation {
        assert!(w.is_subset(self.vars), "projection onto non-subset");
        if w == self.vars {
            return self.clone();
        }
        let pos = self.vars.positions_of(w);
        let mut data = Vec::with_capacity(self.len * pos.len());
        for r in self.iter() {
            data.extend(pos.iter().map(|&p| r[p]));
        }
        Self::from_flat(w, data, self.len)
    }

    /// Restriction onto an arbitrary variable set: the projection onto the
    /// shared variables, crossed with the active domain of every variable of
    /// `w` that the relation lacks.
    pub fn restrict(&self, w: VarSet, dom: &ActiveDomain) -> Relation {
        if w.is_subset(self.vars) {
            return self.project(w);
        }
        let common = w.intersection(self.vars);
        let base = self.project(common);
        if base.is_empty() {
            return Relation::empty(w);
        }
        let missing: Vec<Var> = w.difference(self.vars).iter().collect();
        let doms: Vec<&[Value]> = missing.iter().map(|&v| dom.values(v)).collect();
        if doms.iter().any(|d| d.is_empty()) {
            return Relation::empty(w);
        }
        let common_pos = w.positions_of(common);
        let missing_pos: Vec<usize> = missing.iter().map(|&v| w.rank(v).unwrap()).collect();
        let arity = w.len();
        let mut data = Vec::new();
        let mut n = 0usize;
        let mut buf = alloc::vec![Value(0); arity];
        let mut idx = alloc::vec![0usize; missing.len()];
        for r in base.iter() {
            for (i, &p) in common_pos.iter().enumerate() {
                buf[p] = r[i];
            }
            idx.iter_mut().for_each(|x| *x = 0);
            'odometer: loop {
                for (j, &p) in missing_pos.iter().enumerate() {
                    buf[p] = doms[j][idx[j]];
                }
                data.extend_from_slice(&buf);
                n += 1;
                for j in (0..idx.len()).rev() {
                    idx[j] += 1;
                    if idx[j] < doms[j].len() {
                        continue 'odometer;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        Self::from_flat(w, data, n)
    }

    /// Rows whose projection onto the shared variables occurs in `other`.
    pub fn semijoin(&self, other: &Relation) -> Relation {
        let common = self.vars.intersection(other.vars);
        if other.is_empty() {
            return Relation::empty(self.vars);
        }
        if common.is_empty() {
            return self.clone();
        }
        let keys = other.project(common);
        let pos = self.vars.positions_of(common);
        let mut key = Vec::with_capacity(pos.len());
        let mut data = Vec::new();
        let mut n = 0;
        for r in self.iter() {
            key.clear();
            key.extend(pos.iter().map(|&p| r[p]));
            if keys.contains(&key) {
                data.extend_from_slice(r);
                n += 1;
            }
        }
        Relation { vars: self.vars, arity: self.arity, len: n, data }
    }

    /// Natural join.
    pub fn join(&self, other: &Relation) -> Relation {
        let common = self.vars.intersection(other.vars);
        let out_vars = self.vars.union(other.vars);
        if self.is_empty() || other.is_empty() {
            return Relation::empty(out_vars);
        }
        let other_key = other.vars.positions_of(common);
        let mut index: BTreeMap<Vec<Value>, Vec<usize>> = BTreeMap::new();
        for (i, r) in other.iter().enumerate() {
            let k: Vec<Value> = other_key.iter().map(|&p| r[p]).collect();
            index.entry(k).or_default().push(i);
        }
        let self_key = self.vars.positions_of(common);
        let from_self = out_vars.positions_of(self.vars);
        let from_other = out_vars.positions_of(other.vars);
        let mut buf = alloc::vec![Value(0); out_vars.len()];
        let mut data = Vec::new();
        let mut n = 0;
        let mut key = Vec::with_capacity(self_key.len());
        for r in self.iter() {
            key.clear();
            key.extend(self_key.iter().map(|&p| r[p]));
            let Some(matches) = index.get(&key) else { continue };
            for (i, &p) in from_self.iter().enumerate() {
                buf[p] = r[i];
            }
            for &j in matches {
                let s = other.row(j);
                for (i, &p) in from_other.iter().enumerate() {
                    buf[p] = s[i];
                }
                data.extend_from_slice(&buf);
                n += 1;
            }
        }
        Self::from_flat(out_vars, data, n)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.vars, other.vars, "union of relations over different variables");
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self::from_flat(self.vars, data, self.len + other.len)
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.vars == other.vars && self.iter().all(|r| other.contains(r))
    }

    /// The value of variable `v` in row `r`.
    pub fn value_of(&self, r: &[Value], v: Var) -> Value {
        r[self.vars.rank(v).expect("variable not in relation")]
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation{:?}[", self.vars)?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x.0)?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// First index in `0..n` where `pred` turns false (pred must be monotone).
pub(crate) fn partition_point(n: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Projects a canonical row over `from` onto `to ⊆ from`.
pub fn project_row(from: VarSet, row: &[Value], to: VarSet) -> Tuple {
    to.iter().map(|v| row[from.rank(v).unwrap()]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[u32]) -> Vec<Value> {
        xs.iter().map(|&x| Value(x)).collect()
    }

    fn ab() -> VarSet {
        VarSet::from_vars([0, 1])
    }

    #[test]
    fn sorted_and_deduplicated() {
        let r = Relation::from_rows(ab(), [v(&[2, 1]), v(&[1, 5]), v(&[2, 1])]);
        assert_eq!(r.len(), 2);
        assert_eq!(r.row(0), &v(&[1, 5])[..]);
        assert!(r.contains(&v(&[2, 1])));
        assert!(!r.contains(&v(&[2, 2])));
    }

    #[test]
    fn from_columns_reorders() {
        // Written as (B, A).
        let r = Relation::from_columns(&[1, 0], [v(&[7, 3])]);
        assert_eq!(r.vars(), ab());
        assert_eq!(r.row(0), &v(&[3, 7])[..]);
    }

    #[test]
    fn projection() {
        let r = Relation::from_rows(ab(), [v(&[1, 2]), v(&[1, 3])]);
        let p = r.project(VarSet::singleton(0));
        assert_eq!(p.len(), 1);
        assert_eq!(r.project(ab()), r);
    }

    #[test]
    fn restrict_extends_by_active_domain() {
        let r = Relation::from_rows(ab(), [v(&[1, 2]), v(&[3, 4])]);
        let mut dom = ActiveDomain::default();
        dom.insert(2, Value(8));
        dom.insert(2, Value(9));
        let w = VarSet::from_vars([0, 1, 2]);
        let x = r.restrict(w, &dom);
        assert_eq!(x.len(), 4);
        assert!(x.contains(&v(&[1, 2, 9])));
        let y = r.restrict(VarSet::from_vars([0, 2]), &dom);
        assert_eq!(y.len(), 4);
    }

    #[test]
    fn join_and_semijoin() {
        let r = Relation::from_rows(ab(), [v(&[1, 2]), v(&[1, 3]), v(&[4, 4])]);
        let s = Relation::from_rows(VarSet::from_vars([1, 2]), [v(&[2, 7]), v(&[3, 8]), v(&[3, 9])]);
        let j = r.join(&s);
        assert_eq!(j.len(), 3);
        assert!(j.contains(&v(&[1, 3, 9])));
        let sj = r.semijoin(&s);
        assert_eq!(sj.len(), 2);
        let prod = r.join(&Relation::from_rows(VarSet::singleton(5), [v(&[0]), v(&[1])]));
        assert_eq!(prod.len(), 6);
    }

    #[test]
    fn nullary() {
        let u = Relation::unit();
        assert_eq!(u.len(), 1);
        assert!(u.contains(&[]));
        let e = Relation::empty(VarSet::EMPTY);
        assert!(!e.contains(&[]));
        let r = Relation::from_rows(ab(), [v(&[1, 2])]);
        assert_eq!(r.project(VarSet::EMPTY), u);
        assert_eq!(r.join(&u), r);
        assert!(r.join(&e).is_empty());
    }
}
