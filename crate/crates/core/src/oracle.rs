//! Brute-force reference: the full natural join and model verification.
//!
//! The join binds variables in ascending index order. Relations keep their
//! columns in that same order, so the bound variables of every atom always
//! form a prefix of its rows and each extension is a range narrowing.

use alloc::vec::Vec;
use core::ops::Range;

use crate::database::Database;
use crate::ddr::Ddr;
use crate::relation::{project_row, Relation};
use crate::value::Value;
use crate::vars::{Var, VarSet};

/// All tuples over the union of the atoms' variables whose projection onto
/// every atom lies in its relation.
pub fn full_natural_join(db: &Database) -> Relation {
    let universe = db.universe();
    let order: Vec<Var> = universe.iter().collect();
    let rels = db.relations();
    if rels.iter().any(Relation::is_empty) {
        return Relation::empty(universe);
    }
    let mut search = Search {
        rels,
        ranges: rels.iter().map(|r| 0..r.len()).collect(),
        bound: alloc::vec![0; rels.len()],
        tuple: Vec::with_capacity(order.len()),
        out: Vec::new(),
        count: 0,
    };
    search.extend(&order);
    if order.is_empty() {
        return if search.count > 0 { Relation::unit() } else { Relation::empty(universe) };
    }
    Relation::from_rows(universe, search.out.chunks_exact(order.len()))
}

struct Search<'a> {
    rels: &'a [Relation],
    ranges: Vec<Range<usize>>,
    /// Number of bound columns per relation.
    bound: Vec<usize>,
    tuple: Vec<Value>,
    out: Vec<Value>,
    count: usize,
}

impl Search<'_> {
    fn extend(&mut self, order: &[Var]) {
        let Some((&v, rest)) = order.split_first() else {
            self.out.extend_from_slice(&self.tuple);
            self.count += 1;
            return;
        };
        let holders: Vec<usize> =
            (0..self.rels.len()).filter(|&i| self.rels[i].vars().contains(v)).collect();
        let saved: Vec<Range<usize>> = holders.iter().map(|&i| self.ranges[i].clone()).collect();
        let p = (0..holders.len()).min_by_key(|&j| saved[j].len()).unwrap();
        let pivot = holders[p];
        let col = self.bound[pivot];
        let mut i = saved[p].start;
        while i < saved[p].end {
            let val = self.rels[pivot].row(i)[col];
            let mut ok = true;
            for (j, &h) in holders.iter().enumerate() {
                let r = narrow(&self.rels[h], saved[j].clone(), self.bound[h], val);
                if j == p {
                    // Next distinct value of the pivot column.
                    i = r.end;
                }
                if r.is_empty() {
                    ok = false;
                }
                self.ranges[h] = r;
            }
            if ok {
                for &h in &holders {
                    self.bound[h] += 1;
                }
                self.tuple.push(val);
                self.extend(rest);
                self.tuple.pop();
                for &h in &holders {
                    self.bound[h] -= 1;
                }
            }
        }
        for (j, &h) in holders.iter().enumerate() {
            self.ranges[h] = saved[j].clone();
        }
    }
}

/// Sub-range of `range` whose column `col` equals `val`, given that rows in
/// `range` agree on all earlier columns.
fn narrow(r: &Relation, range: Range<usize>, col: usize, val: Value) -> Range<usize> {
    let len = range.len();
    let base = range.start;
    let lo = crate::relation::partition_point(len, |i| r.row(base + i)[col] < val);
    let hi = crate::relation::partition_point(len, |i| r.row(base + i)[col] <= val);
    base + lo..base + hi
}

/// Whether `out` (aligned with `ddr.heads`) is a model: every full-join tuple
/// has its projection in at least one head relation.
pub fn verify_model(db: &Database, ddr: &Ddr, out: &[Relation]) -> bool {
    first_uncovered(db, ddr, out).is_none()
}

/// A full-join tuple no head covers, if any.
pub fn first_uncovered(db: &Database, ddr: &Ddr, out: &[Relation]) -> Option<Vec<Value>> {
    assert_eq!(out.len(), ddr.heads.len(), "one output relation per head");
    let heads: Vec<VarSet> = ddr.head_sets();
    for (h, r) in heads.iter().zip(out) {
        assert_eq!(*h, r.vars(), "output relation over the wrong variables");
    }
    let join = full_natural_join(db);
    let u = join.vars();
    let found = join
        .iter()
        .find(|t| !heads.iter().zip(out).any(|(&h, r)| r.contains(&project_row(u, t, h))))
        .map(|t| t.to_vec());
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::Atom;
    use alloc::vec;

    fn vals(xs: &[u32]) -> Vec<Value> {
        xs.iter().map(|&x| Value(x)).collect()
    }

    #[test]
    fn single_consistent_tuple() {
        let mut db = Database::new();
        db.insert(
            Atom::new("R", vec![0, 1]).unwrap(),
            Relation::from_rows(VarSet::from_vars([0, 1]), [vals(&[1, 2])]),
        )
        .unwrap();
        db.insert(
            Atom::new("S", vec![1, 2]).unwrap(),
            Relation::from_rows(VarSet::from_vars([1, 2]), [vals(&[2, 3])]),
        )
        .unwrap();
        let j = full_natural_join(&db);
        assert_eq!(j.len(), 1);
        assert_eq!(j.row(0), &vals(&[1, 2, 3])[..]);
    }

    #[test]
    fn empty_annihilates() {
        let mut db = Database::new();
        db.insert(
            Atom::new("R", vec![0, 1]).unwrap(),
            Relation::from_rows(VarSet::from_vars([0, 1]), [vals(&[1, 2])]),
        )
        .unwrap();
        db.insert(Atom::new("S", vec![1, 2]).unwrap(), Relation::empty(VarSet::from_vars([1, 2])))
            .unwrap();
        assert!(full_natural_join(&db).is_empty());
    }

    #[test]
    fn cartesian_product() {
        let mut db = Database::new();
        db.insert(
            Atom::new("R", vec![0]).unwrap(),
            Relation::from_rows(VarSet::singleton(0), [vals(&[1]), vals(&[2])]),
        )
        .unwrap();
        db.insert(
            Atom::new("S", vec![3]).unwrap(),
            Relation::from_rows(VarSet::singleton(3), [vals(&[5]), vals(&[6]), vals(&[7])]),
        )
        .unwrap();
        assert_eq!(full_natural_join(&db).len(), 6);
    }
}
