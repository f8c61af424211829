//! Variables and bitset-indexed variable sets.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// Upper bound on the size of the variable universe.
pub const MAX_VARS: usize = 20;

/// Index of a variable in the universe.
pub type Var = usize;

/// A subset of the variable universe, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending member sequence, so
/// `{A} < {A,B} < {A,C} < {B}`. The empty set sorts first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        VarSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(v: Var) -> Self {
        debug_assert!(v < MAX_VARS);
        VarSet(1 << v)
    }

    /// All variables `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VARS);
        if n == 32 {
            VarSet(u32::MAX)
        } else {
            VarSet((1u32 << n) - 1)
        }
    }

    pub fn from_vars<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        vars.into_iter().fold(VarSet::EMPTY, |s, v| s.with(v))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, v: Var) -> bool {
        v < 32 && self.0 & (1 << v) != 0
    }

    pub const fn with(self, v: Var) -> Self {
        VarSet(self.0 | (1 << v))
    }

    pub const fn without(self, v: Var) -> Self {
        VarSet(self.0 & !(1 << v))
    }

    pub const fn union(self, other: VarSet) -> Self {
        VarSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: VarSet) -> Self {
        VarSet(self.0 & other.0)
    }

    pub const fn difference(self, other: VarSet) -> Self {
        VarSet(self.0 & !other.0)
    }

    pub const fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> VarIter {
        VarIter(self.0)
    }

    /// Position of `v` among the members (its column in a canonical tuple).
    pub fn rank(self, v: Var) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some((self.0 & ((1u32 << v) - 1)).count_ones() as usize)
    }

    /// Column positions in `self` of each member of `sub`, in `sub`'s order.
    ///
    /// Panics if `sub` is not a subset of `self`.
    pub fn positions_of(self, sub: VarSet) -> Vec<usize> {
        assert!(sub.is_subset(self), "positions_of: not a subset");
        sub.iter().map(|v| self.rank(v).unwrap()).collect()
    }

    /// All subsets of `self` (including the empty set and `self`).
    pub fn subsets(self) -> SubsetIter {
        SubsetIter { mask: self.0, cur: 0, done: false }
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        VarSet::from_vars(iter)
    }
}

pub struct VarIter(u32);

impl Iterator for VarIter {
    type Item = Var;

    fn next(&mut self) -> Option<Var> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VarIter {}

pub struct SubsetIter {
    mask: u32,
    cur: u32,
    done: bool,
}

impl Iterator for SubsetIter {
    type Item = VarSet;

    fn next(&mut self) -> Option<VarSet> {
        if self.done {
            return None;
        }
        let out = VarSet(self.cur);
        if self.cur == self.mask {
            self.done = true;
        } else {
            self.cur = (self.cur.wrapping_sub(self.mask)) & self.mask;
        }
        Some(out)
    }
}

/// The variable universe: names indexed by [`Var`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
}

impl VarNames {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index of `name`, interning it on first sight.
    pub fn intern(&mut self, name: &str) -> Result<Var> {
        if let Some(v) = self.lookup(name) {
            return Ok(v);
        }
        if self.names.len() == MAX_VARS {
            return Err(Error::TooManyVariables { max: MAX_VARS });
        }
        self.names.push(String::from(name));
        Ok(self.names.len() - 1)
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.names.len())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    /// Whether every name is a single character, so sets render as `ABC`.
    pub fn compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Renders a set as `ABC`, or `A0,A1` when some name is longer than a
    /// character.
    pub fn render(&self, s: VarSet) -> String {
        let sep = if self.compact() { "" } else { "," };
        let mut out = String::new();
        for (i, v) in s.iter().enumerate() {
            if i > 0 {
                out.push_str(sep);
            }
            out.push_str(self.name(v));
        }
        out
    }

    /// Inverse of [`VarNames::render`].
    pub fn parse_set(&self, text: &str) -> Result<VarSet> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(VarSet::EMPTY);
        }
        let mut set = VarSet::EMPTY;
        if text.contains(',') {
            for part in text.split(',') {
                let part = part.trim();
                let v = self
                    .lookup(part)
                    .ok_or_else(|| Error::UnknownVariable(String::from(part)))?;
                set = set.with(v);
            }
            return Ok(set);
        }
        // Greedy longest match against the known names.
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((v, n)) => {
                    set = set.with(v);
                    rest = &rest[n.len()..];
                }
                None => return Err(Error::UnknownVariable(String::from(rest))),
            }
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lexicographic_order() {
        let a = VarSet::from_vars([0]);
        let ab = VarSet::from_vars([0, 1]);
        let ac = VarSet::from_vars([0, 2]);
        let b = VarSet::from_vars([1]);
        let mut v = vec![b, ac, VarSet::EMPTY, ab, a];
        v.sort();
        assert_eq!(v, vec![VarSet::EMPTY, a, ab, ac, b]);
    }

    #[test]
    fn subsets_enumerates_all() {
        let s = VarSet::from_vars([1, 3, 4]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert_eq!(VarSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn positions_and_rank() {
        let s = VarSet::from_vars([1, 3, 4]);
        assert_eq!(s.positions_of(VarSet::from_vars([3, 4])), vec![1, 2]);
        assert_eq!(s.rank(1), Some(0));
        assert_eq!(s.rank(2), None);
    }

    #[test]
    fn render_and_parse() {
        let mut names = VarNames::new();
        for n in ["A", "B", "C"] {
            names.intern(n).unwrap();
        }
        let s = VarSet::from_vars([0, 2]);
        assert_eq!(names.render(s), "AC");
        assert_eq!(names.parse_set("AC").unwrap(), s);

        let mut long = VarNames::new();
        for n in ["A0", "A1", "B"] {
            long.intern(n).unwrap();
        }
        let s = VarSet::from_vars([1, 2]);
        assert_eq!(long.render(s), "A1,B");
        assert_eq!(long.parse_set("A1,B").unwrap(), s);
        assert_eq!(long.parse_set("A1B").unwrap(), s);
    }

    #[test]
    fn universe_cap() {
        let mut names = VarNames::new();
        for i in 0..MAX_VARS {
            names.intern(&alloc::format!("V{i}")).unwrap();
        }
        assert!(names.intern("extra").is_err());
    }
}
