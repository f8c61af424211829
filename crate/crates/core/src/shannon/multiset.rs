//! Finite multisets with ordered iteration.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, u64>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { counts: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, t: T, k: u64) {
        if k > 0 {
            *self.counts.entry(t).or_insert(0) += k;
        }
    }

    pub fn insert(&mut self, t: T) {
        self.add(t, 1);
    }

    /// Removes one copy; false when absent.
    pub fn remove(&mut self, t: &T) -> bool {
        match self.counts.get_mut(t) {
            Some(c) => {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(t);
                }
                true
            }
            None => false,
        }
    }

    pub fn count(&self, t: &T) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn contains(&self, t: &T) -> bool {
        self.counts.contains_key(t)
    }

    /// Total number of copies.
    pub fn len(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct elements with multiplicities, in order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> + '_ {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    /// Every copy, in order.
    pub fn elements(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts
            .iter()
            .flat_map(|(t, &c)| core::iter::repeat(t).take(c as usize))
    }

    pub fn distinct(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts.keys()
    }

    /// Multiset inclusion.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.counts.iter().all(|(t, &c)| other.count(t) >= c)
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.elements().cloned().collect()
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for t in iter {
            m.insert(t);
        }
        m
    }
}

impl<T: Ord + core::fmt::Debug> core::fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_map().entries(self.counts.iter()).finish()
    }
}
