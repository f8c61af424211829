//! Set functions `h: 2^V → Q` and the elemental polymatroid test.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{IntegralInequality, SubTerm};
use crate::degree::MonTerm;
use crate::num::Rat;
use crate::vars::VarSet;

/// A set function over `n` variables, indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVector {
    n: usize,
    coords: Vec<Rat>,
}

impl HVector {
    pub fn from_fn(n: usize, f: impl Fn(VarSet) -> Rat) -> Self {
        let coords = (0..1u32 << n).map(|b| f(VarSet::from_bits(b))).collect();
        HVector { n, coords }
    }

    /// `h(S) = Σ_{v∈S} weights[v]`.
    pub fn modular(weights: &[Rat]) -> Self {
        let n = weights.len();
        Self::from_fn(n, |s| s.iter().fold(Rat::zero(), |acc, v| acc + &weights[v]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: VarSet) -> &Rat {
        &self.coords[s.bits() as usize]
    }

    pub fn set(&mut self, s: VarSet, x: Rat) {
        self.coords[s.bits() as usize] = x;
    }

    pub fn mon(&self, t: &MonTerm) -> Rat {
        self.get(t.all()) - self.get(t.x)
    }

    pub fn sub(&self, t: &SubTerm) -> Rat {
        let xy = t.x.union(t.y);
        let xz = t.x.union(t.z);
        self.get(xy) + self.get(xz) - self.get(xy.union(t.z)) - self.get(t.x)
    }

    /// `(Σ_Z h(Z), Σ_D h(δ))`.
    pub fn sides(&self, ineq: &IntegralInequality) -> (Rat, Rat) {
        let mut lhs = Rat::zero();
        for (z, k) in ineq.z.iter() {
            lhs += self.get(*z) * Rat::from_integer(k.into());
        }
        let mut rhs = Rat::zero();
        for (d, k) in ineq.d.iter() {
            rhs += self.mon(d) * Rat::from_integer(k.into());
        }
        (lhs, rhs)
    }
}

/// `h(∅) = 0` plus the elemental monotonicities `h(V) ≥ h(V − i)` and
/// submodularities `h(iK) + h(jK) ≥ h(ijK) + h(K)`.
pub fn is_polymatroid(h: &HVector) -> bool {
    if !h.get(VarSet::EMPTY).is_zero() {
        return false;
    }
    let all = VarSet::full(h.n());
    for i in 0..h.n() {
        if h.get(all).clone() - h.get(all.without(i)) < Rat::zero() {
            return false;
        }
    }
    for i in 0..h.n() {
        for j in i + 1..h.n() {
            let rest = all.without(i).without(j);
            for k in rest.subsets() {
                let t = SubTerm::new(VarSet::singleton(i), VarSet::singleton(j), k);
                if h.sub(&t).is_negative() {
                    return false;
                }
            }
        }
    }
    true
}
