//! Shannon-flow inequalities in integral multiset form.
//!
//! An integral inequality `Σ_Z h(Z) ≤ Σ_D h(δ)` is witnessed by monotonicity
//! terms `M` and submodularity terms `S` when
//! `Σ_D h(δ) − Σ_M h(μ) − Σ_S h(σ) − Σ_Z h(Z)` vanishes identically as a
//! linear form over the symbols `h(X)`, `X ≠ ∅`.

mod multiset;
mod polymatroid;
mod proof;
mod reset;

use alloc::collections::BTreeMap;
use alloc::string::String;

pub use multiset::Multiset;
pub use polymatroid::{is_polymatroid, HVector};
pub use proof::{
    apply_step_symbolic, build_proof_sequence, replay, targets_covered, verify_proof_sequence,
    ProofSequence, ProofStep, Snapshot,
};
pub use reset::{potential_reset, reset};

use crate::degree::MonTerm;
use crate::vars::{VarNames, VarSet};

/// A submodularity term `(Y;Z|X)`, read `h(XY) + h(XZ) − h(XYZ) − h(X)`.
/// Stored with `y ≤ z` since the expression is symmetric in `Y` and `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubTerm {
    pub y: VarSet,
    pub z: VarSet,
    pub x: VarSet,
}

impl SubTerm {
    pub fn new(y: VarSet, z: VarSet, x: VarSet) -> Self {
        debug_assert!(
            y.is_disjoint(z) && y.is_disjoint(x) && z.is_disjoint(x),
            "submodularity term with overlapping parts"
        );
        if z < y {
            SubTerm { y: z, z: y, x }
        } else {
            SubTerm { y, z, x }
        }
    }

    /// Splits the term as `(Y, Z)` with `X ∪ Y = w`, trying both orientations.
    pub fn oriented(&self, w: VarSet) -> Option<(VarSet, VarSet)> {
        if self.x.union(self.y) == w {
            Some((self.y, self.z))
        } else if self.x.union(self.z) == w {
            Some((self.z, self.y))
        } else {
            None
        }
    }

    pub fn render(&self, names: &VarNames) -> String {
        alloc::format!(
            "{};{}|{}",
            render_set(names, self.y),
            render_set(names, self.z),
            render_set(names, self.x)
        )
    }
}

/// The parameters `(Z, D)` of an integral Shannon-flow inequality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntegralInequality {
    pub z: Multiset<VarSet>,
    pub d: Multiset<MonTerm>,
}

/// The witness `(M, S)` of an integral Shannon-flow inequality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub m: Multiset<MonTerm>,
    pub s: Multiset<SubTerm>,
}

impl Witness {
    pub fn sizes(&self) -> (u64, u64) {
        (self.m.len(), self.s.len())
    }
}

/// Sparse linear form over the symbols `h(X)`, `X ≠ ∅`.
pub type Coeffs = BTreeMap<VarSet, i128>;

fn add(c: &mut Coeffs, s: VarSet, k: i128) {
    if s.is_empty() || k == 0 {
        return;
    }
    let e = c.entry(s).or_insert(0);
    *e += k;
    if *e == 0 {
        c.remove(&s);
    }
}

pub fn add_mon(c: &mut Coeffs, t: &MonTerm, k: i128) {
    add(c, t.all(), k);
    add(c, t.x, -k);
}

pub fn add_sub(c: &mut Coeffs, t: &SubTerm, k: i128) {
    add(c, t.x.union(t.y), k);
    add(c, t.x.union(t.z), k);
    add(c, t.x.union(t.y).union(t.z), -k);
    add(c, t.x, -k);
}

/// `Σ_D h(δ) − Σ_M h(μ) − Σ_S h(σ) − Σ_Z h(Z)` as a sparse linear form.
pub fn residual(ineq: &IntegralInequality, w: &Witness) -> Coeffs {
    let mut c = Coeffs::new();
    for (t, k) in ineq.d.iter() {
        add_mon(&mut c, t, k as i128);
    }
    for (t, k) in w.m.iter() {
        add_mon(&mut c, t, -(k as i128));
    }
    for (t, k) in w.s.iter() {
        add_sub(&mut c, t, -(k as i128));
    }
    for (s, k) in ineq.z.iter() {
        add(&mut c, *s, -(k as i128));
    }
    c
}

/// Whether the witness makes the inequality an identity.
pub fn check_identity(ineq: &IntegralInequality, w: &Witness) -> bool {
    residual(ineq, w).is_empty()
}

/// `h(X)` rendered with the empty set as `0`.
pub fn render_set(names: &VarNames, s: VarSet) -> String {
    if s.is_empty() {
        String::from("0")
    } else {
        names.render(s)
    }
}

/// `h(Y|X)`, or `h(Y)` when unconditional.
pub fn render_term(names: &VarNames, t: &MonTerm) -> String {
    if t.x.is_empty() {
        alloc::format!("h({})", render_set(names, t.y))
    } else {
        alloc::format!("h({}|{})", render_set(names, t.y), render_set(names, t.x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(bits: &[usize]) -> VarSet {
        VarSet::from_vars(bits.iter().copied())
    }

    #[test]
    fn identity_inequality() {
        let a = vs(&[0]);
        let ineq = IntegralInequality {
            z: [a].into_iter().collect(),
            d: [MonTerm::unconditional(a)].into_iter().collect(),
        };
        assert!(check_identity(&ineq, &Witness::default()));
    }

    #[test]
    fn q1_identity_and_perturbation() {
        let (a, b, c, d) = (vs(&[0]), vs(&[1]), vs(&[2]), vs(&[3]));
        let ineq = IntegralInequality {
            z: [a.union(b).union(c), b.union(c).union(d)].into_iter().collect(),
            d: [a.union(b), b.union(c), c.union(d)]
                .into_iter()
                .map(MonTerm::unconditional)
                .collect(),
        };
        let w = Witness {
            m: Multiset::new(),
            s: [SubTerm::new(a, c, b), SubTerm::new(b, c.union(d), VarSet::EMPTY)]
                .into_iter()
                .collect(),
        };
        assert!(check_identity(&ineq, &w));
        let mut broken = w.clone();
        broken.s.remove(&SubTerm::new(a, c, b));
        assert!(!check_identity(&ineq, &broken));
    }

    #[test]
    fn subterm_orientation() {
        let t = SubTerm::new(vs(&[3]), vs(&[1]), vs(&[0]));
        assert_eq!(t.y, vs(&[1]));
        assert_eq!(t.oriented(vs(&[0, 3])), Some((vs(&[3]), vs(&[1]))));
        assert_eq!(t.oriented(vs(&[0, 1])), Some((vs(&[1]), vs(&[3]))));
        assert_eq!(t.oriented(vs(&[0])), None);
    }
}
