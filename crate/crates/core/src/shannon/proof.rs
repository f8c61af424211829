//! Proof sequences: rewriting `Σ_D h(δ)` into a sum that contains `Σ_Z h(Z)`
//! with submodularity, composition, decomposition and monotonicity steps.

use alloc::string::String;
use alloc::vec::Vec;

use super::{check_identity, render_set, render_term, IntegralInequality, Multiset, SubTerm, Witness};
use crate::degree::MonTerm;
use crate::vars::{VarNames, VarSet};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofStep {
    /// `h(Y|X) → h(Y|XZ)`.
    Submodularity { y: VarSet, x: VarSet, z: VarSet },
    /// `h(X) + h(Y|X) → h(XY)`.
    Composition { x: VarSet, y: VarSet },
    /// `h(XY) → h(X) + h(Y|X)`.
    Decomposition { x: VarSet, y: VarSet },
    /// `h(XY) → h(X)`; with `X = ∅` the term simply disappears.
    Monotonicity { x: VarSet, y: VarSet },
}

impl ProofStep {
    /// Terms removed from `D`.
    pub fn consumed(&self) -> Vec<MonTerm> {
        match *self {
            ProofStep::Submodularity { y, x, .. } => alloc::vec![MonTerm::new(y, x)],
            ProofStep::Composition { x, y } => {
                alloc::vec![MonTerm::unconditional(x), MonTerm::new(y, x)]
            }
            ProofStep::Decomposition { x, y } | ProofStep::Monotonicity { x, y } => {
                alloc::vec![MonTerm::unconditional(x.union(y))]
            }
        }
    }

    /// Terms added to `D` (never `h(∅)`).
    pub fn produced(&self) -> Vec<MonTerm> {
        match *self {
            ProofStep::Submodularity { y, x, z } => alloc::vec![MonTerm::new(y, x.union(z))],
            ProofStep::Composition { x, y } => alloc::vec![MonTerm::unconditional(x.union(y))],
            ProofStep::Decomposition { x, y } => {
                let mut v = Vec::new();
                if !x.is_empty() {
                    v.push(MonTerm::unconditional(x));
                }
                v.push(MonTerm::new(y, x));
                v
            }
            ProofStep::Monotonicity { x, .. } => {
                if x.is_empty() {
                    Vec::new()
                } else {
                    alloc::vec![MonTerm::unconditional(x)]
                }
            }
        }
    }

    /// One line, e.g. `COMP h(B) + h(CD|B) -> h(BCD)`.
    pub fn render(&self, names: &VarNames) -> String {
        let t = |y: VarSet, x: VarSet| render_term(names, &MonTerm { y, x });
        match *self {
            ProofStep::Submodularity { y, x, z } => {
                alloc::format!("SUBMOD {} -> {}", t(y, x), t(y, x.union(z)))
            }
            ProofStep::Composition { x, y } => alloc::format!(
                "COMP {} + {} -> {}",
                t(x, VarSet::EMPTY),
                t(y, x),
                t(x.union(y), VarSet::EMPTY)
            ),
            ProofStep::Decomposition { x, y } => alloc::format!(
                "DECOMP {} -> {} + {}",
                t(x.union(y), VarSet::EMPTY),
                t(x, VarSet::EMPTY),
                t(y, x)
            ),
            ProofStep::Monotonicity { x, y } => {
                let to = if x.is_empty() {
                    render_set(names, x)
                } else {
                    t(x, VarSet::EMPTY)
                };
                alloc::format!("MONO {} -> {}", t(x.union(y), VarSet::EMPTY), to)
            }
        }
    }
}

/// `(D_i, M_i, S_i)` after `i` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub d: Multiset<MonTerm>,
    pub w: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofSequence {
    pub steps: Vec<ProofStep>,
    /// `snapshots[i]` is the state before `steps[i]`; one extra at the end.
    pub snapshots: Vec<Snapshot>,
}

impl ProofSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn render(&self, names: &VarNames) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.render(names));
            out.push('\n');
        }
        out
    }
}

/// Applies a step to `D`; fails when a consumed term is absent.
pub fn apply_step_symbolic(d: &Multiset<MonTerm>, step: &ProofStep) -> Result<Multiset<MonTerm>> {
    let mut out = d.clone();
    for t in step.consumed() {
        if !out.remove(&t) {
            return Err(Error::Precondition(alloc::format!(
                "proof step {step:?} consumes {t:?}, which is absent"
            )));
        }
    }
    for t in step.produced() {
        out.insert(t);
    }
    Ok(out)
}

/// The witness change implied by a step: monotonicity consumes `(Y|X)` from
/// `M`, submodularity consumes `(Y;Z|X)` from `S`.
fn apply_step_witness(w: &Witness, step: &ProofStep) -> Result<Witness> {
    let mut out = w.clone();
    let ok = match *step {
        ProofStep::Submodularity { y, x, z } => out.s.remove(&SubTerm::new(y, z, x)),
        ProofStep::Monotonicity { x, y } => out.m.remove(&MonTerm::new(y, x)),
        _ => true,
    };
    if !ok {
        return Err(Error::Precondition(alloc::format!(
            "proof step {step:?} has no matching witness term"
        )));
    }
    Ok(out)
}

/// Replays `steps` from `(D, M, S)` and returns every intermediate state.
pub fn replay(steps: &[ProofStep], ineq: &IntegralInequality, w: &Witness) -> Result<Vec<Snapshot>> {
    let mut snaps = Vec::with_capacity(steps.len() + 1);
    snaps.push(Snapshot { d: ineq.d.clone(), w: w.clone() });
    for step in steps {
        let last = snaps.last().unwrap();
        let d = apply_step_symbolic(&last.d, step)?;
        let w = apply_step_witness(&last.w, step)?;
        snaps.push(Snapshot { d, w });
    }
    Ok(snaps)
}

/// Builds a proof sequence for a witnessed integral inequality.
///
/// Repeatedly takes the lexicographically smallest unconditional `W` that
/// `D_i` holds more often than `Z`, and cancels it with a composition
/// `(Y|W) ∈ D_i`, else a monotonicity `(Y|X) ∈ M_i` with `XY = W`, else a
/// submodularity `(Y;Z|X) ∈ S_i` with `XY = W` (a decomposition followed by
/// a submodularity step; just the latter when `X = ∅`).
pub fn build_proof_sequence(ineq: &IntegralInequality, w: &Witness) -> Result<ProofSequence> {
    if !check_identity(ineq, w) {
        return Err(Error::IdentityViolated(String::from("input witness does not certify the inequality")));
    }
    let mut d = ineq.d.clone();
    let mut wit = w.clone();
    let mut steps = Vec::new();
    let mut snapshots = alloc::vec![Snapshot { d: d.clone(), w: wit.clone() }];
    let budget = d.len() + wit.m.len() + 3 * wit.s.len();
    while !targets_covered(&ineq.z, &d) {
        if steps.len() as u64 > budget {
            return Err(Error::IdentityViolated(String::from("proof sequence does not terminate")));
        }
        let w_set = d
            .iter()
            .map(|(t, k)| (*t, k))
            .find(|(t, k)| t.is_unconditional() && *k > ineq.z.count(&t.y))
            .map(|(t, _)| t.y)
            .ok_or_else(|| {
                Error::IdentityViolated(String::from("no unconditional term outside the targets"))
            })?;
        let new_steps = cancel(w_set, &d, &wit).ok_or_else(|| {
            Error::IdentityViolated(alloc::format!("nothing cancels h({w_set:?})"))
        })?;
        for step in new_steps {
            d = apply_step_symbolic(&d, &step)?;
            wit = apply_step_witness(&wit, &step)?;
            steps.push(step);
            snapshots.push(Snapshot { d: d.clone(), w: wit.clone() });
        }
    }
    Ok(ProofSequence { steps, snapshots })
}

/// `Z ⊆ D` with each target read as an unconditional term.
pub fn targets_covered(z: &Multiset<VarSet>, d: &Multiset<MonTerm>) -> bool {
    z.iter().all(|(t, k)| d.count(&MonTerm::unconditional(*t)) >= k)
}

fn cancel(w_set: VarSet, d: &Multiset<MonTerm>, wit: &Witness) -> Option<Vec<ProofStep>> {
    if let Some(t) = d.distinct().find(|t| t.x == w_set) {
        return Some(alloc::vec![ProofStep::Composition { x: w_set, y: t.y }]);
    }
    if let Some(t) = wit.m.distinct().find(|t| t.all() == w_set) {
        return Some(alloc::vec![ProofStep::Monotonicity { x: t.x, y: t.y }]);
    }
    for s in wit.s.distinct() {
        if let Some((y, z)) = s.oriented(w_set) {
            let x = s.x;
            let sub = ProofStep::Submodularity { y, x, z };
            if x.is_empty() {
                return Some(alloc::vec![sub]);
            }
            return Some(alloc::vec![ProofStep::Decomposition { x, y }, sub]);
        }
    }
    None
}

/// Replays the sequence and checks every prefix identity, the length bound
/// `|D| + |M| + 3|S|`, agreement with the recorded snapshots, and `D_k ⊇ Z`.
pub fn verify_proof_sequence(seq: &ProofSequence, ineq: &IntegralInequality, w: &Witness) -> bool {
    let Ok(snaps) = replay(&seq.steps, ineq, w) else { return false };
    if !seq.snapshots.is_empty() && seq.snapshots != snaps {
        return false;
    }
    let bound = ineq.d.len() + w.m.len() + 3 * w.s.len();
    if seq.steps.len() as u64 > bound {
        return false;
    }
    let all_valid = snaps.iter().all(|s| {
        check_identity(&IntegralInequality { z: ineq.z.clone(), d: s.d.clone() }, &s.w)
    });
    all_valid && targets_covered(&ineq.z, &snaps.last().unwrap().d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(bits: &[usize]) -> VarSet {
        VarSet::from_vars(bits.iter().copied())
    }

    fn names() -> VarNames {
        let mut n = VarNames::new();
        for c in ["A", "B", "C", "D"] {
            n.intern(c).unwrap();
        }
        n
    }

    #[test]
    fn trivial_sequence_is_empty() {
        let ab = vs(&[0, 1]);
        let ineq = IntegralInequality {
            z: [ab].into_iter().collect(),
            d: [MonTerm::unconditional(ab)].into_iter().collect(),
        };
        let seq = build_proof_sequence(&ineq, &Witness::default()).unwrap();
        assert!(seq.is_empty());
        assert!(verify_proof_sequence(&seq, &ineq, &Witness::default()));
    }

    #[test]
    fn q1_sequence() {
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
        let seq = build_proof_sequence(&ineq, &w).unwrap();
        assert!((4..=6).contains(&seq.len()), "{}", seq.render(&names()));
        assert!(verify_proof_sequence(&seq, &ineq, &w));
        assert_eq!(
            seq.render(&names()),
            "DECOMP h(AB) -> h(B) + h(A|B)\n\
             SUBMOD h(A|B) -> h(A|BC)\n\
             SUBMOD h(B) -> h(B|CD)\n\
             COMP h(BC) + h(A|BC) -> h(ABC)\n\
             COMP h(CD) + h(B|CD) -> h(BCD)\n"
        );
    }

    #[test]
    fn corrupted_step_rejected() {
        let a = vs(&[0]);
        let ineq = IntegralInequality {
            z: [a].into_iter().collect(),
            d: [MonTerm::unconditional(a)].into_iter().collect(),
        };
        let seq = ProofSequence {
            steps: alloc::vec![ProofStep::Composition { x: a, y: vs(&[1]) }],
            snapshots: Vec::new(),
        };
        assert!(!verify_proof_sequence(&seq, &ineq, &Witness::default()));
    }
}
