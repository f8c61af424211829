//! Dropping an unconditional term from the right-hand side at the cost of at
//! most one target.

use alloc::string::String;

use super::{IntegralInequality, Witness};
use crate::degree::MonTerm;
use crate::vars::VarSet;
use crate::{Error, Result};

/// `|D| + |M| + 2|S|`, which [`reset`] strictly decreases.
pub fn potential_reset(ineq: &IntegralInequality, w: &Witness) -> u64 {
    ineq.d.len() + w.m.len() + 2 * w.s.len()
}

/// Removes one copy of the unconditional term `drop` from `D` and returns a
/// new witnessed inequality `(Z', D', M', S')` with `Z' ⊆ Z`,
/// `|Z'| ≥ |Z| − 1` and `D' ⊆ D − {drop}`.
///
/// Each round removes the pending term `W`: if it is a target, both copies
/// go and the loop ends; otherwise it is cancelled by a composition
/// `(Y|W) ∈ D` (pending `YW`), a monotonicity `(Y|X) ∈ M` with `XY = W`
/// (pending `X`), or a submodularity `(Y;Z|X) ∈ S` with `XY = W` (which
/// adds `(Z|X)` to `M`, pending `XYZ`).
pub fn reset(ineq: &IntegralInequality, w: &Witness, drop: VarSet) -> Result<(IntegralInequality, Witness)> {
    if ineq.z.len() <= 1 {
        return Err(Error::Precondition(String::from("reset needs at least two targets")));
    }
    let mut z = ineq.z.clone();
    let mut d = ineq.d.clone();
    let mut m = w.m.clone();
    let mut s = w.s.clone();
    if !d.remove(&MonTerm::unconditional(drop)) {
        return Err(Error::Precondition(alloc::format!(
            "reset term {drop:?} is not an unconditional member of D"
        )));
    }
    let mut pending = drop;
    let limit = potential_reset(ineq, w) + 1;
    for _ in 0..limit {
        if z.remove(&pending) {
            return Ok((IntegralInequality { z, d }, Witness { m, s }));
        }
        let hit = d.distinct().find(|t| t.x == pending).copied();
        if let Some(t) = hit {
            d.remove(&t);
            pending = t.all();
            continue;
        }
        let hit = m.distinct().find(|t| t.all() == pending).copied();
        if let Some(t) = hit {
            m.remove(&t);
            if t.x.is_empty() {
                return Ok((IntegralInequality { z, d }, Witness { m, s }));
            }
            pending = t.x;
            continue;
        }
        let hit = s.distinct().find_map(|t| t.oriented(pending).map(|(y, zz)| (*t, y, zz)));
        if let Some((t, y, zz)) = hit {
            s.remove(&t);
            m.insert(MonTerm::new(zz, t.x));
            pending = t.x.union(y).union(zz);
            continue;
        }
        return Err(Error::IdentityViolated(alloc::format!("nothing cancels h({pending:?})")));
    }
    Err(Error::IdentityViolated(String::from("reset does not terminate")))
}
