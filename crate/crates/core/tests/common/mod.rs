#![allow(dead_code)]

use flowjoin_core::database::{Atom, Database};
use flowjoin_core::ddr::Ddr;
use flowjoin_core::relation::Relation;
use flowjoin_core::value::Value;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `n` distinct random rows per body atom over `0..dom`.
pub fn uniform_db(ddr: &Ddr, n: usize, dom: u32, rng: &mut ChaCha8Rng) -> Database {
    build(ddr, |arity, _| {
        let mut rows = Vec::new();
        let cap = (dom as usize).pow(arity as u32).min(n);
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < cap {
            let r: Vec<u32> = (0..arity).map(|_| rng.gen_range(0..dom)).collect();
            if seen.insert(r.clone()) {
                rows.push(r);
            }
        }
        rows
    })
}

/// About `n` rows per atom: half share one heavy value in the first column,
/// half sit on a dense core of side `~n^(1/arity)`.
pub fn skewed_db(ddr: &Ddr, n: usize, rng: &mut ChaCha8Rng) -> Database {
    build(ddr, |arity, _| {
        let mut seen = std::collections::BTreeSet::new();
        let side = ((n as f64).powf(1.0 / arity as f64).ceil() as u32).max(2);
        while seen.len() < n / 2 {
            let mut r: Vec<u32> = (0..arity).map(|_| rng.gen_range(1..n as u32 + 1)).collect();
            r[0] = 0;
            seen.insert(r);
        }
        let mut guard = 0;
        while seen.len() < n && guard < 100 * n {
            guard += 1;
            let r: Vec<u32> = (0..arity).map(|_| rng.gen_range(0..side)).collect();
            seen.insert(r);
        }
        seen.into_iter().collect()
    })
}

pub fn build(ddr: &Ddr, mut rows: impl FnMut(usize, usize) -> Vec<Vec<u32>>) -> Database {
    let mut db = Database::new();
    for (i, a) in ddr.body.iter().enumerate() {
        let rs = rows(a.cols.len(), i);
        let rel = Relation::from_columns(&a.cols, rs.into_iter().map(|r| r.into_iter().map(Value).collect::<Vec<_>>()));
        db.insert(Atom::new(a.name.clone(), a.cols.clone()).unwrap(), rel).unwrap();
    }
    db
}

use flowjoin_core::degree::{DegreeConstraints, MonTerm};
use flowjoin_core::vars::VarSet;

fn random_subset(rng: &mut ChaCha8Rng, universe: VarSet) -> VarSet {
    VarSet::from_vars(universe.iter().filter(|_| rng.gen_bool(0.5)))
}

fn random_nonempty(rng: &mut ChaCha8Rng, universe: VarSet) -> VarSet {
    loop {
        let s = random_subset(rng, universe);
        if !s.is_empty() {
            return s;
        }
    }
}

/// Targets and constraints over at most four variables, with at most four
/// constraints; conditional terms appear about a third of the time.
pub fn random_bound_instance(rng: &mut ChaCha8Rng) -> (Vec<VarSet>, DegreeConstraints) {
    let nv = rng.gen_range(2..=4);
    let u = VarSet::full(nv);
    let mut dc = DegreeConstraints::new();
    for _ in 0..rng.gen_range(1..=4) {
        let y = random_nonempty(rng, u);
        let x = if rng.gen_bool(0.35) { random_subset(rng, u.difference(y)) } else { VarSet::EMPTY };
        dc.insert(MonTerm::new(y, x), rng.gen_range(2..=64)).unwrap();
    }
    let mut targets: Vec<VarSet> = (0..rng.gen_range(1..=3)).map(|_| random_nonempty(rng, u)).collect();
    targets.sort();
    targets.dedup();
    (targets, dc)
}
