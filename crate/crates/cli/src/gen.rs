//! Seeded instance generators for tests, benchmarks and `flowjoin gen`.

use std::collections::BTreeSet;

use flowjoin_core::database::{Atom, Database};
use flowjoin_core::ddr::{Cq, Ddr};
use flowjoin_core::degree::{DegreeConstraints, MonTerm};
use flowjoin_core::relation::Relation;
use flowjoin_core::value::{Interner, Value};
use flowjoin_core::vars::{VarNames, VarSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rule with a database whose values are decimal strings.
#[derive(Clone, Debug)]
pub struct Instance {
    pub ddr: Ddr,
    pub db: Database,
    pub values: Interner,
}

/// Numbers interned as their decimal text, so that `Value(i)` reads `i`.
pub fn numeric_interner(upto: u32) -> Interner {
    let mut it = Interner::new();
    for i in 0..upto {
        it.intern(&i.to_string());
    }
    it
}

fn instance(ddr: Ddr, rows: Vec<BTreeSet<Vec<u32>>>) -> Instance {
    let max = rows.iter().flatten().flatten().copied().max().unwrap_or(0);
    let values = numeric_interner(max + 1);
    let mut db = Database::new();
    for (a, rs) in ddr.body.iter().zip(rows) {
        let rel = Relation::from_columns(&a.cols, rs.into_iter().map(|r| r.into_iter().map(Value).collect::<Vec<_>>()));
        db.insert(a.clone(), rel).expect("generated relation matches its atom");
    }
    Instance { ddr, db, values }
}

/// `n` distinct uniform rows per atom over `0..dom` (fewer when the space
/// is smaller).
pub fn uniform(ddr: &Ddr, n: usize, dom: u32, rng: &mut GenRng) -> Instance {
    let rows = ddr
        .body
        .iter()
        .map(|a| {
            let k = a.cols.len();
            let cap = (dom as usize).saturating_pow(k as u32).min(n);
            let mut seen = BTreeSet::new();
            while seen.len() < cap {
                seen.insert((0..k).map(|_| rng.gen_range(0..dom)).collect::<Vec<u32>>());
            }
            seen
        })
        .collect();
    instance(ddr.clone(), rows)
}

/// About `n` rows per atom with skewed degrees: half the rows share the
/// value `0` in the first column, the rest fill a dense core of side
/// `⌈n^(1/arity)⌉`.
pub fn skewed(ddr: &Ddr, n: usize, rng: &mut GenRng) -> Instance {
    let rows = ddr
        .body
        .iter()
        .map(|a| {
            let k = a.cols.len();
            let mut seen = BTreeSet::new();
            if k > 1 {
                while seen.len() < n / 2 {
                    let mut r: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=n as u32)).collect();
                    r[0] = 0;
                    seen.insert(r);
                }
            }
            let side = ((n as f64).powf(1.0 / k as f64).ceil() as u32).max(2);
            let mut guard = 0;
            while seen.len() < n && guard < 100 * n {
                guard += 1;
                seen.insert((0..k).map(|_| rng.gen_range(0..side)).collect::<Vec<u32>>());
            }
            seen
        })
        .collect();
    instance(ddr.clone(), rows)
}

/// A random rule over at most `max_vars` variables with at most
/// `max_atoms` body atoms of arity one to three and at most `max_heads`
/// heads.
pub fn random_ddr(rng: &mut GenRng, max_vars: usize, max_atoms: usize, max_heads: usize) -> Ddr {
    loop {
        let nv = rng.gen_range(2..=max_vars);
        let pool: Vec<usize> = (0..nv).collect();
        let na = rng.gen_range(1..=max_atoms);
        let mut body_vars: Vec<Vec<usize>> = (0..na)
            .map(|_| {
                let k = rng.gen_range(1..=3.min(nv));
                pool.choose_multiple(rng, k).copied().collect()
            })
            .collect();
        // Renumber by first appearance so every id is used.
        let mut order = Vec::new();
        for cols in &body_vars {
            for &v in cols {
                if !order.contains(&v) {
                    order.push(v);
                }
            }
        }
        for cols in &mut body_vars {
            for v in cols.iter_mut() {
                *v = order.iter().position(|x| x == v).unwrap();
            }
        }
        let used = order.len();
        let mut names = VarNames::new();
        for i in 0..used {
            names.intern(&var_name(i)).unwrap();
        }
        let body: Vec<Atom> = body_vars
            .into_iter()
            .enumerate()
            .map(|(i, cols)| Atom::new(format!("R{i}"), cols).unwrap())
            .collect();
        let mut head_sets = BTreeSet::new();
        for _ in 0..rng.gen_range(1..=max_heads) {
            let k = rng.gen_range(1..=used);
            let mut cols: Vec<usize> = (0..used).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
            cols.sort_unstable();
            head_sets.insert(cols);
        }
        let heads: Vec<Atom> = head_sets
            .into_iter()
            .enumerate()
            .map(|(i, cols)| Atom::new(format!("H{i}"), cols).unwrap())
            .collect();
        if let Ok(d) = Ddr::new(names, heads, body) {
            return d;
        }
    }
}

fn var_name(i: usize) -> String {
    ((b'A' + i as u8) as char).to_string()
}

/// A random rule with relations of `1..=max_rows` rows over a domain of
/// two to six values.
pub fn random_instance(rng: &mut GenRng, max_rows: usize) -> Instance {
    let ddr = random_ddr(rng, 6, 4, 3);
    let n = rng.gen_range(1..=max_rows);
    let dom = rng.gen_range(2..=6);
    uniform(&ddr, n, dom, rng)
}

fn random_subset(rng: &mut GenRng, universe: VarSet) -> VarSet {
    VarSet::from_vars(universe.iter().filter(|_| rng.gen_bool(0.5)))
}

fn random_nonempty(rng: &mut GenRng, universe: VarSet) -> VarSet {
    loop {
        let s = random_subset(rng, universe);
        if !s.is_empty() {
            return s;
        }
    }
}

/// Targets and constraints over two to four variables with one to four
/// constraints; about a third of the constraints are conditional.
pub fn random_bound_instance(rng: &mut GenRng) -> (Vec<VarSet>, DegreeConstraints) {
    let nv = rng.gen_range(2..=4);
    let u = VarSet::full(nv);
    let mut dc = DegreeConstraints::new();
    for _ in 0..rng.gen_range(1..=4) {
        let y = random_nonempty(rng, u);
        let x = if rng.gen_bool(0.35) { random_subset(rng, u.difference(y)) } else { VarSet::EMPTY };
        dc.insert(MonTerm::new(y, x), rng.gen_range(2..=64)).expect("generated terms are well formed");
    }
    let mut targets: Vec<VarSet> = (0..rng.gen_range(1..=3)).map(|_| random_nonempty(rng, u)).collect();
    targets.sort();
    targets.dedup();
    (targets, dc)
}

/// A query over three to five variables with two to four atoms of arity
/// two or three and a random set of free variables.
pub fn random_cq(rng: &mut GenRng) -> Cq {
    let nv = rng.gen_range(3..=5);
    let mut names = VarNames::new();
    let vars: Vec<usize> = (0..nv).map(|i| names.intern(&var_name(i)).unwrap()).collect();
    let mut body = Vec::new();
    for i in 0..rng.gen_range(2..=4) {
        let k = rng.gen_range(2..=3);
        let cols: Vec<usize> = vars.choose_multiple(rng, k).copied().collect();
        body.push(Atom::new(format!("R{i}"), cols).unwrap());
    }
    let used = body.iter().fold(VarSet::EMPTY, |s, a: &Atom| s.union(a.vars()));
    for &v in &vars {
        if !used.contains(v) {
            let other = if v == vars[0] { vars[1] } else { vars[0] };
            body.push(Atom::new(format!("R{}", body.len()), vec![other, v]).unwrap());
        }
    }
    let free: Vec<usize> = vars.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    Cq::new(names, Atom::new("Q", free).unwrap(), body).expect("generated query is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = random_instance(&mut rng(3), 50);
        let b = random_instance(&mut rng(3), 50);
        assert_eq!(a.ddr, b.ddr);
        assert_eq!(a.db, b.db);
    }

    #[test]
    fn random_rules_stay_small() {
        let mut r = rng(9);
        for _ in 0..200 {
            let d = random_ddr(&mut r, 6, 4, 3);
            assert!(d.universe().len() <= 6 && d.body.len() <= 4 && d.heads.len() <= 3);
        }
    }
}
