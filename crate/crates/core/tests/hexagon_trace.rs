mod common;

use std::collections::BTreeMap;

use flowjoin_core::bound::Budget;
use flowjoin_core::degree::MonTerm;
use flowjoin_core::exec::{trace, Slot};
use flowjoin_core::fixtures;
use flowjoin_core::measure::Measure;
use flowjoin_core::num::Rat;
use flowjoin_core::shannon::{check_identity, replay, verify_proof_sequence, ProofSequence};
use flowjoin_core::value::Value;
use flowjoin_core::vars::VarSet;
use std::rc::Rc;

#[test]
fn hand_written_sequence_verifies() {
    let (_, ineq, w, steps) = fixtures::hexagon_proof();
    assert!(check_identity(&ineq, &w));
    let snapshots = replay(&steps, &ineq, &w).unwrap();
    let last = snapshots.last().unwrap();
    assert!(last.w.m.is_empty() && last.w.s.is_empty());
    let seq = ProofSequence { steps, snapshots };
    assert!(verify_proof_sequence(&seq, &ineq, &w));
}

fn degrees(rows: impl Iterator<Item = Value>) -> BTreeMap<Value, i64> {
    let mut m = BTreeMap::new();
    for v in rows {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

fn r(a: i64, b: i64) -> Rat {
    Rat::new(a.into(), b.into())
}

fn check(m: &Measure, want: &dyn Fn(&[Value]) -> Rat, expected_len: usize) {
    assert_eq!(m.len(), expected_len, "support size of {:?}", m.term());
    for (row, p) in m.iter() {
        assert_eq!(*p, want(row), "{:?} at {row:?}", m.term());
    }
}

#[test]
fn measures_follow_the_closed_forms() {
    let (ddr, ineq, _, steps) = fixtures::hexagon_proof();
    let s = |t: &str| ddr.names.parse_set(t).unwrap();
    let n = 32u64;
    let ni = n as i64;
    let mut rng = common::rng(3);
    for round in 0..10 {
        let db = if round % 2 == 0 {
            common::uniform_db(&ddr, n as usize, 6, &mut rng)
        } else {
            common::skewed_db(&ddr, n as usize, &mut rng)
        };
        let dom = db.active_domain();
        let mut slots = Vec::new();
        for (t, _) in ineq.d.iter() {
            let rel = db.relations().iter().find(|r| r.vars() == t.y).unwrap();
            slots.push(Slot { term: *t, measure: Rc::new(Measure::from_constraint(rel, dom, t, n).unwrap()) });
        }
        let states = trace(slots, &steps, &Budget::infinite()).unwrap();
        let find = |i: usize, t: MonTerm| -> Vec<Measure> {
            states[i].iter().filter(|x| x.term == t).map(|x| (*x.measure).clone()).collect()
        };
        let rel_s = db.relation("S").unwrap();
        let rel_k = db.relation("K").unwrap();
        let rel_r = db.relation("R").unwrap();
        let rel_t = db.relation("T").unwrap();
        let c = ddr.names.lookup("C").unwrap();
        let f = ddr.names.lookup("F").unwrap();
        let deg_s = degrees(rel_s.iter().map(|row| rel_s.value_of(row, c)));
        let deg_k = degrees(rel_k.iter().map(|row| rel_k.value_of(row, f)));
        let at = |set: VarSet, row: &[Value], v| row[set.rank(v).unwrap()];

        let pc = &find(1, MonTerm::unconditional(s("C")))[0];
        check(pc, &|row| r(deg_s[&row[0]], ni), deg_s.len());
        let pde = &find(2, MonTerm::new(s("DE"), s("ABC")))[0];
        for (row, p) in pde.iter() {
            // Conditional rows are laid out as C then D E.
            assert_eq!(*p, r(1, deg_s[&row[0]]));
        }
        let rs = rel_r.join(rel_s);
        let p5 = &find(3, MonTerm::unconditional(s("ABCDE")))[0];
        check(p5, &|row| r(1, ni * deg_s[&at(s("ABCDE"), row, c)]), rs.len());

        let pf = &find(4, MonTerm::unconditional(s("F")))[0];
        check(pf, &|row| r(deg_k[&row[0]], ni), deg_k.len());
        let tk = rel_t.join(rel_k);
        let p6 = &find(6, MonTerm::unconditional(s("ABDEF")))[0];
        check(p6, &|row| r(1, ni * deg_k[&at(s("ABDEF"), row, f)]), tk.len());

        let full = s("ABCDEF");
        let p1 = &find(8, MonTerm::unconditional(full))[0];
        check(p1, &|row| r(deg_k[&at(full, row, f)], ni * ni * deg_s[&at(full, row, c)]), rs.len() * deg_k.len());
        let both = find(10, MonTerm::unconditional(full));
        assert_eq!(both.len(), 2);
        check(&both[0], &|row| r(deg_k[&at(full, row, f)], ni * ni * deg_s[&at(full, row, c)]), rs.len() * deg_k.len());
        check(&both[1], &|row| r(deg_s[&at(full, row, c)], ni * ni * deg_k[&at(full, row, f)]), tk.len() * deg_s.len());
    }
}
