mod common;

use flowjoin_core::bound::{primal_value, solve_bound, BoundCertificate, Budget};
use flowjoin_core::degree::{infer_cardinalities, MonTerm};
use flowjoin_core::exec::{initial_slots, trace};
use flowjoin_core::fixtures;
use flowjoin_core::num::Rat;
use flowjoin_core::oracle::full_natural_join;
use flowjoin_core::shannon::{
    build_proof_sequence, check_identity, is_polymatroid, potential_reset, reset, verify_proof_sequence, HVector,
};
use flowjoin_core::vars::VarSet;
use flowjoin_core::Error;
use rand::Rng;

fn certificates(count: usize, seed: u64) -> Vec<BoundCertificate> {
    let mut rng = common::rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let (targets, dc) = common::random_bound_instance(&mut rng);
        match solve_bound(&targets, &dc) {
            Ok(c) => out.push(c),
            Err(Error::Unbounded(_)) => {}
            Err(e) => panic!("{targets:?} {dc:?}: {e}"),
        }
    }
    out
}

#[test]
fn random_bounds_agree_with_the_primal() {
    let mut rng = common::rng(23);
    let mut solved = 0;
    while solved < 100 {
        let (targets, dc) = common::random_bound_instance(&mut rng);
        let cert = match solve_bound(&targets, &dc) {
            Ok(c) => c,
            Err(Error::Unbounded(_)) => {
                assert!(matches!(primal_value(&targets, &dc), Err(Error::Unbounded(_))));
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        assert!(check_identity(&cert.integral, &cert.witness));
        let lambda: Rat = cert.lambda.values().sum();
        assert_eq!(lambda, Rat::from_integer(1.into()));
        if cert.pruned.is_empty() {
            let p = primal_value(&targets, &dc).unwrap();
            assert!((p - cert.exponent_bits).abs() <= 1e-9 * p.abs().max(1.0), "{targets:?} {dc:?}: {p} vs {}", cert.exponent_bits);
        }
        solved += 1;
    }
}

/// `h(S) = Σ_j c_j [S ∩ A_j ≠ ∅]`, a polymatroid for nonnegative `c_j`.
fn coverage(rng: &mut impl Rng, n: usize) -> HVector {
    let sets: Vec<(VarSet, i64)> = (0..rng.gen_range(1..=6))
        .map(|_| (VarSet::from_bits(rng.gen_range(1..1u32 << n)), rng.gen_range(0..=9)))
        .collect();
    HVector::from_fn(n, |s| {
        let v: i64 = sets.iter().filter(|(a, _)| !a.is_disjoint(s)).map(|(_, c)| c).sum();
        Rat::from_integer(v.into())
    })
}

#[test]
fn certificates_hold_on_random_polymatroids() {
    let mut rng = common::rng(29);
    for cert in certificates(60, 31) {
        for _ in 0..10 {
            let h = coverage(&mut rng, 4);
            assert!(is_polymatroid(&h));
            let (lhs, rhs) = h.sides(&cert.integral);
            assert!(lhs <= rhs, "{cert:?}");
        }
    }
}

#[test]
fn proof_sequences_verify_on_random_certificates() {
    for cert in certificates(60, 37) {
        let seq = build_proof_sequence(&cert.integral, &cert.witness).unwrap();
        assert!(verify_proof_sequence(&seq, &cert.integral, &cert.witness));
    }
}

#[test]
fn resets_keep_their_promises() {
    let mut checked = 0;
    let mut seed = 41;
    while checked < 500 {
        for cert in certificates(40, seed) {
            let (ineq, w) = (&cert.integral, &cert.witness);
            if ineq.z.len() < 2 {
                continue;
            }
            let drops: Vec<VarSet> = ineq.d.distinct().filter(|t| t.is_unconditional()).map(|t| t.y).collect();
            for drop in drops {
                let (i2, w2) = reset(ineq, w, drop).unwrap();
                assert!(i2.z.is_subset(&ineq.z));
                assert!(i2.z.len() + 1 >= ineq.z.len());
                let mut rest = ineq.d.clone();
                rest.remove(&MonTerm::unconditional(drop));
                assert!(i2.d.is_subset(&rest));
                assert!(potential_reset(&i2, &w2) < potential_reset(ineq, w));
                assert!(check_identity(&i2, &w2));
                checked += 1;
            }
        }
        seed += 1;
    }
}

#[test]
fn untruncated_products_dominate() {
    let mut rng = common::rng(43);
    let mut cases = 0;
    for (_, ddr, _) in fixtures::catalog().into_iter().cycle() {
        if cases == 20 {
            break;
        }
        if ddr.universe().len() > 8 {
            continue;
        }
        let db = common::uniform_db(&ddr, rng.gen_range(4..=10), 3, &mut rng);
        let dc = infer_cardinalities(&db);
        let cert = solve_bound(&ddr.head_sets(), &dc).unwrap();
        let seq = build_proof_sequence(&cert.integral, &cert.witness).unwrap();
        let start = initial_slots(&db, &cert).unwrap();
        let states = trace(start.clone(), &seq.steps, &Budget::infinite()).unwrap();
        let end = states.last().unwrap();
        let join = full_natural_join(&db);
        let u = join.vars();
        for t in join.iter() {
            let rhs: Rat = start.iter().map(|s| s.measure.eval_at(u, t)).product();
            let mut lhs = Rat::from_integer(1.into());
            for (z, k) in cert.integral.z.iter() {
                let copies: Vec<_> = end.iter().filter(|s| s.term == MonTerm::unconditional(*z)).take(k as usize).collect();
                assert_eq!(copies.len() as u64, k);
                for s in copies {
                    lhs *= s.measure.eval_at(u, t);
                }
            }
            assert!(lhs >= rhs);
        }
        cases += 1;
    }
}
