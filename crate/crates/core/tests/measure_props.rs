use std::collections::BTreeMap;

use flowjoin_core::bound::Budget;
use flowjoin_core::measure::Measure;
use flowjoin_core::num::Rat;
use flowjoin_core::value::Value;
use flowjoin_core::vars::VarSet;
use num_bigint::BigUint;
use proptest::prelude::*;

fn measure_strategy() -> impl Strategy<Value = Measure> {
    prop::collection::btree_map(prop::collection::vec(0u32..4, 3), 1u32..20, 1..30).prop_map(|rows| {
        let total: u32 = rows.values().sum();
        let rows = rows
            .into_iter()
            .map(|(k, w)| (k.into_iter().map(Value).collect(), Rat::new(w.into(), total.into())))
            .collect();
        Measure::from_rows(VarSet::full(3), rows)
    })
}

fn weights(m: &Measure) -> BTreeMap<Vec<Value>, Rat> {
    m.iter().map(|(k, w)| (k.to_vec(), w.clone())).collect()
}

proptest! {
    #[test]
    fn split_then_join_is_exact(p in measure_strategy(), bits in 1u32..7) {
        let x = VarSet::from_bits(bits);
        let joined = Measure::truncated_product(&p.marginal(x), &p.conditional(x), &Budget::infinite());
        prop_assert_eq!(weights(&joined), weights(&p));
    }

    #[test]
    fn conditionals_are_sub_probabilities(p in measure_strategy(), bits in 1u32..7) {
        let c = p.conditional(VarSet::from_bits(bits));
        prop_assert!(c.is_sub_probability());
        prop_assert!(c.max_condition_mass() <= Rat::from_integer(1.into()));
    }

    #[test]
    fn truncation_keeps_heavy_rows(p in measure_strategy(), bits in 1u32..7, b in 2u32..60) {
        let x = VarSet::from_bits(bits);
        let budget = Budget::new(1, BigUint::from(b));
        let full = weights(&Measure::truncated_product(&p.marginal(x), &p.conditional(x), &Budget::infinite()));
        let cut = weights(&Measure::truncated_product(&p.marginal(x), &p.conditional(x), &budget));
        let floor = Rat::new(1.into(), b.into());
        for (k, w) in &full {
            prop_assert_eq!(cut.contains_key(k), *w >= floor);
        }
        prop_assert!(cut.values().all(|w| budget.geq(w)));
    }
}
