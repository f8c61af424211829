mod common;

use flowjoin_core::degree::infer_cardinalities;
use flowjoin_core::exec::{answer_ddr, AnswerOptions};
use flowjoin_core::fixtures;
use flowjoin_core::oracle::{full_natural_join, verify_model};

#[test]
fn catalog_rules_on_random_inputs() {
    let mut rng = common::rng(7);
    for (name, ddr, _) in fixtures::catalog() {
        for _ in 0..3 {
            let db = common::uniform_db(&ddr, 12, 4, &mut rng);
            let dc = infer_cardinalities(&db);
            let opts = AnswerOptions { audit: true, oracle: true, max_nodes: Some(200_000) };
            let ans = answer_ddr(&ddr, &db, &dc, &opts).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(verify_model(&db, &ddr, &ans.relations(&ddr)), "{name}");
        }
    }
}

#[test]
fn hexagon_matches_the_join() {
    let ddr = fixtures::hexagon();
    let mut rng = common::rng(11);
    for n in [16usize, 64] {
        let db = common::skewed_db(&ddr, n, &mut rng);
        let dc = fixtures::body_cardinalities(&ddr, n as u64);
        let opts = AnswerOptions { audit: true, oracle: n <= 16, max_nodes: None };
        let ans = answer_ddr(&ddr, &db, &dc, &opts).unwrap();
        let out = &ans.relations(&ddr)[0];
        assert_eq!(*out, full_natural_join(&db));
        assert!(out.len() <= 2 * n * n);
        assert!(ans.model.stats.max_leaf_size() <= n * n, "{:?}", ans.model.stats.max_leaf_size());
    }
}
