//! The measure-driven executor: replays a proof sequence over
//! sub-probability measures, truncates composition products below `1/B`
//! and, when a composition drops mass, continues on a reset inequality.
//!
//! Every node of the execution tree holds the target multiset `Z`, one
//! measure per copy of a term in `D` (a *slot*), and a proof sequence with a
//! cursor. The light child advances the cursor; the heavy child exists only
//! after a composition with `|Z| > 1` and gets a fresh sequence for the
//! reset inequality.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bound::{make_budget, solve_bound, BoundCertificate, Budget};
use crate::database::Database;
use crate::ddr::Ddr;
use crate::degree::{first_violation, max_degree, restricted_len, DegreeConstraints, MonTerm};
use crate::measure::Measure;
use crate::num::Rat;
use crate::oracle::full_natural_join;
use crate::relation::Relation;
use crate::shannon::{
    build_proof_sequence, check_identity, reset, IntegralInequality, Multiset, ProofSequence,
    ProofStep, Witness,
};
use crate::vars::VarSet;
use crate::{Error, Result};

/// A copy of a term of `D` together with its measure.
#[derive(Clone, Debug)]
pub struct Slot {
    pub term: MonTerm,
    pub measure: Rc<Measure>,
}

/// One node of the execution tree.
#[derive(Clone, Debug)]
pub struct ExecState {
    pub z: Multiset<VarSet>,
    pub slots: Vec<Slot>,
    pub seq: Rc<ProofSequence>,
    /// Index of the next step in `seq`.
    pub pos: usize,
    pub depth: usize,
}

impl ExecState {
    pub fn d(&self) -> Multiset<MonTerm> {
        self.slots.iter().map(|s| s.term).collect()
    }

    /// The witness of `(Z, D)` recorded in the sequence.
    pub fn witness(&self) -> &Witness {
        &self.seq.snapshots[self.pos].w
    }

    /// The slot that ends the recursion: the first target present in `D`.
    fn leaf_slot(&self) -> Option<usize> {
        self.z
            .distinct()
            .find_map(|z| self.slots.iter().position(|s| s.term == MonTerm::unconditional(*z)))
    }
}

fn find_slot(slots: &[Slot], t: &MonTerm) -> Result<usize> {
    slots
        .iter()
        .position(|s| s.term == *t)
        .ok_or_else(|| Error::Invariant(alloc::format!("no measure for {t:?}")))
}

fn slot(term: MonTerm, m: Measure) -> Slot {
    Slot { term, measure: Rc::new(m) }
}

/// Mirrors one proof step on the measures. Returns the new slots and, for a
/// composition, the index of the product slot.
pub fn apply_step(step: &ProofStep, slots: &[Slot], budget: &Budget) -> Result<(Vec<Slot>, Option<usize>)> {
    let mut out = slots.to_vec();
    match *step {
        ProofStep::Decomposition { x, y } => {
            let i = find_slot(&out, &MonTerm::unconditional(x.union(y)))?;
            let p = out[i].measure.clone();
            let cond = slot(MonTerm::new(y, x), p.conditional(x));
            if x.is_empty() {
                out[i] = cond;
            } else {
                out[i] = slot(MonTerm::unconditional(x), p.marginal(x));
                out.insert(i + 1, cond);
            }
            Ok((out, None))
        }
        ProofStep::Monotonicity { x, y } => {
            let i = find_slot(&out, &MonTerm::unconditional(x.union(y)))?;
            if x.is_empty() {
                out.remove(i);
            } else {
                let m = out[i].measure.marginal(x);
                out[i] = slot(MonTerm::unconditional(x), m);
            }
            Ok((out, None))
        }
        ProofStep::Submodularity { y, x, z } => {
            let i = find_slot(&out, &MonTerm::new(y, x))?;
            let m = out[i].measure.widen_condition(z);
            out[i] = slot(MonTerm::new(y, x.union(z)), m);
            Ok((out, None))
        }
        ProofStep::Composition { x, y } => {
            let i = find_slot(&out, &MonTerm::unconditional(x))?;
            let j = find_slot(&out, &MonTerm::new(y, x))?;
            let m = Measure::truncated_product(&out[i].measure, &out[j].measure, budget);
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            out.remove(hi);
            out[lo] = slot(MonTerm::unconditional(x.union(y)), m);
            Ok((out, Some(lo)))
        }
    }
}

/// Applies `steps` in order without branching and returns the slots after
/// each step, starting with `slots` itself.
pub fn trace(slots: Vec<Slot>, steps: &[ProofStep], budget: &Budget) -> Result<Vec<Vec<Slot>>> {
    let mut out = alloc::vec![slots];
    for step in steps {
        let (next, _) = apply_step(step, out.last().unwrap(), budget)?;
        out.push(next);
    }
    Ok(out)
}

/// Per-leaf record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafStats {
    pub depth: usize,
    pub targets: usize,
    pub head: VarSet,
    pub size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: usize,
    pub leaves: Vec<LeafStats>,
    pub max_depth: usize,
    pub heavy_branches: usize,
    /// Largest support of any unconditional measure built.
    pub max_support: usize,
}

impl Stats {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn max_leaf_size(&self) -> usize {
        self.leaves.iter().map(|l| l.size).max().unwrap_or(0)
    }
}

/// Which invariants the auditor checked and how many nodes it saw.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub nodes: usize,
    pub identity: bool,
    pub sub_probability: bool,
    pub above_budget: bool,
    pub targets_nonempty: bool,
    /// `None` when no oracle join was supplied.
    pub coverage: Option<bool>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions<'a> {
    /// Check invariants (a)–(d) at every node; fail on the first violation.
    pub audit: bool,
    /// Full join over the universe, for the coverage invariant (e).
    pub oracle: Option<&'a Relation>,
    /// Abort when the execution tree grows past this many nodes.
    pub max_nodes: Option<usize>,
}

/// Relations emitted per head set, with execution statistics.
#[derive(Clone, Debug, Default)]
pub struct OutputModel {
    pub relations: BTreeMap<VarSet, Relation>,
    pub stats: Stats,
    pub audit: Option<AuditReport>,
}

impl OutputModel {
    /// Relations aligned with `heads` (empty where nothing was emitted).
    pub fn aligned(&self, heads: &[VarSet]) -> Vec<Relation> {
        heads
            .iter()
            .map(|h| self.relations.get(h).cloned().unwrap_or_else(|| Relation::empty(*h)))
            .collect()
    }

    pub fn total_size(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }
}

struct Auditor<'a> {
    report: AuditReport,
    oracle: Option<&'a Relation>,
    covered: Vec<bool>,
}

impl Auditor<'_> {
    fn node(&mut self, s: &ExecState, budget: &Budget) -> Result<()> {
        self.report.nodes += 1;
        let snap = &s.seq.snapshots[s.pos];
        let d = s.d();
        if d != snap.d || !check_identity(&IntegralInequality { z: s.z.clone(), d }, &snap.w) {
            return Err(Error::Invariant(alloc::format!("(a) identity fails at depth {}", s.depth)));
        }
        for sl in &s.slots {
            if sl.measure.term() != sl.term {
                return Err(Error::Invariant(alloc::format!("slot {:?} holds a measure for {:?}", sl.term, sl.measure.term())));
            }
            if !sl.measure.is_sub_probability() {
                return Err(Error::Invariant(alloc::format!("(b) mass above 1 in {:?}", sl.term)));
            }
            if sl.term.is_unconditional() {
                if let Some(w) = sl.measure.min_weight() {
                    if !budget.geq(w) {
                        return Err(Error::Invariant(alloc::format!("(c) weight {w} below 1/B in {:?}", sl.term)));
                    }
                }
            }
        }
        if s.z.is_empty() {
            return Err(Error::Invariant(String::from("(d) empty target multiset")));
        }
        Ok(())
    }

    fn leaf(&mut self, s: &ExecState, budget: &Budget) {
        let Some(join) = self.oracle else { return };
        let k = s.z.len();
        let u = join.vars();
        for (i, t) in join.iter().enumerate() {
            if self.covered[i] {
                continue;
            }
            let mut prod = Rat::from_integer(1.into());
            for sl in &s.slots {
                prod *= sl.measure.eval_at(u, t);
                if prod == Rat::from_integer(0.into()) {
                    break;
                }
            }
            if budget.admits_power(&prod, k) {
                self.covered[i] = true;
            }
        }
    }
}

/// Runs the executor from `root` and collects leaf supports per head.
pub fn run(root: ExecState, budget: &Budget, opts: &RunOptions) -> Result<OutputModel> {
    let mut auditor = Auditor {
        report: AuditReport {
            identity: true,
            sub_probability: true,
            above_budget: true,
            targets_nonempty: true,
            ..AuditReport::default()
        },
        oracle: opts.oracle,
        covered: alloc::vec![false; opts.oracle.map_or(0, Relation::len)],
    };
    let mut stats = Stats::default();
    let mut out: BTreeMap<VarSet, Relation> = BTreeMap::new();
    let mut stack = alloc::vec![root];
    while let Some(s) = stack.pop() {
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(s.depth);
        if opts.max_nodes.is_some_and(|m| stats.nodes > m) {
            return Err(Error::Invariant(String::from("execution tree exceeds the node limit")));
        }
        for sl in &s.slots {
            if sl.term.is_unconditional() {
                stats.max_support = stats.max_support.max(sl.measure.len());
            }
        }
        if opts.audit {
            auditor.node(&s, budget)?;
        }
        if let Some(i) = s.leaf_slot() {
            let head = s.slots[i].term.y;
            let rel = s.slots[i].measure.support();
            stats.leaves.push(LeafStats { depth: s.depth, targets: s.z.len() as usize, head, size: rel.len() });
            if opts.audit {
                auditor.leaf(&s, budget);
            }
            let merged = match out.remove(&head) {
                Some(r) => r.union(&rel),
                None => rel,
            };
            out.insert(head, merged);
            continue;
        }
        let Some(step) = s.seq.steps.get(s.pos).copied() else {
            return Err(Error::Invariant(String::from("proof sequence ended before a target was reached")));
        };
        let (slots, product) = apply_step(&step, &s.slots, budget)?;
        if let (ProofStep::Composition { x, y }, Some(pi), true) = (step, product, s.z.len() > 1) {
            let after = &s.seq.snapshots[s.pos + 1];
            let ineq = IntegralInequality { z: s.z.clone(), d: after.d.clone() };
            let (ih, wh) = reset(&ineq, &after.w, x.union(y))?;
            let seq = build_proof_sequence(&ih, &wh)?;
            let heavy = assign_slots(&slots, pi, &ih.d)?;
            stats.heavy_branches += 1;
            stack.push(ExecState { z: ih.z, slots: heavy, seq: Rc::new(seq), pos: 0, depth: s.depth + 1 });
        }
        stack.push(ExecState { z: s.z, slots, seq: s.seq, pos: s.pos + 1, depth: s.depth + 1 });
    }
    let audit = if opts.audit {
        if opts.oracle.is_some() {
            let ok = auditor.covered.iter().all(|&c| c);
            auditor.report.coverage = Some(ok);
            if !ok {
                return Err(Error::Invariant(String::from("(e) a join tuple is covered by no leaf")));
            }
        }
        Some(auditor.report)
    } else {
        None
    };
    Ok(OutputModel { relations: out, stats, audit })
}

/// Keeps, for each term of `d`, one slot with that term (never `skip`).
fn assign_slots(slots: &[Slot], skip: usize, d: &Multiset<MonTerm>) -> Result<Vec<Slot>> {
    let mut used = alloc::vec![false; slots.len()];
    used[skip] = true;
    let mut out = Vec::new();
    for (t, k) in d.iter() {
        for _ in 0..k {
            let i = (0..slots.len())
                .find(|&i| !used[i] && slots[i].term == *t)
                .ok_or_else(|| Error::Invariant(alloc::format!("reset kept {t:?} with no measure left")))?;
            used[i] = true;
            out.push(slots[i].clone());
        }
    }
    // Keep the original slot order.
    let mut idx: Vec<usize> = (0..slots.len()).filter(|&i| used[i] && i != skip).collect();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| slots[i].clone()).collect())
}

/// The full pipeline for one rule.
#[derive(Clone, Debug)]
pub struct DdrAnswer {
    pub model: OutputModel,
    pub certificate: BoundCertificate,
    pub budget: Budget,
    pub sequence: ProofSequence,
}

impl DdrAnswer {
    pub fn relations(&self, ddr: &Ddr) -> Vec<Relation> {
        self.model.aligned(&ddr.head_sets())
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnswerOptions {
    pub audit: bool,
    /// Check coverage (e) against the full join; small instances only.
    pub oracle: bool,
    pub max_nodes: Option<usize>,
}

/// Picks, per term, the relation whose degree fits `N_δ` with the smallest
/// restriction to the term's variables.
fn source_relation<'a>(db: &'a Database, t: &MonTerm, n: u64) -> Option<&'a Relation> {
    let dom = db.active_domain();
    db.relations()
        .iter()
        .filter(|r| max_degree(r, t, dom) <= n)
        .min_by_key(|r| restricted_len(r, t.all(), dom))
}

/// Initial measures, one slot per copy of each term in `D`.
pub fn initial_slots(db: &Database, cert: &BoundCertificate) -> Result<Vec<Slot>> {
    let dom = db.active_domain();
    let mut slots = Vec::new();
    for (t, k) in cert.integral.d.iter() {
        let n = cert.bounds[t];
        let r = source_relation(db, t, n)
            .ok_or_else(|| Error::ConstraintsViolated { term: alloc::format!("{t:?}"), actual: n + 1, bound: n })?;
        let m = Rc::new(Measure::from_constraint(r, dom, t, n)?);
        for _ in 0..k {
            slots.push(Slot { term: *t, measure: m.clone() });
        }
    }
    Ok(slots)
}

/// Computes a model of `ddr` on `db` under `dc`.
pub fn answer_ddr(ddr: &Ddr, db: &Database, dc: &DegreeConstraints, opts: &AnswerOptions) -> Result<DdrAnswer> {
    if let Some((t, actual, bound)) = first_violation(db, dc) {
        return Err(Error::ConstraintsViolated { term: alloc::format!("{t:?}"), actual, bound });
    }
    let heads = ddr.head_sets();
    let certificate = solve_bound(&heads, dc)?;
    let budget = make_budget(&certificate);
    let sequence = build_proof_sequence(&certificate.integral, &certificate.witness)?;
    if db.relations().iter().any(Relation::is_empty) {
        let model = OutputModel {
            relations: heads.iter().map(|h| (*h, Relation::empty(*h))).collect(),
            ..OutputModel::default()
        };
        return Ok(DdrAnswer { model, certificate, budget, sequence });
    }
    let slots = initial_slots(db, &certificate)?;
    let root = ExecState {
        z: certificate.integral.z.clone(),
        slots,
        seq: Rc::new(sequence.clone()),
        pos: 0,
        depth: 0,
    };
    let join = if opts.audit && opts.oracle { Some(full_natural_join(db)) } else { None };
    let run_opts = RunOptions { audit: opts.audit, oracle: join.as_ref(), max_nodes: opts.max_nodes };
    let mut model = run(root, &budget, &run_opts)?;
    // A head tuple whose projection misses an input atom inside the head
    // cannot come from a join tuple; dropping it keeps the model valid.
    for h in &heads {
        let rel = model.relations.remove(h).unwrap_or_else(|| Relation::empty(*h));
        let rel = db
            .iter()
            .filter(|(a, _)| a.vars().is_subset(*h))
            .fold(rel, |acc, (_, r)| acc.semijoin(r));
        model.relations.insert(*h, rel);
    }
    Ok(DdrAnswer { model, certificate, budget, sequence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::Atom;
    use crate::degree::infer_cardinalities;
    use crate::fixtures;
    use crate::oracle::verify_model;
    use crate::value::Value;
    use alloc::vec;

    fn db_for(ddr: &Ddr, rows: &[Vec<Vec<u32>>]) -> Database {
        let mut db = Database::new();
        for (a, rs) in ddr.body.iter().zip(rows) {
            let rel = Relation::from_columns(
                &a.cols,
                rs.iter().map(|r| r.iter().map(|&x| Value(x)).collect::<Vec<_>>()),
            );
            db.insert(Atom::new(a.name.clone(), a.cols.clone()).unwrap(), rel).unwrap();
        }
        db
    }

    #[test]
    fn two_targets_path_small() {
        let ddr = fixtures::two_targets_path();
        let path = |n: u32| -> Vec<Vec<u32>> { (0..n).flat_map(|i| [vec![i, i], vec![i, i + 1]]).collect() };
        let db = db_for(&ddr, &[path(5), path(5), path(5)]);
        let dc = infer_cardinalities(&db);
        let opts = AnswerOptions { audit: true, oracle: true, max_nodes: None };
        let ans = answer_ddr(&ddr, &db, &dc, &opts).unwrap();
        assert!(verify_model(&db, &ddr, &ans.relations(&ddr)));
        assert_eq!(ans.model.audit.as_ref().unwrap().coverage, Some(true));
        assert!(ans.model.stats.leaf_count() >= 1);
    }

    #[test]
    fn empty_input_gives_empty_model() {
        let ddr = fixtures::two_targets_path();
        let db = db_for(&ddr, &[vec![vec![1, 2]], vec![], vec![vec![3, 4]]]);
        let mut dc = DegreeConstraints::new();
        for a in &ddr.body {
            dc.insert(MonTerm::unconditional(a.vars()), 4).unwrap();
        }
        let ans = answer_ddr(&ddr, &db, &dc, &AnswerOptions::default()).unwrap();
        assert!(ans.relations(&ddr).iter().all(Relation::is_empty));
    }

    #[test]
    fn violated_constraints_rejected() {
        let ddr = fixtures::two_targets_path();
        let db = db_for(&ddr, &[vec![vec![1, 2], vec![3, 2]], vec![vec![2, 4]], vec![vec![4, 4]]]);
        let mut dc = DegreeConstraints::new();
        for a in &ddr.body {
            dc.insert(MonTerm::unconditional(a.vars()), 1).unwrap();
        }
        assert!(matches!(
            answer_ddr(&ddr, &db, &dc, &AnswerOptions::default()),
            Err(Error::ConstraintsViolated { .. })
        ));
    }
}
