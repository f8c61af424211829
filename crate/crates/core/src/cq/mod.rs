//! Conjunctive queries: free-connex tree decompositions, width measures and
//! answering through one rule per combination of bags.

mod td;

pub use td::{enumerate_tds, Hypergraph, TreeDecomposition, MAX_TD_VARS};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::bound::solve_bound;
use crate::database::{Atom, Database};
use crate::ddr::{Cq, Ddr};
use crate::degree::DegreeConstraints;
use crate::exec::{answer_ddr, AnswerOptions};
use crate::relation::Relation;
use crate::vars::VarSet;
use crate::{Error, Result};

/// Default limit on the number of bag combinations.
pub const DEFAULT_COMBINATION_CAP: u128 = 4096;

/// A width in bits, with the `log_N` value when every constraint in play
/// shares one bound `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Width {
    pub bits: f64,
    pub log_n: Option<f64>,
}

impl Width {
    fn from_bits(bits: f64, n: Option<u64>) -> Self {
        let log_n = n.filter(|&n| n >= 2).map(|n| bits / libm::log2(n as f64));
        Width { bits, log_n }
    }

    fn worst(a: Width, b: Width) -> Width {
        if b.bits > a.bits { b } else { a }
    }
}

#[derive(Clone, Debug)]
pub struct WidthReport {
    pub tds: Vec<TreeDecomposition>,
    /// Largest bag bound per decomposition.
    pub per_td: Vec<Width>,
    pub fhtw: Width,
    pub subw: Width,
    /// Bag index per decomposition for the combination attaining `subw`.
    pub worst_combination: Vec<usize>,
}

/// The size bound of a single bag.
pub fn rho_star(bag: VarSet, dc: &DegreeConstraints) -> Result<Width> {
    let cert = solve_bound(&[bag], dc)?;
    Ok(Width::from_bits(cert.exponent_bits, dc.uniform_bound()))
}

/// Number of bag combinations, one bag per decomposition.
pub fn combination_count(tds: &[TreeDecomposition]) -> u128 {
    tds.iter().map(|t| t.bags.len() as u128).product()
}

/// All bag combinations in lexicographic order of bag indices.
pub fn combinations(tds: &[TreeDecomposition]) -> Vec<Vec<usize>> {
    let mut out = alloc::vec![Vec::new()];
    for td in tds {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                (0..td.bags.len()).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    out
}

fn combination_heads(tds: &[TreeDecomposition], combo: &[usize]) -> Vec<VarSet> {
    let set: BTreeSet<VarSet> = tds.iter().zip(combo).map(|(t, &i)| t.bags[i]).collect();
    set.into_iter().collect()
}

/// Computes `fhtw` and `subw` over `tds` (all free-connex decompositions
/// when `None`).
pub fn widths(
    h: &Hypergraph,
    f: VarSet,
    dc: &DegreeConstraints,
    tds: Option<Vec<TreeDecomposition>>,
    cap: u128,
) -> Result<WidthReport> {
    let tds = match tds {
        Some(t) => t,
        None => enumerate_tds(h, f)?,
    };
    let n = dc.uniform_bound();
    let mut cache: BTreeMap<VarSet, Width> = BTreeMap::new();
    let mut per_td = Vec::new();
    for td in &tds {
        let mut w = Width::from_bits(f64::NEG_INFINITY, n);
        for b in &td.bags {
            let bw = match cache.get(b) {
                Some(w) => *w,
                None => {
                    let w = rho_star(*b, dc)?;
                    cache.insert(*b, w);
                    w
                }
            };
            w = Width::worst(w, bw);
        }
        per_td.push(w);
    }
    let fhtw = per_td
        .iter()
        .copied()
        .fold(None, |best: Option<Width>, w| match best {
            Some(b) if b.bits <= w.bits => Some(b),
            _ => Some(w),
        })
        .ok_or_else(|| Error::InvalidInput(String::from("no tree decomposition")))?;
    let count = combination_count(&tds);
    if count > cap {
        return Err(Error::TooManyCombinations { count, cap });
    }
    let mut subw = Width::from_bits(f64::NEG_INFINITY, n);
    let mut worst_combination = Vec::new();
    for combo in combinations(&tds) {
        let cert = solve_bound(&combination_heads(&tds, &combo), dc)?;
        if cert.exponent_bits > subw.bits {
            subw = Width::from_bits(cert.exponent_bits, n);
            worst_combination = combo;
        }
    }
    Ok(WidthReport { tds, per_td, fhtw, subw, worst_combination })
}

/// Which decompositions `answer_cq` uses.
#[derive(Clone, Debug, Default)]
pub enum TdChoice {
    #[default]
    All,
    /// The two decompositions with the smallest largest bag.
    Greedy,
    Given(Vec<TreeDecomposition>),
}

#[derive(Clone, Debug)]
pub struct CqOptions {
    pub tds: TdChoice,
    pub cap: u128,
    pub audit: bool,
}

impl Default for CqOptions {
    fn default() -> Self {
        CqOptions { tds: TdChoice::All, cap: DEFAULT_COMBINATION_CAP, audit: false }
    }
}

#[derive(Clone, Debug)]
pub struct CqAnswer {
    pub relation: Relation,
    pub tds: Vec<TreeDecomposition>,
    pub combinations: usize,
    /// Largest bound over the combinations, in bits.
    pub exponent_bits: f64,
}

fn greedy(tds: Vec<TreeDecomposition>, dc: &DegreeConstraints) -> Result<Vec<TreeDecomposition>> {
    let mut scored = Vec::new();
    for td in tds {
        let mut w = f64::NEG_INFINITY;
        for b in &td.bags {
            w = w.max(rho_star(*b, dc)?.bits);
        }
        scored.push((w, td));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(2).map(|(_, t)| t).collect())
}

/// Answers `q` over `db`.
///
/// For every bag combination the rule whose heads are the chosen bags is
/// solved; each bag collects the union of its head outputs. Every
/// decomposition is then assembled by semijoin reduction and joins, and the
/// results are united.
pub fn answer_cq(q: &Cq, db: &Database, dc: &DegreeConstraints, opts: &CqOptions) -> Result<CqAnswer> {
    let h = Hypergraph::new(q.edges());
    let f = q.free();
    let all = enumerate_tds(&h, f)?;
    let tds = match &opts.tds {
        TdChoice::All => all,
        TdChoice::Greedy => greedy(all, dc)?,
        TdChoice::Given(t) => {
            if t.is_empty() || !t.iter().all(|td| td.is_valid_for(&h) && td.is_free_connex(f)) {
                return Err(Error::InvalidInput(String::from("not a free-connex tree decomposition of the query")));
            }
            t.clone()
        }
    };
    let count = combination_count(&tds);
    if count > opts.cap {
        return Err(Error::TooManyCombinations { count, cap: opts.cap });
    }
    let mut bag_rels: BTreeMap<VarSet, Relation> = BTreeMap::new();
    let mut exponent_bits = f64::NEG_INFINITY;
    let combos = combinations(&tds);
    let aopts = AnswerOptions { audit: opts.audit, oracle: false, max_nodes: None };
    for combo in &combos {
        let heads = combination_heads(&tds, combo);
        let ddr = bag_rule(q, &heads)?;
        let ans = answer_ddr(&ddr, db, dc, &aopts)?;
        exponent_bits = exponent_bits.max(ans.certificate.exponent_bits);
        for (h, r) in ans.model.relations {
            let merged = match bag_rels.remove(&h) {
                Some(old) => old.union(&r),
                None => r,
            };
            bag_rels.insert(h, merged);
        }
    }
    let mut result = Relation::empty(f);
    for td in &tds {
        let rels: Vec<Relation> = td
            .bags
            .iter()
            .map(|b| bag_rels.get(b).cloned().unwrap_or_else(|| Relation::empty(*b)))
            .collect();
        result = result.union(&yannakakis(td, rels, f));
    }
    Ok(CqAnswer { relation: result, tds, combinations: combos.len(), exponent_bits })
}

fn bag_rule(q: &Cq, heads: &[VarSet]) -> Result<Ddr> {
    let atoms = heads
        .iter()
        .enumerate()
        .map(|(i, h)| Atom::new(alloc::format!("_bag{i}"), h.iter().collect()))
        .collect::<Result<Vec<_>>>()?;
    Ddr::new(q.names.clone(), atoms, q.body.clone())
}

/// Semijoin-reduces the bag relations along the tree, then joins them and
/// projects to `f`.
pub fn yannakakis(td: &TreeDecomposition, mut rels: Vec<Relation>, f: VarSet) -> Relation {
    let n = td.bags.len();
    let mut adj = alloc::vec![Vec::new(); n];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    // Root at a bag inside `f` when there is one, so the final joins stay
    // within the free part as long as possible.
    let root = (0..n).find(|&i| td.bags[i].is_subset(f) && !f.is_empty()).unwrap_or(0);
    let mut order = alloc::vec![root];
    let mut parent = alloc::vec![usize::MAX; n];
    let mut seen = alloc::vec![false; n];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        let a = order[i];
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                parent[b] = a;
                order.push(b);
            }
        }
        i += 1;
    }
    for &c in order.iter().rev() {
        if parent[c] != usize::MAX {
            let p = parent[c];
            rels[p] = rels[p].semijoin(&rels[c]);
        }
    }
    for &c in &order {
        if parent[c] != usize::MAX {
            let p = parent[c];
            rels[c] = rels[c].semijoin(&rels[p]);
        }
    }
    // After full reduction every bag tuple extends to a join tuple, so the
    // bags outside `f` only matter through their projections.
    let mut acc = Relation::unit();
    for &c in &order {
        let part = rels[c].project(td.bags[c].intersection(f));
        acc = acc.join(&part);
        if acc.is_empty() {
            break;
        }
    }
    if rels.iter().any(Relation::is_empty) {
        return Relation::empty(f);
    }
    acc.project(f)
}
