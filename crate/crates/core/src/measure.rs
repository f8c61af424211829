//! Sub-probability measures with exact rational weights.
//!
//! A measure `p(Y | X)` keeps its rows sorted by the condition prefix, so
//! every per-condition distribution is a contiguous range. Widening the
//! condition is lazy: the declared condition grows, the effective one (the
//! columns that actually key the weights) does not.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bound::Budget;
use crate::database::ActiveDomain;
use crate::degree::{max_degree, MonTerm};
use crate::num::{log2_rat, Rat};
use crate::relation::{partition_point, Relation};
use crate::value::{Interner, Value};
use crate::vars::{Var, VarSet};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    y: VarSet,
    x: VarSet,
    eff: VarSet,
    /// Effective condition columns (ascending), then measured columns
    /// (ascending).
    cols: Vec<Var>,
    keys: Vec<Value>,
    weights: Vec<Rat>,
    /// `log2` of each weight, for fast threshold tests.
    logs: Vec<f64>,
}

impl Measure {
    fn build(y: VarSet, x: VarSet, eff: VarSet, mut rows: Vec<(Vec<Value>, Rat)>) -> Self {
        debug_assert!(eff.is_subset(x) && x.is_disjoint(y));
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let cols: Vec<Var> = eff.iter().chain(y.iter()).collect();
        let mut keys = Vec::with_capacity(rows.len() * cols.len());
        let mut weights = Vec::with_capacity(rows.len());
        let mut logs = Vec::with_capacity(rows.len());
        for (k, w) in rows {
            debug_assert!(w > Rat::zero());
            keys.extend_from_slice(&k);
            logs.push(log2_rat(&w));
            weights.push(w);
        }
        Measure { y, x, eff, cols, keys, weights, logs }
    }

    /// Uniform `1/N` on `restrict(R, X ∪ Y)`, conditioned on `X`.
    pub fn from_constraint(r: &Relation, dom: &ActiveDomain, t: &MonTerm, n: u64) -> Result<Self> {
        let deg = max_degree(r, t, dom);
        if deg > n {
            return Err(Error::ConstraintsViolated { term: alloc::format!("{t:?}"), actual: deg, bound: n });
        }
        let all = t.all();
        let rel = r.restrict(all, dom);
        let w = Rat::new(BigInt::one(), BigInt::from(n));
        let ypos = all.positions_of(t.y);
        let xpos = all.positions_of(t.x);
        let rows = rel
            .iter()
            .map(|row| {
                let k: Vec<Value> = xpos.iter().chain(&ypos).map(|&p| row[p]).collect();
                (k, w.clone())
            })
            .collect();
        Ok(Self::build(t.y, t.x, t.x, rows))
    }

    /// An unconditional measure from explicit rows over `y` (ascending
    /// column order). Rows must be distinct.
    pub fn from_rows(y: VarSet, rows: Vec<(Vec<Value>, Rat)>) -> Self {
        Self::build(y, VarSet::EMPTY, VarSet::EMPTY, rows)
    }

    /// A conditional measure from rows over `eff ∪ y`, condition columns
    /// first.
    pub fn from_conditional_rows(y: VarSet, x: VarSet, rows: Vec<(Vec<Value>, Rat)>) -> Self {
        Self::build(y, x, x, rows)
    }

    pub fn y(&self) -> VarSet {
        self.y
    }

    /// Declared condition.
    pub fn x(&self) -> VarSet {
        self.x
    }

    /// Condition variables the weights actually depend on.
    pub fn effective_x(&self) -> VarSet {
        self.eff
    }

    pub fn term(&self) -> MonTerm {
        MonTerm::new(self.y, self.x)
    }

    pub fn is_unconditional(&self) -> bool {
        self.x.is_empty()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn arity(&self) -> usize {
        self.cols.len()
    }

    fn key(&self, i: usize) -> &[Value] {
        let a = self.arity();
        &self.keys[i * a..(i + 1) * a]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Value], &Rat)> + '_ {
        (0..self.len()).map(move |i| (self.key(i), &self.weights[i]))
    }

    /// Rows whose effective condition equals `x` (a tuple over `eff`).
    fn range(&self, x: &[Value]) -> Range<usize> {
        let k = x.len();
        let lo = partition_point(self.len(), |i| &self.key(i)[..k] < x);
        let hi = lo + partition_point(self.len() - lo, |i| &self.key(lo + i)[..k] <= x);
        lo..hi
    }

    /// `p(t_Y | t_effX)`, where `t` is over `vars ⊇ effX ∪ Y`; 0 if absent.
    pub fn eval_at(&self, vars: VarSet, t: &[Value]) -> Rat {
        assert!(self.eff.union(self.y).is_subset(vars));
        let key: Vec<Value> = self.cols.iter().map(|&v| t[vars.rank(v).unwrap()]).collect();
        let i = partition_point(self.len(), |i| self.key(i) < &key[..]);
        if i < self.len() && self.key(i) == &key[..] {
            self.weights[i].clone()
        } else {
            Rat::zero()
        }
    }

    /// Stored rows as a relation over `effX ∪ Y`.
    pub fn support(&self) -> Relation {
        Relation::from_columns(&self.cols, (0..self.len()).map(|i| self.key(i)))
    }

    /// Sums over the dropped variables. Requires an unconditional measure.
    pub fn marginal(&self, keep: VarSet) -> Self {
        assert!(self.is_unconditional(), "marginal of a conditional measure");
        assert!(keep.is_subset(self.y));
        let pos = self.y.positions_of(keep);
        let mut acc: BTreeMap<Vec<Value>, Rat> = BTreeMap::new();
        for (k, w) in self.iter() {
            let kk: Vec<Value> = pos.iter().map(|&p| k[p]).collect();
            *acc.entry(kk).or_insert_with(Rat::zero) += w;
        }
        Self::build(keep, VarSet::EMPTY, VarSet::EMPTY, acc.into_iter().collect())
    }

    /// `p(y | x) = p(x, y) / p_X(x)` for `x` over `cond ⊆ Y`.
    pub fn conditional(&self, cond: VarSet) -> Self {
        assert!(self.is_unconditional(), "conditional of a conditional measure");
        assert!(cond.is_subset(self.y));
        let marg = self.marginal(cond);
        let rest = self.y.difference(cond);
        let cpos = self.y.positions_of(cond);
        let rpos = self.y.positions_of(rest);
        let rows = self
            .iter()
            .map(|(k, w)| {
                let x: Vec<Value> = cpos.iter().map(|&p| k[p]).collect();
                let px = marg.eval_at(cond, &x);
                let key: Vec<Value> = cpos.iter().chain(&rpos).map(|&p| k[p]).collect();
                (key, w / px)
            })
            .collect();
        Self::build(rest, cond, cond, rows)
    }

    /// `p(Y | X ∪ z) := p(Y | X)`; entries are untouched.
    pub fn widen_condition(&self, z: VarSet) -> Self {
        assert!(z.is_disjoint(self.y), "cannot condition on measured variables");
        let mut p = self.clone();
        p.x = p.x.union(z);
        p
    }

    /// `p_X(x) · p_{Y|X}(y|x)`, keeping only products `≥ 1/B`.
    pub fn truncated_product(px: &Measure, pyx: &Measure, budget: &Budget) -> Self {
        assert!(px.is_unconditional());
        assert_eq!(pyx.x, px.y, "condition mismatch in composition");
        let xs = px.y;
        let out = xs.union(pyx.y);
        let eff_pos = xs.positions_of(pyx.eff);
        let k = pyx.eff.len();
        // Output column of each x column and each measured y column.
        let xdst: Vec<usize> = xs.iter().map(|v| out.rank(v).unwrap()).collect();
        let ydst: Vec<usize> = pyx.y.iter().map(|v| out.rank(v).unwrap()).collect();
        let log_b = budget.log2_b;
        let mut rows = Vec::new();
        let mut buf = alloc::vec![Value(0); out.len()];
        let mut cond = alloc::vec![Value(0); k];
        for i in 0..px.len() {
            let xk = px.key(i);
            for (c, &p) in cond.iter_mut().zip(&eff_pos) {
                *c = xk[p];
            }
            let range = pyx.range(&cond);
            if range.is_empty() {
                continue;
            }
            let (wx, lx) = (&px.weights[i], px.logs[i]);
            // Products below this log2 threshold are dropped outright.
            let threshold = -log_b - lx;
            for (d, &v) in xdst.iter().zip(xk) {
                buf[*d] = v;
            }
            for j in range {
                let ly = pyx.logs[j];
                if ly < threshold - 1e-6 {
                    continue;
                }
                let w = wx * &pyx.weights[j];
                if ly < threshold + 1e-6 && !budget.geq(&w) {
                    continue;
                }
                for (d, &v) in ydst.iter().zip(&pyx.key(j)[k..]) {
                    buf[*d] = v;
                }
                rows.push((buf.clone(), w));
            }
        }
        Self::build(out, VarSet::EMPTY, VarSet::EMPTY, rows)
    }

    /// Largest per-condition mass `max_x Σ_y p(y|x)`, exactly.
    pub fn max_condition_mass(&self) -> Rat {
        let k = self.eff.len();
        let mut best = Rat::zero();
        let mut i = 0;
        while i < self.len() {
            let x = &self.key(i)[..k];
            let mut sum = Rat::zero();
            let mut j = i;
            while j < self.len() && &self.key(j)[..k] == x {
                sum += &self.weights[j];
                j += 1;
            }
            if sum > best {
                best = sum;
            }
            i = j;
        }
        best
    }

    /// Every condition carries mass at most 1.
    pub fn is_sub_probability(&self) -> bool {
        self.max_condition_mass() <= Rat::one()
    }

    /// Smallest stored weight.
    pub fn min_weight(&self) -> Option<&Rat> {
        self.weights.iter().min()
    }

    /// TSV rows `values… numerator denominator`, columns effective condition
    /// first. Values are rendered through `names` when given.
    pub fn dump(&self, names: Option<&Interner>) -> String {
        let mut s = String::new();
        for (k, w) in self.iter() {
            for v in k {
                match names {
                    Some(n) => s.push_str(n.resolve(*v)),
                    None => {
                        let _ = write!(s, "{}", v.0);
                    }
                }
                s.push('\t');
            }
            let _ = writeln!(s, "{}\t{}", w.numer(), w.denom());
        }
        s
    }
}

/// `(∏ p_i)^{1/k}`, kept as the exact `k`-th power of each weight.
#[derive(Clone, Debug, PartialEq)]
pub struct RootMeasure {
    pub y: VarSet,
    pub k: u32,
    /// Rows over `y` with weight^k.
    pub rows: Vec<(Vec<Value>, Rat)>,
}

/// Geometric mean of unconditional measures over the same variables, on the
/// intersection of their supports.
pub fn geometric_mean(ps: &[Measure]) -> RootMeasure {
    assert!(!ps.is_empty());
    let y = ps[0].y;
    assert!(ps.iter().all(|p| p.is_unconditional() && p.y == y));
    let mut rows = Vec::new();
    'rows: for (k, w) in ps[0].iter() {
        let mut prod = w.clone();
        for p in &ps[1..] {
            let v = p.eval_at(y, k);
            if v.is_zero() {
                continue 'rows;
            }
            prod *= v;
        }
        rows.push((k.to_vec(), prod));
    }
    RootMeasure { y, k: ps.len() as u32, rows }
}

impl RootMeasure {
    /// Whether `weight(t) = value` exactly (compares `k`-th powers).
    pub fn weight_is(&self, t: &[Value], value: &Rat) -> bool {
        self.rows
            .iter()
            .find(|(k, _)| k == t)
            .is_some_and(|(_, w)| *w == crate::num::rat_pow(value, self.k))
    }

    /// `Σ_t mean_i p_i(t)`: an exact upper bound on the total mass, valid
    /// because each stored `k`-th root is at most the arithmetic mean. The
    /// second value says whether that per-row inequality held.
    pub fn mass_bound(&self, ps: &[Measure]) -> (Rat, bool) {
        let k = Rat::from_integer(BigInt::from(self.k));
        let mut total = Rat::zero();
        let mut ok = true;
        for (t, w) in &self.rows {
            let mean = ps.iter().map(|p| p.eval_at(self.y, t)).sum::<Rat>() / &k;
            ok &= *w <= crate::num::rat_pow(&mean, self.k);
            total += mean;
        }
        (total, ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};
    use alloc::vec;

    fn vs(bits: &[usize]) -> VarSet {
        VarSet::from_vars(bits.iter().copied())
    }

    fn v(x: u32) -> Value {
        Value(x)
    }

    fn dom_of(rels: &[&Relation]) -> ActiveDomain {
        let mut d = ActiveDomain::default();
        for r in rels {
            for row in r.iter() {
                for (c, var) in r.vars().iter().enumerate() {
                    d.insert(var, row[c]);
                }
            }
        }
        d
    }

    #[test]
    fn uniform_conditional_init() {
        // R = {(1,2),(1,3)} over BC, δ = (C|B), N = 2.
        let r = Relation::from_rows(vs(&[1, 2]), [[v(1), v(2)], [v(1), v(3)]]);
        let d = dom_of(&[&r]);
        let p = Measure::from_constraint(&r, &d, &MonTerm::new(vs(&[2]), vs(&[1])), 2).unwrap();
        assert_eq!(p.eval_at(vs(&[1, 2]), &[v(1), v(2)]), rat(1, 2));
        assert_eq!(p.eval_at(vs(&[1, 2]), &[v(1), v(3)]), rat(1, 2));
        assert!(p.is_sub_probability());
        assert!(Measure::from_constraint(&r, &d, &MonTerm::new(vs(&[2]), vs(&[1])), 1).is_err());
    }

    #[test]
    fn marginal_and_conditional() {
        let cd = vs(&[2, 3]);
        let rows = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .iter()
            .map(|&(a, b)| (vec![v(a), v(b)], rat(1, 4)))
            .collect();
        let p = Measure::from_rows(cd, rows);
        let m = p.marginal(vs(&[2]));
        assert_eq!(m.eval_at(vs(&[2]), &[v(1)]), rat(1, 2));
        assert_eq!(p.marginal(cd), p);
        let c = p.conditional(vs(&[2]));
        assert_eq!(c.eval_at(cd, &[v(2), v(1)]), rat(1, 2));
        assert_eq!(c.max_condition_mass(), rat_int(1));
    }

    #[test]
    fn widen_is_lazy() {
        let p = Measure::from_conditional_rows(vs(&[1]), vs(&[0]), vec![(vec![v(0), v(5)], rat(1, 3))]);
        let q = p.widen_condition(vs(&[2]));
        assert_eq!(q.x(), vs(&[0, 2]));
        assert_eq!(q.effective_x(), vs(&[0]));
        assert_eq!(q.eval_at(vs(&[0, 1, 2]), &[v(0), v(5), v(9)]), rat(1, 3));
        assert_eq!(p.widen_condition(VarSet::EMPTY), p);
    }

    #[test]
    fn truncation_boundary_is_inclusive() {
        let x = vs(&[0]);
        let px = Measure::from_rows(x, (0..4).map(|i| (vec![v(i)], rat(1, 4))).collect());
        let rows = (0..4).flat_map(|i| [(vec![v(i), v(10)], rat(1, 2)), (vec![v(i), v(11)], rat(1, 2))]).collect();
        let pyx = Measure::from_conditional_rows(vs(&[1]), x, rows);
        let b8 = Budget::new(1, 8u32.into());
        let full = Measure::truncated_product(&px, &pyx, &b8);
        assert_eq!(full.len(), 8);
        assert!(full.iter().all(|(_, w)| *w == rat(1, 8)));
        let b7 = Budget::new(1, 7u32.into());
        assert!(Measure::truncated_product(&px, &pyx, &b7).is_empty());
    }

    #[test]
    fn geometric_means() {
        let x = vs(&[0]);
        let p1 = Measure::from_rows(x, vec![(vec![v(0)], rat(1, 4))]);
        let p2 = Measure::from_rows(x, vec![(vec![v(0)], rat(1, 16))]);
        let g = geometric_mean(&[p1.clone(), p2.clone()]);
        assert!(g.weight_is(&[v(0)], &rat(1, 8)));
        let same = geometric_mean(&[p1.clone(), p1.clone(), p1.clone()]);
        assert!(same.weight_is(&[v(0)], &rat(1, 4)));
        let (mass, ok) = g.mass_bound(&[p1, p2]);
        assert!(ok && mass <= rat_int(1));
    }

    #[test]
    fn dump_format() {
        let p = Measure::from_rows(vs(&[0]), vec![(vec![v(3)], rat(2, 6))]);
        assert_eq!(p.dump(None), "3\t1\t3\n");
    }
}
