//! Output-size certificates: the optimal Shannon-flow inequality for a set of
//! targets under degree constraints, and the budget `B` it induces.
//!
//! The linear program is solved in its coefficient form: variables are the
//! target weights `λ`, the constraint weights `w` and the elemental witness
//! weights, with one equality per nonempty variable set forcing
//! `Σ w·h(δ) − Σ λ·h(Z) − Σ m·h(μ) − Σ s·h(σ)` to vanish. Floating-point
//! optima are rationalized and then checked exactly, so no certificate ever
//! rests on float arithmetic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::degree::{DegreeConstraints, MonTerm};
use crate::lp::{Lp, Outcome, RowKind};
use crate::num::{best_rational, big_pow, log2_biguint, log2_rat, Rat};
use crate::shannon::{check_identity, IntegralInequality, Multiset, SubTerm, Witness};
use crate::vars::{VarNames, VarSet};
use crate::{Error, Result};

/// A verified Shannon-flow inequality `Σ λ_Z h(Z) ≤ Σ w_δ h(δ)`.
#[derive(Clone, Debug)]
pub struct BoundCertificate {
    pub targets: Vec<VarSet>,
    pub lambda: BTreeMap<VarSet, Rat>,
    pub w: BTreeMap<MonTerm, Rat>,
    /// The bound `B` exponent in bits, `Σ w_δ log2 N_δ`.
    pub exponent_bits: f64,
    /// Integral form scaled by the common denominator of every coefficient
    /// (including the witness).
    pub integral: IntegralInequality,
    pub witness: Witness,
    /// `N_δ` for every constraint used by the certificate.
    pub bounds: BTreeMap<MonTerm, u64>,
    /// Unconditional constraints dropped because `N_δ > B`.
    pub pruned: Vec<MonTerm>,
    /// Objective value reported by the float solver.
    pub lp_value: f64,
}

impl BoundCertificate {
    /// `Σ w_δ` when every constraint with positive weight shares the bound
    /// `n`: the exponent in `log_n` units.
    pub fn exponent_in(&self, n: u64) -> Option<Rat> {
        if n < 2 {
            return None;
        }
        let mut sum = Rat::zero();
        for (t, w) in &self.w {
            if w.is_zero() {
                continue;
            }
            if self.bounds[t] != n {
                return None;
            }
            sum += w;
        }
        Some(sum)
    }

    /// The exponent divided by `log2 n`.
    pub fn exponent_log(&self, n: u64) -> f64 {
        if n < 2 {
            return f64::NAN;
        }
        self.exponent_bits / libm::log2(n as f64)
    }

    /// Integral form multiplicities of `D` (a convenience view).
    pub fn d_multiplicity(&self, t: &MonTerm) -> u64 {
        self.integral.d.count(t)
    }

    pub fn render(&self, names: &VarNames) -> String {
        let mut lhs = Vec::new();
        for (z, l) in &self.lambda {
            lhs.push(alloc::format!("{l}*h({})", names.render(*z)));
        }
        let mut rhs = Vec::new();
        for (t, w) in &self.w {
            rhs.push(alloc::format!("{w}*h({})", t.render(names)));
        }
        alloc::format!("{} <= {}", lhs.join(" + "), rhs.join(" + "))
    }
}

/// `B^d` for the smallest `d` that makes `d·w` integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    pub d: u64,
    pub bd: BigUint,
    pub log2_b: f64,
    infinite: bool,
}

/// Width of the band around `log2 p = −log2 B` where the float comparison
/// is not trusted.
const GUARD: f64 = 1e-6;

impl Budget {
    /// A budget that admits every positive weight.
    pub fn infinite() -> Self {
        Budget { d: 1, bd: BigUint::zero(), log2_b: f64::INFINITY, infinite: true }
    }

    /// `B = bd^(1/d)`.
    pub fn new(d: u64, bd: BigUint) -> Self {
        assert!(d >= 1 && !bd.is_zero());
        let log2_b = log2_biguint(&bd) / d as f64;
        Budget { d, bd, log2_b, infinite: false }
    }

    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    /// `B` rounded down to an integer (for reporting and size checks).
    pub fn floor(&self) -> Option<BigUint> {
        if self.infinite {
            return None;
        }
        Some(self.bd.nth_root(self.d as u32))
    }

    /// Exact `x ≤ B` for a natural `x`.
    pub fn admits_count(&self, x: u64) -> bool {
        if self.infinite {
            return true;
        }
        big_pow(&BigUint::from(x), self.d) <= self.bd
    }

    /// Exact `p ≥ 1/B^k`.
    pub fn admits_power(&self, p: &Rat, k: u64) -> bool {
        if p.is_negative() || p.is_zero() {
            return false;
        }
        if self.infinite {
            return true;
        }
        let lp = log2_rat(p);
        let lhs = lp + self.log2_b * k as f64;
        if lhs > GUARD * (1.0 + k as f64) {
            return true;
        }
        if lhs < -GUARD * (1.0 + k as f64) {
            return false;
        }
        // a^d · bd^k ≥ b^d.
        let a = p.numer().magnitude();
        let b = p.denom().magnitude();
        big_pow(a, self.d) * big_pow(&self.bd, k) >= big_pow(b, self.d)
    }

    /// Exact `p ≥ 1/B`.
    pub fn geq(&self, p: &Rat) -> bool {
        self.admits_power(p, 1)
    }

    /// `N > B`, exactly.
    pub fn exceeded_by(&self, n: u64) -> bool {
        !self.infinite && big_pow(&BigUint::from(n), self.d) > self.bd
    }

    /// Digits of `B^d` in decimal.
    pub fn bd_digits(&self) -> String {
        if self.infinite {
            String::from("inf")
        } else {
            alloc::format!("{}", self.bd)
        }
    }
}

/// Exact `p ≥ 1/B` (free-function form).
pub fn budget_geq(p: &Rat, b: &Budget) -> bool {
    b.geq(p)
}

/// `d` = lcm of the denominators of `λ` and `w`; `B^d = ∏ N_δ^{d·w_δ}`.
pub fn make_budget(cert: &BoundCertificate) -> Budget {
    let mut d = BigInt::one();
    for r in cert.lambda.values().chain(cert.w.values()) {
        d = d.lcm(r.denom());
    }
    let mut bd = BigUint::one();
    for (t, w) in &cert.w {
        let e = (w * Rat::from_integer(d.clone())).to_integer();
        let e = e.to_u64().expect("budget exponent overflow");
        bd *= big_pow(&BigUint::from(cert.bounds[t]), e);
    }
    Budget::new(d.to_u64().expect("budget denominator overflow"), bd)
}

/// Relabels the variables mentioned by a problem onto `0..k`.
struct Compression {
    members: Vec<usize>,
}

impl Compression {
    fn new(universe: VarSet) -> Self {
        Compression { members: universe.iter().collect() }
    }

    fn k(&self) -> usize {
        self.members.len()
    }

    fn down(&self, s: VarSet) -> usize {
        let mut b = 0usize;
        for (i, &v) in self.members.iter().enumerate() {
            if s.contains(v) {
                b |= 1 << i;
            }
        }
        b
    }

    fn up(&self, bits: usize) -> VarSet {
        let mut s = VarSet::EMPTY;
        for (i, &v) in self.members.iter().enumerate() {
            if bits & (1 << i) != 0 {
                s = s.with(v);
            }
        }
        s
    }
}

/// Elemental terms over `k` compressed variables.
fn elementals(c: &Compression) -> (Vec<MonTerm>, Vec<SubTerm>) {
    let k = c.k();
    let all = (1usize << k) - 1;
    let mons = (0..k)
        .map(|i| MonTerm::new(c.up(1 << i), c.up(all & !(1 << i))))
        .collect();
    let mut subs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let rest = c.up(all & !(1 << i) & !(1 << j));
            for kk in rest.subsets() {
                subs.push(SubTerm::new(c.up(1 << i), c.up(1 << j), kk));
            }
        }
    }
    (mons, subs)
}

fn validate(targets: &[VarSet], dc: &DegreeConstraints) -> Result<Vec<VarSet>> {
    if targets.is_empty() {
        return Err(Error::InvalidInput(String::from("no targets")));
    }
    if targets.iter().any(|t| t.is_empty()) {
        return Err(Error::InvalidInput(String::from("empty target")));
    }
    if dc.is_empty() {
        return Err(Error::InvalidInput(String::from("no degree constraints")));
    }
    let mut t: Vec<VarSet> = targets.to_vec();
    t.sort();
    t.dedup();
    Ok(t)
}

/// Variables whose entropy the constraints bound: the closure of `∅` under
/// `X ⊆ K ⇒ K ∪ Y`.
pub fn bounded_closure(dc: &DegreeConstraints) -> VarSet {
    let mut k = VarSet::EMPTY;
    loop {
        let next = dc.iter().filter(|(t, _)| t.x.is_subset(k)).fold(k, |s, (t, _)| s.union(t.y));
        if next == k {
            return k;
        }
        k = next;
    }
}

fn unbounded_error(targets: &[VarSet], dc: &DegreeConstraints) -> Error {
    let k = bounded_closure(dc);
    let free = targets.iter().fold(VarSet::EMPTY, |s, t| s.union(t.difference(k)));
    Error::Unbounded(alloc::format!("{free:?}"))
}

/// Certificate coordinates: one per target, constraint and elemental term.
struct Columns {
    lambda: Vec<VarSet>,
    w: Vec<(MonTerm, u64)>,
    m: Vec<MonTerm>,
    s: Vec<SubTerm>,
}

impl Columns {
    fn len(&self) -> usize {
        self.lambda.len() + self.w.len() + self.m.len() + self.s.len()
    }

    /// Sparse coefficients of `h` (over compressed subsets, `h(∅)` dropped)
    /// in the identity `Σ w h(δ) − Σ λ h(Z) − Σ m h(μ) − Σ s h(σ) = 0`.
    fn column(&self, c: &Compression, j: usize) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(4);
        let mut push = |s: VarSet, k: i64| {
            if !s.is_empty() {
                out.push((c.down(s), k));
            }
        };
        let (nl, nw, nm) = (self.lambda.len(), self.w.len(), self.m.len());
        if j < nl {
            push(self.lambda[j], -1);
        } else if j < nl + nw {
            let t = self.w[j - nl].0;
            push(t.all(), 1);
            push(t.x, -1);
        } else if j < nl + nw + nm {
            let t = self.m[j - nl - nw];
            push(t.all(), -1);
            push(t.x, 1);
        } else {
            let t = self.s[j - nl - nw - nm];
            push(t.x.union(t.y), -1);
            push(t.x.union(t.z), -1);
            push(t.x.union(t.y).union(t.z), 1);
            push(t.x, 1);
        }
        out
    }
}

/// The set-function program `max t` s.t. `t ≤ h(Z)`, `h(Y|X) ≤ log2 N`
/// and the Shannon inequalities, restricted to the variables the
/// constraints bound. Elemental submodularities are added lazily: only
/// those the current optimum violates.
struct Program {
    comp: Compression,
    cols: Columns,
    all_subs: Vec<SubTerm>,
    active: Vec<bool>,
    cap: f64,
}

/// Rows added per round of separation.
const BATCH: usize = 400;
const VIOLATION: f64 = 1e-9;
const WITNESS_SHIFT: f64 = 1e-6;

struct Optimum {
    value: f64,
    /// Row duals in column order.
    y: Vec<f64>,
}

impl Program {
    /// `None` when no target is bounded.
    fn new(targets: &[VarSet], dc: &DegreeConstraints) -> Option<Self> {
        let k = bounded_closure(dc);
        let lambda: Vec<VarSet> = targets.iter().copied().filter(|t| t.is_subset(k)).collect();
        if lambda.is_empty() {
            return None;
        }
        let w: Vec<(MonTerm, u64)> = dc.iter().filter(|(t, _)| t.x.is_subset(k)).collect();
        let universe = lambda.iter().fold(VarSet::EMPTY, |s, t| s.union(*t));
        let universe = w.iter().fold(universe, |s, (t, _)| s.union(t.all()));
        let comp = Compression::new(universe);
        let (m, all_subs) = elementals(&comp);
        // Any feasible h has h(Z) ≤ h(K) ≤ Σ log2 N, so this cap never binds
        // at the optimum; it only keeps partial programs bounded.
        let cap = 1.0 + 2.0 * w.iter().map(|(_, n)| libm::log2(*n as f64)).sum::<f64>();
        let active = alloc::vec![false; all_subs.len()];
        Some(Program { comp, cols: Columns { lambda, w, m, s: Vec::new() }, all_subs, active, cap })
    }

    fn hcols(&self) -> usize {
        1usize << self.comp.k()
    }

    fn lp(&self) -> Lp {
        // Column 0 is t, column s ≥ 1 is h(s).
        let mut lp = Lp::new(self.hcols());
        let mut obj = alloc::vec![0.0; self.hcols()];
        obj[0] = 1.0;
        lp.set_objective(obj);
        for j in 0..self.cols.len() {
            // Row j is the transpose of certificate column j.
            let (row, rhs, shift) = self.row(j);
            lp.add_row_shifted(row, rhs, shift);
        }
        lp.add_row(alloc::vec![(0, 1.0)], RowKind::Le, self.cap);
        lp
    }

    /// Row `j`, its right-hand side and its shift (elemental rows only; the
    /// shift makes the dual prefer short witnesses).
    fn row(&self, j: usize) -> (Vec<(usize, f64)>, f64, f64) {
        let cols = &self.cols;
        let mut row: Vec<(usize, f64)> =
            cols.column(&self.comp, j).into_iter().map(|(s, k)| (s, k as f64)).collect();
        let (nl, nw, nm) = (cols.lambda.len(), cols.w.len(), cols.m.len());
        if j < nl {
            row.push((0, 1.0));
            (row, 0.0, 0.0)
        } else if j < nl + nw {
            (row, libm::log2(cols.w[j - nl].1 as f64), 0.0)
        } else if j < nl + nw + nm {
            (row, 0.0, WITNESS_SHIFT)
        } else {
            (row, 0.0, 3.0 * WITNESS_SHIFT)
        }
    }

    fn violated(&self, h: &[f64], tol: f64) -> Vec<usize> {
        let at = |s: VarSet| if s.is_empty() { 0.0 } else { h[self.comp.down(s)] };
        let mut v: Vec<(f64, usize)> = self
            .all_subs
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.active[*i])
            .filter_map(|(i, t)| {
                let xy = t.x.union(t.y);
                let xz = t.x.union(t.z);
                let gap = at(xy) + at(xz) - at(xy.union(t.z)) - at(t.x);
                (gap < -tol).then_some((gap, i))
            })
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.into_iter().take(BATCH).map(|(_, i)| i).collect()
    }

    fn solve(&mut self) -> Result<Optimum> {
        let (mut out, mut solver) = self.lp().solver()?;
        let base = self.cols.len();
        for _ in 0..=self.all_subs.len() / BATCH + 64 {
            let sol = match out {
                Outcome::Optimal(s) => s,
                _ => return Err(Error::Lp(String::from("set-function program lost feasibility"))),
            };
            let mut cuts = self.violated(&sol.x, 3.0 * WITNESS_SHIFT + VIOLATION);
            if cuts.is_empty() {
                let Outcome::Optimal(exact) = solver.finish()? else {
                    return Err(Error::Lp(String::from("set-function program lost feasibility")));
                };
                cuts = self.violated(&exact.x, VIOLATION);
                if cuts.is_empty() {
                    // Rows: certificate columns, the cap, then the cuts in order.
                    let mut y: Vec<f64> = exact.duals[..base].to_vec();
                    y.extend_from_slice(&exact.duals[base + 1..]);
                    let y = y.into_iter().map(|v| v.max(0.0)).collect();
                    return Ok(Optimum { value: exact.value, y });
                }
            }
            let mut rows = Vec::with_capacity(cuts.len());
            for i in cuts {
                self.active[i] = true;
                self.cols.s.push(self.all_subs[i]);
                rows.push(self.row(self.cols.len() - 1));
            }
            out = solver.add_rows(rows)?;
        }
        Err(Error::Lp(String::from("separation did not converge")))
    }
}

/// Solves for the optimal certificate and prunes unconditional constraints
/// with `N_δ > B` until none remain.
pub fn solve_bound(targets: &[VarSet], dc: &DegreeConstraints) -> Result<BoundCertificate> {
    let targets = validate(targets, dc)?;
    let mut active = dc.clone();
    let mut pruned = Vec::new();
    loop {
        let mut cert = solve_once(&targets, &active, dc)?;
        let budget = make_budget(&cert);
        let heavy: Vec<MonTerm> = active
            .iter()
            .filter(|(t, n)| t.is_unconditional() && budget.exceeded_by(*n))
            .map(|(t, _)| t)
            .collect();
        if heavy.is_empty() || heavy.len() == active.len() {
            pruned.sort();
            cert.pruned = pruned;
            return Ok(cert);
        }
        for t in heavy {
            active.remove(&t);
            pruned.push(t);
        }
    }
}

fn solve_once(
    targets: &[VarSet],
    dc: &DegreeConstraints,
    original: &DegreeConstraints,
) -> Result<BoundCertificate> {
    let mut prog = Program::new(targets, dc).ok_or_else(|| unbounded_error(targets, original))?;
    let mut opt = prog.solve()?;
    absorb_nonnegativity(&mut opt.y, &mut prog.cols, &prog.comp);
    let exact = rationalize(&opt.y, &prog.cols, &prog.comp)
        .or_else(|| {
            let support: Vec<usize> = (0..opt.y.len()).filter(|&j| opt.y[j] > 1e-9).collect();
            exact_on_support(&support, &prog.cols, &prog.comp)
        })
        .ok_or_else(|| {
            Error::RationalizationFailed(String::from(
                "no rational point near the float optimum satisfies the identity",
            ))
        })?;
    certificate(targets, &prog.cols, &exact, opt.value)
}

/// The program's variables are nonnegative, so its duals may leave a
/// positive coefficient on some `h(S)` that the separated Shannon rows do
/// not account for. Each such `h(S) ≥ 0` becomes a monotonicity term
/// `(S|∅)`.
fn absorb_nonnegativity(y: &mut Vec<f64>, cols: &mut Columns, comp: &Compression) {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (j, v) in y.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        for (s, k) in cols.column(comp, j) {
            *acc.entry(s).or_insert(0.0) += v * k as f64;
        }
    }
    let at = cols.lambda.len() + cols.w.len() + cols.m.len();
    let extra: Vec<(usize, f64)> = acc.into_iter().filter(|&(_, r)| r > 1e-9).collect();
    for (i, (s, r)) in extra.into_iter().enumerate() {
        cols.m.push(MonTerm::unconditional(comp.up(s)));
        y.insert(at + i, r);
    }
}

/// Rounds by continued fractions with growing denominators until the exact
/// identity and `Σλ = 1` hold.
fn rationalize(y: &[f64], cols: &Columns, comp: &Compression) -> Option<Vec<Rat>> {
    for max_den in [1u64, 2, 6, 12, 60, 420, 2520, 10_000, 100_000, 1_000_000] {
        let r: Vec<Rat> = y
            .iter()
            .map(|&v| if v < 1e-10 { Rat::zero() } else { best_rational(v, max_den) })
            .collect();
        if satisfies_rows(&r, cols, comp) {
            return Some(r);
        }
    }
    None
}

fn satisfies_rows(r: &[Rat], cols: &Columns, comp: &Compression) -> bool {
    let sum: Rat = r[..cols.lambda.len()].iter().sum();
    if !sum.is_one() || r.iter().any(Signed::is_negative) {
        return false;
    }
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
    for (j, v) in r.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for (s, k) in cols.column(comp, j) {
            *acc.entry(s).or_insert_with(Rat::zero) += v * Rat::from_integer(BigInt::from(k));
        }
    }
    acc.values().all(Zero::is_zero)
}

/// Solves the identity exactly on the coordinates the float optimum left
/// positive, by Gaussian elimination over the rationals.
fn exact_on_support(support: &[usize], cols: &Columns, comp: &Compression) -> Option<Vec<Rat>> {
    let ncols = support.len();
    let nl = cols.lambda.len();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut a: Vec<Vec<Rat>> = Vec::new();
    for (c, &j) in support.iter().enumerate() {
        for (s, k) in cols.column(comp, j) {
            let r = *index.entry(s).or_insert_with(|| {
                a.push(alloc::vec![Rat::zero(); ncols + 1]);
                a.len() - 1
            });
            a[r][c] += Rat::from_integer(BigInt::from(k));
        }
    }
    let mut norm = alloc::vec![Rat::zero(); ncols + 1];
    for (c, &j) in support.iter().enumerate() {
        if j < nl {
            norm[c] = Rat::one();
        }
    }
    norm[ncols] = Rat::one();
    a.push(norm);
    let mut pivot_row_of_col = alloc::vec![usize::MAX; ncols];
    let mut row = 0;
    for c in 0..ncols {
        let Some(p) = (row..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        let prow = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i != row && !r[c].is_zero() {
                let f = r[c].clone();
                for (x, y) in r.iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivot_row_of_col[c] = row;
        row += 1;
    }
    if a[row..].iter().any(|r| !r[ncols].is_zero()) {
        return None;
    }
    let mut x = alloc::vec![Rat::zero(); cols.len()];
    for (c, &j) in support.iter().enumerate() {
        if pivot_row_of_col[c] != usize::MAX {
            x[j] = a[pivot_row_of_col[c]][ncols].clone();
        }
    }
    satisfies_rows(&x, cols, comp).then_some(x)
}

fn certificate(targets: &[VarSet], cols: &Columns, x: &[Rat], lp_value: f64) -> Result<BoundCertificate> {
    let nl = cols.lambda.len();
    let nw = cols.w.len();
    let nm = cols.m.len();
    let mut scale = BigInt::one();
    for v in x {
        scale = scale.lcm(v.denom());
    }
    let mult = |v: &Rat| -> u64 {
        (v * Rat::from_integer(scale.clone())).to_integer().to_u64().expect("multiplicity overflow")
    };
    let mut lambda: BTreeMap<VarSet, Rat> = targets.iter().map(|t| (*t, Rat::zero())).collect();
    let mut z = Multiset::new();
    for (i, t) in cols.lambda.iter().enumerate() {
        lambda.insert(*t, x[i].clone());
        z.add(*t, mult(&x[i]));
    }
    let mut w = BTreeMap::new();
    let mut d = Multiset::new();
    let mut bounds = BTreeMap::new();
    let mut exponent_bits = 0.0;
    for (i, (t, n)) in cols.w.iter().enumerate() {
        let v = &x[nl + i];
        if v.is_zero() {
            continue;
        }
        exponent_bits += crate::num::rat_to_f64(v) * libm::log2(*n as f64);
        w.insert(*t, v.clone());
        bounds.insert(*t, *n);
        d.add(*t, mult(v));
    }
    let mut witness = Witness::default();
    for (i, t) in cols.m.iter().enumerate() {
        witness.m.add(*t, mult(&x[nl + nw + i]));
    }
    for (i, t) in cols.s.iter().enumerate() {
        witness.s.add(*t, mult(&x[nl + nw + nm + i]));
    }
    let integral = IntegralInequality { z, d };
    if !check_identity(&integral, &witness) {
        return Err(Error::RationalizationFailed(String::from(
            "integral form fails the identity check",
        )));
    }
    Ok(BoundCertificate {
        targets: targets.to_vec(),
        lambda,
        w,
        exponent_bits,
        integral,
        witness,
        bounds,
        pruned: Vec::new(),
        lp_value,
    })
}

/// `max_{h ⊨ (Δ,N)} min_Z h(Z)` in bits, from the set-function program
/// alone (no certificate is read back).
pub fn primal_value(targets: &[VarSet], dc: &DegreeConstraints) -> Result<f64> {
    let targets = validate(targets, dc)?;
    let mut prog = Program::new(&targets, dc).ok_or_else(|| unbounded_error(&targets, dc))?;
    Ok(prog.solve()?.value)
}
