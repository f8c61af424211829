//! Dense two-phase simplex on a compact (nonbasic-columns-only) tableau.
//!
//! Maximizes `c·x` over `x ≥ 0` subject to `≤` rows with nonnegative
//! right-hand sides and arbitrary `=` rows. An optional secondary objective
//! is optimized over the optimal face of the primary one.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Clone, Debug, Default)]
pub struct Lp {
    n: usize,
    rows: Vec<(Vec<(usize, f64)>, RowKind, f64, f64)>,
    objective: Vec<f64>,
    secondary: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Structural variables that ended basic.
    pub basic: Vec<usize>,
    /// Shadow price of each row for the primary objective.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL: usize = 50;

impl Lp {
    pub fn new(n: usize) -> Self {
        Lp { n, rows: Vec::new(), objective: alloc::vec![0.0; n], secondary: None }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.n);
        self.objective = c;
    }

    /// Objective maximized among primary-optimal solutions.
    pub fn set_secondary(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.n);
        self.secondary = Some(c);
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        assert!(coeffs.iter().all(|&(j, _)| j < self.n));
        assert!(
            kind == RowKind::Eq || rhs >= 0.0,
            "inequality rows need a nonnegative right-hand side"
        );
        self.rows.push((coeffs, kind, rhs, 0.0));
    }

    /// A `≤` row solved as `a·x ≤ rhs + shift` until the final basis is
    /// known, then restored to `rhs`. Shifts steer the choice among
    /// optimal dual solutions: rows with small shifts get weight first.
    pub fn add_row_shifted(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64, shift: f64) {
        assert!(shift >= 0.0);
        self.add_row(coeffs, RowKind::Le, rhs);
        self.rows.last_mut().unwrap().3 = shift;
    }

    pub fn solve(&self) -> Result<Outcome> {
        let mut tab = Tableau::build(self);
        tab.run(self, true)
    }

    /// Solves with shifted right-hand sides and keeps the basis for
    /// [`Solver::add_rows`]; [`Solver::finish`] restores the exact program.
    pub fn solver(&self) -> Result<(Outcome, Solver)> {
        let mut tab = Tableau::build(self);
        let out = tab.run(self, false)?;
        Ok((out, Solver { tab, objective: self.objective.clone() }))
    }
}

/// An optimal basis that accepts extra `≤` rows and re-optimizes with the
/// dual simplex.
pub struct Solver {
    tab: Tableau,
    objective: Vec<f64>,
}

impl Solver {
    /// Appends `≤` rows `(a, rhs, shift)` and returns the new optimum of the
    /// shifted program.
    pub fn add_rows(&mut self, rows: Vec<(Vec<(usize, f64)>, f64, f64)>) -> Result<Outcome> {
        for (coeffs, b, shift) in rows {
            assert!(b >= 0.0 && shift >= 0.0);
            self.tab.append_le(&coeffs, b, shift);
        }
        self.reoptimize()
    }

    /// Drops every shift and returns the optimum of the exact program.
    pub fn finish(&mut self) -> Result<Outcome> {
        self.tab.restore_rhs();
        self.reoptimize()
    }

    fn reoptimize(&mut self) -> Result<Outcome> {
        if !self.tab.dual_cleanup()? {
            return Ok(Outcome::Infeasible);
        }
        Ok(Outcome::Optimal(self.tab.extract(&self.objective)))
    }
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Row-major, `m × ncols`.
    t: Vec<f64>,
    rhs: Vec<f64>,
    /// Unperturbed right-hand sides (after sign normalization).
    exact_rhs: Vec<f64>,
    /// Variable id basic in each row: `< n` structural, else `n + row`.
    basis: Vec<usize>,
    /// Variable id of each column.
    cols: Vec<usize>,
    /// Columns that may never enter (departed artificials).
    dead: Vec<bool>,
    /// Rows dropped as redundant.
    dropped: Vec<bool>,
    artificial: Vec<bool>,
    /// `−1` for equality rows negated to get a nonnegative right-hand side.
    signs: Vec<f64>,
    /// Objective rows: value and reduced costs.
    objs: Vec<(f64, Vec<f64>)>,
    n: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let m = lp.rows.len();
        let n = lp.n;
        let mut t = alloc::vec![0.0; m * n];
        let mut rhs = alloc::vec![0.0; m];
        let mut artificial = alloc::vec![false; n + m];
        let mut signs = alloc::vec![1.0; m];
        for (i, (coeffs, kind, b, shift)) in lp.rows.iter().enumerate() {
            let sign = if *kind == RowKind::Eq && *b < 0.0 { -1.0 } else { 1.0 };
            for &(j, a) in coeffs {
                t[i * n + j] += sign * a;
            }
            rhs[i] = sign * b;
            signs[i] = sign;
            if *kind == RowKind::Le {
                rhs[i] += shift + perturbation(i, *b);
            }
            artificial[n + i] = *kind == RowKind::Eq;
        }
        let exact_rhs = lp.rows.iter().zip(&signs).map(|((_, _, b, _), s)| s * b).collect();
        Tableau {
            m,
            ncols: n,
            t,
            rhs,
            exact_rhs,
            basis: (n..n + m).collect(),
            cols: (0..n).collect(),
            dead: alloc::vec![false; n],
            dropped: alloc::vec![false; m],
            artificial,
            signs,
            objs: Vec::new(),
            n,
            pivots: 0,
        }
    }

    fn run(&mut self, lp: &Lp, restore: bool) -> Result<Outcome> {
        // Objective 0: phase one, maximize −Σ artificials.
        let mut d1 = alloc::vec![0.0; self.ncols];
        let mut z1 = 0.0;
        for i in 0..self.m {
            if self.artificial[self.basis[i]] {
                z1 -= self.rhs[i];
                for (j, d) in d1.iter_mut().enumerate() {
                    *d += self.t[i * self.ncols + j];
                }
            }
        }
        self.objs.push((z1, d1));
        self.objs.push((0.0, lp.objective.clone()));
        if let Some(c2) = &lp.secondary {
            self.objs.push((0.0, c2.clone()));
        }

        if self.artificial.iter().any(|&a| a) {
            if self.optimize(0, None)? {
                return Err(Error::Lp(String::from("phase one reported unbounded")));
            }
            if self.objs[0].0 < -1e-7 {
                return Ok(Outcome::Infeasible);
            }
            self.evict_artificials();
        }
        if self.optimize(1, None)? {
            return Ok(Outcome::Unbounded);
        }
        if self.objs.len() > 2 && self.optimize(2, Some(1))? {
            return Err(Error::Lp(String::from("secondary objective unbounded on the optimal face")));
        }
        if restore {
            self.restore_rhs();
            if !self.dual_cleanup()? {
                return Ok(Outcome::Infeasible);
            }
        }
        Ok(Outcome::Optimal(self.extract(&lp.objective)))
    }

    fn extract(&self, objective: &[f64]) -> Solution {
        let mut x = alloc::vec![0.0; self.n];
        let mut basic = Vec::new();
        for i in 0..self.m {
            if !self.dropped[i] && self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs[i].max(0.0);
                basic.push(self.basis[i]);
            }
        }
        basic.sort_unstable();
        let mut duals = alloc::vec![0.0; self.m];
        let d = &self.objs[1].1;
        for (j, &id) in self.cols.iter().enumerate() {
            if id >= self.n && !self.dropped[id - self.n] {
                duals[id - self.n] = -d[j] * self.signs[id - self.n];
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Solution { x, value, basic, duals, pivots: self.pivots }
    }

    /// Adds `a·x ≤ b` with its slack basic, rewritten over the current
    /// nonbasic columns.
    fn append_le(&mut self, coeffs: &[(usize, f64)], b: f64, shift: f64) {
        let nc = self.ncols;
        let mut dense = alloc::vec![0.0; self.n];
        for &(j, a) in coeffs {
            dense[j] += a;
        }
        let mut row = alloc::vec![0.0; nc];
        for (c, &id) in self.cols.iter().enumerate() {
            if id < self.n {
                row[c] = dense[id];
            }
        }
        let mut rhs = b + shift + perturbation(self.m, b);
        for r in 0..self.m {
            let id = self.basis[r];
            if self.dropped[r] || id >= self.n || dense[id] == 0.0 {
                continue;
            }
            let f = dense[id];
            for (x, &y) in row.iter_mut().zip(&self.t[r * nc..(r + 1) * nc]) {
                *x -= f * y;
            }
            rhs -= f * self.rhs[r];
        }
        let id = self.n + self.m;
        self.t.extend_from_slice(&row);
        self.rhs.push(rhs);
        self.exact_rhs.push(b);
        self.basis.push(id);
        self.dropped.push(false);
        self.artificial.push(false);
        self.signs.push(1.0);
        self.m += 1;
    }

    /// Pivots objective `k` to optimality; true when unbounded. With `keep`,
    /// only columns with zero reduced cost in that objective may enter.
    fn optimize(&mut self, k: usize, keep: Option<usize>) -> Result<bool> {
        let mut stall = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp(String::from("pivot limit exceeded")));
            }
            let bland = stall >= STALL;
            let Some(s) = self.entering(k, keep, bland) else { return Ok(false) };
            let Some(r) = self.leaving(s) else { return Ok(true) };
            if self.rhs[r].abs() <= EPS {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(r, s);
        }
    }

    fn entering(&self, k: usize, keep: Option<usize>, bland: bool) -> Option<usize> {
        let d = &self.objs[k].1;
        let mut best: Option<usize> = None;
        for j in 0..self.ncols {
            if self.dead[j] || d[j] <= EPS {
                continue;
            }
            if let Some(p) = keep {
                if self.objs[p].1[j] < -EPS || self.objs[p].1[j] > EPS {
                    continue;
                }
            }
            best = match best {
                None => Some(j),
                Some(b) if bland => Some(if self.cols[j] < self.cols[b] { j } else { b }),
                Some(b) => Some(if d[j] > d[b] { j } else { b }),
            };
        }
        best
    }

    fn leaving(&self, s: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            if self.dropped[i] {
                continue;
            }
            let a = self.t[i * self.ncols + s];
            if a <= EPS {
                continue;
            }
            let ratio = self.rhs[i].max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((b, br)) => {
                    if ratio < br - 1e-12
                        || (ratio <= br + 1e-12 && self.basis[i] < self.basis[b])
                    {
                        Some((i, ratio))
                    } else {
                        Some((b, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        let nc = self.ncols;
        let p = self.t[r * nc + s];
        let inv = 1.0 / p;
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for x in row.iter_mut() {
                *x *= inv;
            }
            row[s] = inv;
        }
        self.rhs[r] *= inv;
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        let rr = self.rhs[r];
        for (i, row) in before
            .chunks_exact_mut(nc)
            .enumerate()
            .chain(after.chunks_exact_mut(nc).enumerate().map(|(i, x)| (i + r + 1, x)))
        {
            let f = row[s];
            if f == 0.0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            row[s] = -f * inv;
            self.rhs[i] -= f * rr;
        }
        for (z, d) in self.objs.iter_mut() {
            let f = d[s];
            if f == 0.0 {
                continue;
            }
            for (x, &y) in d.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            d[s] = -f * inv;
            *z += f * rr;
        }
        let leaving = self.basis[r];
        self.basis[r] = self.cols[s];
        self.cols[s] = leaving;
        self.dead[s] = self.artificial[leaving];
    }

    /// Replaces the perturbed right-hand side by `B⁻¹ b` for the exact `b`.
    fn restore_rhs(&mut self) {
        let nc = self.ncols;
        let mut rhs = alloc::vec![0.0; self.m];
        for (r, &id) in self.basis.iter().enumerate() {
            if id >= self.n {
                rhs[r] += self.exact_rhs[id - self.n];
            }
        }
        for (c, &id) in self.cols.iter().enumerate() {
            if id < self.n {
                continue;
            }
            let b = self.exact_rhs[id - self.n];
            if b == 0.0 {
                continue;
            }
            for (r, x) in rhs.iter_mut().enumerate() {
                *x += b * self.t[r * nc + c];
            }
        }
        for (r, x) in rhs.into_iter().enumerate() {
            if !self.dropped[r] {
                self.rhs[r] = x;
            }
        }
    }

    /// Dual simplex on the primary objective until the basis is primal
    /// feasible; false when no feasible basis exists.
    fn dual_cleanup(&mut self) -> Result<bool> {
        let nc = self.ncols;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp(String::from("pivot limit exceeded")));
            }
            let Some(r) = (0..self.m)
                .filter(|&i| !self.dropped[i] && self.rhs[i] < -EPS)
                .min_by(|&a, &b| self.rhs[a].partial_cmp(&self.rhs[b]).unwrap())
            else {
                return Ok(true);
            };
            let d = &self.objs[1].1;
            let mut col: Option<(usize, f64)> = None;
            for j in 0..nc {
                let a = self.t[r * nc + j];
                if self.dead[j] || a >= -EPS {
                    continue;
                }
                let ratio = d[j].min(0.0).abs() / -a;
                col = match col {
                    Some((b, rb))
                        if rb < ratio - 1e-12
                            || (rb <= ratio + 1e-12 && -self.t[r * nc + b] >= -a) =>
                    {
                        Some((b, rb))
                    }
                    _ => Some((j, ratio)),
                };
            }
            let col = col.map(|(j, _)| j);
            match col {
                Some(j) => self.pivot(r, j),
                None => return Ok(false),
            }
        }
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn evict_artificials(&mut self) {
        for i in 0..self.m {
            if !self.artificial[self.basis[i]] || self.dropped[i] {
                continue;
            }
            let nc = self.ncols;
            let col = (0..nc)
                .filter(|&j| !self.dead[j] && self.t[i * nc + j].abs() > 1e-7)
                .max_by(|&a, &b| {
                    self.t[i * nc + a].abs().partial_cmp(&self.t[i * nc + b].abs()).unwrap()
                });
            match col {
                Some(j) => self.pivot(i, j),
                None => self.dropped[i] = true,
            }
        }
    }
}

/// Deterministic right-hand-side shift that breaks ties between degenerate
/// vertices; removed again before the solution is read.
fn perturbation(i: usize, b: f64) -> f64 {
    let mut x = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    x ^= x >> 29;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 32;
    let u = (x % 1_000_000) as f64 / 1_000_000.0;
    1e-7 * (1.0 + u) * (1.0 + libm::fabs(b))
}
