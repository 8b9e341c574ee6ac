//! Bounded-variable revised primal simplex with a dense explicit basis inverse.
//!
//! Every row `i` carries a logical variable `r_i` with `a_i x - r_i = 0` and
//! bounds that encode the row sense, so the slack basis `-I` is always a valid
//! starting point. Phase 1 minimizes the sum of bound violations of the basic
//! variables; phase 2 the objective. The basis (and its inverse, while the row
//! set is unchanged) survives between calls, so re-solving after adding columns
//! or changing bounds starts from the previous optimum.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-6;
pub const INT_TOL: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const VERIFY_PIVOTS: usize = 30;
const DEGENERATE_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural values, indexed by column id.
    pub primal: Vec<f64>,
    /// Row duals (`d objective / d rhs`), indexed by row id.
    pub duals: Vec<f64>,
    /// Reduced costs of the structural columns.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Var {
    Col(usize),
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable held at zero.
    Zero,
}

#[derive(Debug, Clone)]
struct Column {
    cost: f64,
    lb: f64,
    ub: f64,
    entries: Vec<(usize, f64)>,
    status: Status,
}

#[derive(Debug, Clone)]
struct Row {
    lo: f64,
    hi: f64,
    sense: Sense,
    rhs: f64,
    status: Status,
}

#[derive(Debug, Clone)]
struct Factor {
    basic: Vec<Var>,
    /// Row-major `m x m` inverse of the basis matrix; row `k` belongs to `basic[k]`.
    inv: Vec<f64>,
    /// Pivots applied since the inverse was computed.
    pivots: usize,
}

/// Variable statuses captured from a solved program, used to warm-start a
/// related one. Rows and columns beyond the snapshot start basic and at a
/// bound respectively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    cols: Vec<Status>,
    rows: Vec<Status>,
}

/// A linear program `min c x` subject to sparse rows and variable bounds.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    cols: Vec<Column>,
    rows: Vec<Row>,
    basic: Vec<Var>,
    factor: Option<Factor>,
    iteration_limit: Option<usize>,
}

fn sense_bounds(sense: Sense, rhs: f64) -> (f64, f64) {
    match sense {
        Sense::Le => (f64::NEG_INFINITY, rhs),
        Sense::Ge => (rhs, f64::INFINITY),
        Sense::Eq => (rhs, rhs),
    }
}

fn nonbasic_status(lb: f64, ub: f64) -> Status {
    if lb.is_finite() {
        Status::Lower
    } else if ub.is_finite() {
        Status::Upper
    } else {
        Status::Zero
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_iteration_limit(&mut self, limit: Option<usize>) {
        self.iteration_limit = limit;
    }

    /// Adds an empty row and returns its id. Coefficients arrive with columns
    /// or through [`LinearProgram::set_coef`].
    pub fn add_row(&mut self, sense: Sense, rhs: f64) -> usize {
        let (lo, hi) = sense_bounds(sense, rhs);
        let id = self.rows.len();
        self.rows.push(Row { lo, hi, sense, rhs, status: Status::Basic });
        self.basic.push(Var::Row(id));
        self.factor = None;
        id
    }

    /// Adds a column with the given sparse coefficients. Entries for the same
    /// row are summed.
    pub fn add_col(&mut self, cost: f64, lb: f64, ub: f64, entries: &[(usize, f64)]) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        let mut sorted = entries.to_vec();
        sorted.sort_by_key(|e| e.0);
        for (r, v) in sorted {
            assert!(r < self.rows.len(), "column references unknown row {r}");
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += v,
                _ => merged.push((r, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        let id = self.cols.len();
        self.cols.push(Column { cost, lb, ub, entries: merged, status: nonbasic_status(lb, ub) });
        id
    }

    /// Sets a single coefficient on an existing column.
    pub fn set_coef(&mut self, row: usize, col: usize, value: f64) {
        let entries = &mut self.cols[col].entries;
        match entries.binary_search_by_key(&row, |e| e.0) {
            Ok(k) if value == 0.0 => {
                entries.remove(k);
            }
            Ok(k) => entries[k].1 = value,
            Err(k) if value != 0.0 => entries.insert(k, (row, value)),
            Err(_) => {}
        }
        if self.cols[col].status == Status::Basic {
            self.factor = None;
        }
    }

    pub fn coef(&self, row: usize, col: usize) -> f64 {
        let entries = &self.cols[col].entries;
        entries.binary_search_by_key(&row, |e| e.0).map(|k| entries[k].1).unwrap_or(0.0)
    }

    pub fn col_entries(&self, col: usize) -> &[(usize, f64)] {
        &self.cols[col].entries
    }

    pub fn cost(&self, col: usize) -> f64 {
        self.cols[col].cost
    }

    pub fn set_cost(&mut self, col: usize, cost: f64) {
        self.cols[col].cost = cost;
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.cols[col].lb, self.cols[col].ub)
    }

    pub fn set_bounds(&mut self, col: usize, lb: f64, ub: f64) {
        let c = &mut self.cols[col];
        c.lb = lb;
        c.ub = ub;
        if c.status != Status::Basic {
            c.status = match c.status {
                Status::Upper if ub.is_finite() => Status::Upper,
                _ => nonbasic_status(lb, ub),
            };
        }
    }

    pub fn row_sense(&self, row: usize) -> (Sense, f64) {
        (self.rows[row].sense, self.rows[row].rhs)
    }

    pub fn set_rhs(&mut self, row: usize, rhs: f64) {
        let r = &mut self.rows[row];
        r.rhs = rhs;
        let (lo, hi) = sense_bounds(r.sense, rhs);
        r.lo = lo;
        r.hi = hi;
        if r.status != Status::Basic {
            r.status = nonbasic_status(lo, hi);
        }
    }

    pub fn basis(&self) -> Basis {
        Basis { cols: self.cols.iter().map(|c| c.status).collect(), rows: self.rows.iter().map(|r| r.status).collect() }
    }

    pub fn set_basis(&mut self, basis: &Basis) {
        let fit = |s: Option<Status>, lb: f64, ub: f64| match s {
            Some(Status::Basic) => Status::Basic,
            Some(Status::Upper) if ub.is_finite() => Status::Upper,
            Some(Status::Lower) if lb.is_finite() => Status::Lower,
            _ => nonbasic_status(lb, ub),
        };
        for (j, c) in self.cols.iter_mut().enumerate() {
            c.status = fit(basis.cols.get(j).copied(), c.lb, c.ub);
        }
        for (i, r) in self.rows.iter_mut().enumerate() {
            r.status = if i < basis.rows.len() { fit(Some(basis.rows[i]), r.lo, r.hi) } else { Status::Basic };
        }
        let cols = self.cols.iter().enumerate().filter(|(_, c)| c.status == Status::Basic).map(|(j, _)| Var::Col(j));
        let rows = self.rows.iter().enumerate().filter(|(_, r)| r.status == Status::Basic).map(|(i, _)| Var::Row(i));
        self.basic = cols.chain(rows).collect();
        self.factor = None;
    }

    /// Removes the given rows. Remaining rows are renumbered in order; the
    /// returned vector maps old row ids to new ones.
    pub fn remove_rows(&mut self, remove: &[usize]) -> Vec<Option<usize>> {
        let mut map = vec![None; self.rows.len()];
        let mut drop = vec![false; self.rows.len()];
        for &r in remove {
            drop[r] = true;
        }
        let mut next = 0;
        for (r, slot) in map.iter_mut().enumerate() {
            if !drop[r] {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut rows = Vec::with_capacity(next);
        for (r, row) in std::mem::take(&mut self.rows).into_iter().enumerate() {
            if !drop[r] {
                rows.push(row);
            }
        }
        self.rows = rows;
        for col in &mut self.cols {
            col.entries.retain(|e| !drop[e.0]);
            for e in &mut col.entries {
                e.0 = map[e.0].unwrap();
            }
        }
        self.basic = self
            .basic
            .iter()
            .filter_map(|v| match *v {
                Var::Row(r) => map[r].map(Var::Row),
                c => Some(c),
            })
            .collect();
        self.factor = None;
        map
    }

    fn var_bounds(&self, v: Var) -> (f64, f64) {
        match v {
            Var::Col(j) => (self.cols[j].lb, self.cols[j].ub),
            Var::Row(i) => (self.rows[i].lo, self.rows[i].hi),
        }
    }

    fn var_status(&self, v: Var) -> Status {
        match v {
            Var::Col(j) => self.cols[j].status,
            Var::Row(i) => self.rows[i].status,
        }
    }

    fn set_status(&mut self, v: Var, s: Status) {
        match v {
            Var::Col(j) => self.cols[j].status = s,
            Var::Row(i) => self.rows[i].status = s,
        }
    }

    fn var_cost(&self, v: Var) -> f64 {
        match v {
            Var::Col(j) => self.cols[j].cost,
            Var::Row(_) => 0.0,
        }
    }

    fn nonbasic_value(&self, v: Var) -> f64 {
        let (lb, ub) = self.var_bounds(v);
        match self.var_status(v) {
            Status::Lower => lb,
            Status::Upper => ub,
            _ => 0.0,
        }
    }

    /// Dense copy of the constraint column of `v` in `out` (length m).
    fn load_column(&self, v: Var, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        match v {
            Var::Col(j) => {
                for &(r, a) in &self.cols[j].entries {
                    out[r] = a;
                }
            }
            Var::Row(i) => out[i] = -1.0,
        }
    }

    /// Chooses a nonsingular basis from the current candidates, filling
    /// dependent positions with logicals, then inverts it.
    fn refactor(&mut self) {
        let m = self.rows.len();
        let mut candidates: Vec<Var> = Vec::with_capacity(m);
        for v in std::mem::take(&mut self.basic) {
            if !candidates.contains(&v) {
                candidates.push(v);
            }
        }
        // Gaussian elimination to select independent columns.
        let k = candidates.len();
        let mut mat = vec![0.0; m * k];
        let mut buf = vec![0.0; m];
        for (c, &v) in candidates.iter().enumerate() {
            self.load_column(v, &mut buf);
            for r in 0..m {
                mat[r * k + c] = buf[r];
            }
        }
        let mut row_used = vec![false; m];
        let mut chosen: Vec<Var> = Vec::with_capacity(m);
        let mut rejected: Vec<Var> = Vec::new();
        for c in 0..k {
            let mut best = None;
            let mut best_abs = PIVOT_TOL * 10.0;
            for r in 0..m {
                if !row_used[r] && mat[r * k + c].abs() > best_abs {
                    best_abs = mat[r * k + c].abs();
                    best = Some(r);
                }
            }
            match best {
                None => rejected.push(candidates[c]),
                Some(p) => {
                    row_used[p] = true;
                    chosen.push(candidates[c]);
                    let pv = mat[p * k + c];
                    for r in 0..m {
                        if row_used[r] {
                            continue;
                        }
                        let f = mat[r * k + c] / pv;
                        if f != 0.0 {
                            for cc in c..k {
                                mat[r * k + cc] -= f * mat[p * k + cc];
                            }
                        }
                    }
                }
            }
        }
        for v in rejected {
            let (lb, ub) = self.var_bounds(v);
            self.set_status(v, nonbasic_status(lb, ub));
        }
        for (r, used) in row_used.iter().enumerate() {
            if !used {
                let v = Var::Row(r);
                chosen.push(v);
            }
        }
        for &v in &chosen {
            self.set_status(v, Status::Basic);
        }
        // Any variable still flagged basic but not chosen becomes nonbasic.
        for j in 0..self.cols.len() {
            if self.cols[j].status == Status::Basic && !chosen.contains(&Var::Col(j)) {
                self.cols[j].status = nonbasic_status(self.cols[j].lb, self.cols[j].ub);
            }
        }
        for i in 0..m {
            if self.rows[i].status == Status::Basic && !chosen.contains(&Var::Row(i)) {
                self.rows[i].status = nonbasic_status(self.rows[i].lo, self.rows[i].hi);
            }
        }

        // Gauss-Jordan inverse of the chosen basis.
        let mut b = vec![0.0; m * m];
        for (c, &v) in chosen.iter().enumerate() {
            self.load_column(v, &mut buf);
            for r in 0..m {
                b[r * m + c] = buf[r];
            }
        }
        let inv = invert(&mut b, m).expect("selected basis must be nonsingular");
        self.basic = chosen.clone();
        self.factor = Some(Factor { basic: chosen, inv, pivots: 0 });
    }

    fn ensure_statuses(&mut self) {
        // Columns added after the last solve are nonbasic; make sure every basic
        // flag matches membership in `basic`.
        let m = self.rows.len();
        if self.basic.len() != m {
            self.factor = None;
        }
        for &v in &self.basic.clone() {
            self.set_status(v, Status::Basic);
        }
    }

    /// Basic variable values `x_B = -B^{-1} N x_N`.
    fn compute_basic_values(&self, f: &Factor) -> Vec<f64> {
        let m = self.rows.len();
        let mut rhs = vec![0.0; m];
        for (j, col) in self.cols.iter().enumerate() {
            if col.status == Status::Basic {
                continue;
            }
            let x = self.nonbasic_value(Var::Col(j));
            if x != 0.0 {
                for &(r, a) in &col.entries {
                    rhs[r] -= a * x;
                }
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.status == Status::Basic {
                continue;
            }
            let x = self.nonbasic_value(Var::Row(i));
            rhs[i] += x;
        }
        let mut xb = vec![0.0; m];
        for k in 0..m {
            let rowk = &f.inv[k * m..(k + 1) * m];
            xb[k] = rowk.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        xb
    }

    pub fn solve(&mut self) -> LpSolution {
        let m = self.rows.len();
        let n = self.cols.len();
        self.ensure_statuses();
        if self.factor.is_none() || self.factor.as_ref().map(|f| f.basic.len()) != Some(m) {
            self.refactor();
        }
        let mut f = self.factor.take().unwrap();
        let mut xb = self.compute_basic_values(&f);

        let limit = self.iteration_limit.unwrap_or(50_000 + 50 * (m + n));
        let mut iterations = 0;
        let mut refresh = false;
        let mut degenerate = 0;
        let mut bland = false;
        let mut alpha = vec![0.0; m];
        let mut colbuf = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut cb = vec![0.0; m];
        let mut verified = false;

        let status = loop {
            if iterations >= limit {
                break LpStatus::IterationLimit;
            }
            if refresh || f.pivots >= REFACTOR_EVERY {
                self.basic = f.basic.clone();
                self.refactor();
                f = self.factor.take().unwrap();
                xb = self.compute_basic_values(&f);
                refresh = false;
            }

            // Phase selection.
            let mut infeasible = false;
            for k in 0..m {
                let (lb, ub) = self.var_bounds(f.basic[k]);
                cb[k] = if xb[k] < lb - FEAS_TOL {
                    infeasible = true;
                    -1.0
                } else if xb[k] > ub + FEAS_TOL {
                    infeasible = true;
                    1.0
                } else {
                    0.0
                };
            }
            if !infeasible {
                for k in 0..m {
                    cb[k] = self.var_cost(f.basic[k]);
                }
            }
            // y = c_B B^{-1}
            y.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..m {
                if cb[k] != 0.0 {
                    let rowk = &f.inv[k * m..(k + 1) * m];
                    for (yi, a) in y.iter_mut().zip(rowk) {
                        *yi += cb[k] * a;
                    }
                }
            }

            // Pricing.
            let mut entering: Option<(Var, f64)> = None;
            let mut best_score = 0.0;
            let mut consider = |v: Var, d: f64, status: Status, entering: &mut Option<(Var, f64)>| {
                let attractive = match status {
                    Status::Lower => d < -OPT_TOL,
                    Status::Upper => d > OPT_TOL,
                    Status::Zero => d.abs() > OPT_TOL,
                    Status::Basic => false,
                };
                if !attractive {
                    return;
                }
                if bland {
                    if entering.map_or(true, |(e, _)| v < e) {
                        *entering = Some((v, d));
                    }
                } else if d.abs() > best_score {
                    best_score = d.abs();
                    *entering = Some((v, d));
                }
            };
            for (j, col) in self.cols.iter().enumerate() {
                if col.status == Status::Basic {
                    continue;
                }
                if col.lb == col.ub {
                    continue;
                }
                let c = if infeasible { 0.0 } else { col.cost };
                let d = c - col.entries.iter().map(|&(r, a)| y[r] * a).sum::<f64>();
                consider(Var::Col(j), d, col.status, &mut entering);
            }
            for (i, row) in self.rows.iter().enumerate() {
                if row.status == Status::Basic || row.lo == row.hi {
                    continue;
                }
                consider(Var::Row(i), y[i], row.status, &mut entering);
            }

            let Some((q, dq)) = entering else {
                // Confirm on recomputed values, and on a fresh factorization
                // once the inverse has aged.
                if !verified {
                    verified = true;
                    if infeasible || f.pivots >= VERIFY_PIVOTS {
                        refresh = true;
                    } else {
                        xb = self.compute_basic_values(&f);
                    }
                    continue;
                }
                break if infeasible { LpStatus::Infeasible } else { LpStatus::Optimal };
            };
            verified = false;
            iterations += 1;
            f.pivots += 1;

            // alpha = B^{-1} a_q
            self.load_column(q, &mut colbuf);
            let nz: Vec<(usize, f64)> =
                colbuf.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(i, a)| (i, *a)).collect();
            for k in 0..m {
                let rowk = &f.inv[k * m..(k + 1) * m];
                alpha[k] = nz.iter().map(|&(i, a)| rowk[i] * a).sum();
            }
            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            let (qlb, qub) = self.var_bounds(q);

            // Ratio test.
            let mut theta = if qlb.is_finite() && qub.is_finite() { qub - qlb } else { f64::INFINITY };
            let mut leave: Option<(usize, bool)> = None; // (position, leaves at upper)
            let mut leave_pivot = 0.0;
            for k in 0..m {
                let delta = -dir * alpha[k];
                if delta.abs() <= PIVOT_TOL {
                    continue;
                }
                let (lb, ub) = self.var_bounds(f.basic[k]);
                let x = xb[k];
                let (ratio, at_upper) = if x < lb - FEAS_TOL {
                    if delta > 0.0 {
                        ((lb - x) / delta, false)
                    } else {
                        continue;
                    }
                } else if x > ub + FEAS_TOL {
                    if delta < 0.0 {
                        ((ub - x) / delta, true)
                    } else {
                        continue;
                    }
                } else if delta < 0.0 {
                    if !lb.is_finite() {
                        continue;
                    }
                    (((x - lb) / -delta).max(0.0), false)
                } else {
                    if !ub.is_finite() {
                        continue;
                    }
                    (((ub - x) / delta).max(0.0), true)
                };
                let better = match leave {
                    None => ratio < theta,
                    Some((pk, _)) => {
                        if ratio < theta - 1e-12 {
                            true
                        } else if ratio <= theta + 1e-12 {
                            if bland {
                                f.basic[k] < f.basic[pk]
                            } else {
                                delta.abs() > leave_pivot
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = ratio;
                    leave = Some((k, at_upper));
                    leave_pivot = delta.abs();
                }
            }

            if theta.is_infinite() {
                if infeasible {
                    // Should not happen; refresh numerics and retry.
                    refresh = true;
                    continue;
                }
                break LpStatus::Unbounded;
            }

            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            for k in 0..m {
                xb[k] -= theta * dir * alpha[k];
            }
            let xq = self.nonbasic_value(q) + dir * theta;

            match leave {
                None => {
                    // Bound flip of the entering variable.
                    let s = if dir > 0.0 { Status::Upper } else { Status::Lower };
                    self.set_status(q, s);
                }
                Some((r, at_upper)) => {
                    let out = f.basic[r];
                    let (lb, ub) = self.var_bounds(out);
                    let s = if at_upper {
                        if ub.is_finite() { Status::Upper } else { nonbasic_status(lb, ub) }
                    } else if lb.is_finite() {
                        Status::Lower
                    } else {
                        nonbasic_status(lb, ub)
                    };
                    self.set_status(out, s);
                    self.set_status(q, Status::Basic);
                    f.basic[r] = q;
                    xb[r] = xq;
                    // Update the inverse.
                    let pr = alpha[r];
                    let (head, tail) = f.inv.split_at_mut(r * m);
                    let (prow, rest) = tail.split_at_mut(m);
                    for v in prow.iter_mut() {
                        *v /= pr;
                    }
                    for k in 0..m {
                        if k == r || alpha[k] == 0.0 {
                            continue;
                        }
                        let a = alpha[k];
                        let rowk = if k < r {
                            &mut head[k * m..(k + 1) * m]
                        } else {
                            let off = (k - r - 1) * m;
                            &mut rest[off..off + m]
                        };
                        for (x, p) in rowk.iter_mut().zip(prow.iter()) {
                            *x -= a * p;
                        }
                    }
                }
            }
        };

        self.basic = f.basic.clone();
        let xb_final = xb;
        let mut primal = vec![0.0; n];
        for (j, slot) in primal.iter_mut().enumerate() {
            if self.cols[j].status != Status::Basic {
                *slot = self.nonbasic_value(Var::Col(j));
            }
        }
        for (k, &v) in f.basic.iter().enumerate() {
            if let Var::Col(j) = v {
                primal[j] = xb_final[k];
            }
        }
        // Phase-2 duals.
        let mut duals = vec![0.0; m];
        for k in 0..m {
            let c = self.var_cost(f.basic[k]);
            if c != 0.0 {
                let rowk = &f.inv[k * m..(k + 1) * m];
                for (yi, a) in duals.iter_mut().zip(rowk) {
                    *yi += c * a;
                }
            }
        }
        let reduced_costs = self
            .cols
            .iter()
            .map(|col| col.cost - col.entries.iter().map(|&(r, a)| duals[r] * a).sum::<f64>())
            .collect();
        let objective = self.cols.iter().zip(&primal).map(|(c, x)| c.cost * x).sum();
        self.factor = Some(f);
        LpSolution { status, objective, primal, duals, reduced_costs, iterations }
    }

    /// Plain-text dump for debugging:
    ///
    /// ```text
    /// min
    ///   <cost> x<j> ...
    /// rows
    ///   r<i>: <coef> x<j> ... <= | = | >= <rhs>
    /// bounds
    ///   <lb> <= x<j> <= <ub>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::from("min\n ");
        for (j, c) in self.cols.iter().enumerate() {
            if c.cost != 0.0 {
                let _ = write!(out, " {:+} x{}", c.cost, j);
            }
        }
        out.push_str("\nrows\n");
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.rows.len()];
        for (j, c) in self.cols.iter().enumerate() {
            for &(r, a) in &c.entries {
                by_row[r].push((j, a));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "  r{i}:");
            for &(j, a) in &by_row[i] {
                let _ = write!(out, " {a:+} x{j}");
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("bounds\n");
        for (j, c) in self.cols.iter().enumerate() {
            let _ = writeln!(out, "  {} <= x{} <= {}", c.lb, j, c.ub);
        }
        out
    }
}

/// In-place Gauss-Jordan inversion with partial pivoting.
fn invert(a: &mut [f64], m: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for c in 0..m {
        let mut p = c;
        let mut best = a[c * m + c].abs();
        for r in c + 1..m {
            if a[r * m + c].abs() > best {
                best = a[r * m + c].abs();
                p = r;
            }
        }
        if best < 1e-12 {
            return None;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
                inv.swap(p * m + k, c * m + k);
            }
        }
        let pv = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= pv;
            inv[c * m + k] /= pv;
        }
        for r in 0..m {
            if r == c {
                continue;
            }
            let f = a[r * m + c];
            if f != 0.0 {
                for k in 0..m {
                    a[r * m + k] -= f * a[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
    }
    Some(inv)
}
