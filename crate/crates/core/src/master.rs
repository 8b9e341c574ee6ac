//! Restricted master problem and the column-generation loop.

use std::collections::{BTreeMap, HashMap};

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::column::{Column, ColumnKey, Delivery};
use crate::duals::{BranchDual, BranchTerm, DualPrices};
use crate::error::{Error, Result};
use crate::first_echelon::{enumerate_routes, FirstEchelonRoute};
use crate::lp::{solve_milp, Basis, LinearProgram, LpSolution, LpStatus, MilpLimits, Sense};
use crate::model::Instance;
use crate::pricing::{
    heuristic_labeler_1, heuristic_labeler_2, select_columns, solve_pricing, tabu_pricer, PricingConfig, PricingGraph,
};
use crate::solution::{DeliveryAmount, FirstLeg, PeriodPlan, RoutePlan, Solution, Transfer};

pub const ARTIFICIAL_COST: f64 = 1e7;
const ARTIFICIAL_TOL: f64 = 1e-6;
const VALUE_TOL: f64 = 1e-9;

/// First-echelon aggregates a branching row can restrict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FirstTerm {
    /// All routes over all periods.
    Total,
    Period(usize),
    /// Visits to a satellite over all periods.
    Satellite(usize),
}

impl FirstTerm {
    fn coefficient(&self, route: &FirstEchelonRoute, t: usize) -> f64 {
        match *self {
            FirstTerm::Total => 1.0,
            FirstTerm::Period(p) => (p == t) as u8 as f64,
            FirstTerm::Satellite(s) => route.visits(s) as u8 as f64,
        }
    }
}

/// A node restriction imposed on the master.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Restriction {
    First { term: FirstTerm, sense: Sense, rhs: f64 },
    Second { term: BranchTerm, sense: Sense, rhs: f64 },
    /// Bounds on one `λ_p^t`.
    Lambda { route: usize, period: usize, lb: f64, ub: f64 },
}

impl Restriction {
    fn has_artificial(&self) -> bool {
        match self {
            Restriction::First { sense, .. } | Restriction::Second { sense, .. } => *sense != Sense::Le,
            Restriction::Lambda { .. } => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColgenConfig {
    pub pricing: PricingConfig,
    pub max_iterations: usize,
    /// Run the heuristic pricers before and between exact rounds.
    pub heuristics: bool,
}

impl Default for ColgenConfig {
    fn default() -> Self {
        ColgenConfig { pricing: PricingConfig::default(), max_iterations: 10_000, heuristics: true }
    }
}

#[derive(Debug, Clone)]
pub struct ColgenOutcome {
    /// False when the node LP has no solution without artificial variables.
    pub feasible: bool,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub iterations: usize,
    pub columns_added: usize,
    /// Every exact pricing call of the final round completed within the label cap.
    pub proven: bool,
}

#[derive(Debug, Clone)]
struct Rows {
    mp2: Vec<Vec<usize>>,
    mp3: Vec<Vec<Option<usize>>>,
    mp5: Vec<Vec<usize>>,
    mp8: Vec<Vec<usize>>,
    mp10: Vec<usize>,
}

#[derive(Debug, Clone)]
struct BranchRow {
    restriction: Restriction,
    row: usize,
}

/// The RMP: ψ transfers, first-echelon λ, the global α column pool and artificials.
#[derive(Debug, Clone)]
pub struct Master<'a> {
    inst: &'a Instance,
    config: ColgenConfig,
    routes: Vec<FirstEchelonRoute>,
    lp: LinearProgram,
    rows: Rows,
    /// `psi[s][t][l]`, `t` in 1..=horizon+1, `l` in 0..=min(t, horizon).
    psi: Vec<Vec<Vec<Option<usize>>>>,
    /// `lambda[p][t]`.
    lambda: Vec<Vec<usize>>,
    artificials: Vec<usize>,
    columns: Vec<Column>,
    column_ids: Vec<usize>,
    keys: HashMap<ColumnKey, usize>,
    branch: Vec<BranchRow>,
    use_labeler_1: Vec<bool>,
    iterations: usize,
}

fn psi_cost(inst: &Instance, s: usize, t: usize, l: usize) -> f64 {
    let tau = inst.horizon();
    let held = (t - 1).min(tau) as i64 - l.max(1) as i64 + 1;
    inst.satellite(s).holding_cost * held.max(0) as f64
}

/// Round trips covering each positive residual demand in its own period,
/// moving to the next satellite when the current one would exceed its
/// capacity or a first-echelon vehicle load.
pub fn initial_columns(inst: &Instance) -> Vec<Column> {
    let q1 = inst.first_fleet().capacity;
    let q2 = inst.second_fleet().capacity;
    let mut out = Vec::new();
    for t in 1..=inst.horizon() {
        let mut s = 0;
        let mut used = 0;
        for c in 0..inst.n_customers() {
            let need = inst.periods(c).residual_demand[t];
            let Some(ub) = inst.periods(c).ub(t, t) else { continue };
            let q = need.min(ub).min(q2);
            if q <= 0 {
                continue;
            }
            let limit = inst.satellite(s).capacity.min(q1);
            if used + q > limit && s + 1 < inst.n_satellites() {
                s += 1;
                used = 0;
            }
            used += q;
            if let Ok(col) = Column::new(inst, s, t, vec![c], vec![Delivery { customer: c, target: t, quantity: q }]) {
                out.push(col);
            }
        }
    }
    out
}

impl<'a> Master<'a> {
    pub fn new(inst: &'a Instance, config: ColgenConfig) -> Result<Self> {
        let mut m = Self::empty(inst, config)?;
        for col in initial_columns(inst) {
            m.add_column(col);
        }
        Ok(m)
    }

    /// The RMP without any second-echelon column.
    pub fn empty(inst: &'a Instance, config: ColgenConfig) -> Result<Self> {
        let tau = inst.horizon();
        let (ns, nc) = (inst.n_satellites(), inst.n_customers());
        let routes = enumerate_routes(inst);
        let q1 = inst.first_fleet().capacity as f64;
        let mut lp = LinearProgram::new();
        let per_st = |lp: &mut LinearProgram, sense: Sense, rhs: &dyn Fn(usize) -> f64| -> Vec<Vec<usize>> {
            (0..ns).map(|s| (0..=tau).map(|t| if t == 0 { usize::MAX } else { lp.add_row(sense, rhs(s)) }).collect()).collect()
        };
        let mp2 = per_st(&mut lp, Sense::Eq, &|_| 0.0);
        let mp3: Vec<Vec<Option<usize>>> = (0..nc)
            .map(|c| {
                let d = &inst.periods(c).residual_demand;
                (0..=tau).map(|h| (h > 0 && d[h] > 0).then(|| lp.add_row(Sense::Eq, d[h] as f64))).collect()
            })
            .collect();
        let mp4 = per_st(&mut lp, Sense::Le, &|s| inst.satellite(s).capacity as f64);
        let mp5: Vec<Vec<usize>> = (0..nc)
            .map(|c| {
                let inv = &inst.periods(c).residual_inventory;
                let cap = inst.customer(c).capacity;
                (0..=tau)
                    .map(|h| if h == 0 { usize::MAX } else { lp.add_row(Sense::Le, (cap - inv[h] - inst.demand(c, h)) as f64) })
                    .collect()
            })
            .collect();
        let mp6: Vec<Vec<usize>> = routes
            .iter()
            .map(|r| {
                let k = r.satellites.len() as f64;
                (0..=tau).map(|l| if l == 0 { usize::MAX } else { lp.add_row(Sense::Le, q1 * k) }).collect()
            })
            .collect();
        let mp7 = per_st(&mut lp, Sense::Le, &|_| 1.0);
        let mp8: Vec<Vec<usize>> =
            (0..nc).map(|_| (0..=tau).map(|t| if t == 0 { usize::MAX } else { lp.add_row(Sense::Le, 1.0) }).collect()).collect();
        let mp9: Vec<usize> = (0..=tau)
            .map(|t| if t == 0 { usize::MAX } else { lp.add_row(Sense::Le, inst.first_fleet().vehicles as f64) })
            .collect();
        let mp10: Vec<usize> = (0..=tau)
            .map(|t| if t == 0 { usize::MAX } else { lp.add_row(Sense::Le, inst.second_fleet().vehicles as f64) })
            .collect();
        let mp11: Vec<usize> = (0..ns).map(|s| lp.add_row(Sense::Eq, inst.satellite(s).initial_inventory as f64)).collect();
        let mp12 = per_st(&mut lp, Sense::Le, &|_| 0.0);
        let mp19 = per_st(&mut lp, Sense::Ge, &|_| 0.0);

        let mut psi = vec![vec![vec![None; tau + 1]; tau + 2]; ns];
        for s in 0..ns {
            for t in 1..=tau + 1 {
                for l in 0..=t.min(tau) {
                    let mut e = Vec::new();
                    if t <= tau {
                        e.push((mp2[s][t], 1.0));
                    }
                    for k in l.max(1)..=t.min(tau) {
                        e.push((mp4[s][k], 1.0));
                    }
                    if l == 0 {
                        e.push((mp11[s], 1.0));
                    } else {
                        for (p, r) in routes.iter().enumerate() {
                            if r.visits(s) {
                                e.push((mp6[p][l], 1.0));
                            }
                        }
                        e.push((mp12[s][l], 1.0));
                        e.push((mp19[s][l], 1.0));
                    }
                    psi[s][t][l] = Some(lp.add_col(psi_cost(inst, s, t, l), 0.0, f64::INFINITY, &e));
                }
            }
        }
        let lambda: Vec<Vec<usize>> = routes
            .iter()
            .enumerate()
            .map(|(p, r)| {
                (0..=tau)
                    .map(|t| {
                        if t == 0 {
                            return usize::MAX;
                        }
                        let mut e = vec![(mp6[p][t], q1 * (r.satellites.len() as f64 - 1.0)), (mp9[t], 1.0)];
                        for &s in &r.satellites {
                            e.push((mp7[s][t], 1.0));
                            e.push((mp12[s][t], -q1));
                            e.push((mp19[s][t], -1.0));
                        }
                        e.retain(|x| x.1 != 0.0);
                        lp.add_col(r.cost, 0.0, 1.0, &e)
                    })
                    .collect()
            })
            .collect();
        let mut artificials = Vec::new();
        for s in 0..ns {
            for t in 1..=tau {
                artificials.push(lp.add_col(ARTIFICIAL_COST, 0.0, f64::INFINITY, &[(mp2[s][t], -1.0)]));
            }
        }
        for row in mp3.iter().flatten().flatten() {
            artificials.push(lp.add_col(ARTIFICIAL_COST, 0.0, f64::INFINITY, &[(*row, 1.0)]));
        }
        let base_rows = lp.n_rows();
        if base_rows != expected_rows(inst, routes.len()) {
            return Err(Error::Build(format!("master has {base_rows} rows, expected {}", expected_rows(inst, routes.len()))));
        }
        Ok(Master {
            inst,
            config,
            use_labeler_1: vec![true; ns * tau],
            routes,
            lp,
            rows: Rows { mp2, mp3, mp5, mp8, mp10 },
            psi,
            lambda,
            artificials,
            columns: Vec::new(),
            column_ids: Vec::new(),
            keys: HashMap::new(),
            branch: Vec::new(),
            iterations: 0,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn config(&self) -> &ColgenConfig {
        &self.config
    }

    pub fn routes(&self) -> &[FirstEchelonRoute] {
        &self.routes
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn n_rows(&self) -> usize {
        self.lp.n_rows()
    }

    pub fn lambda_id(&self, p: usize, t: usize) -> usize {
        self.lambda[p][t]
    }

    pub fn column_id(&self, k: usize) -> usize {
        self.column_ids[k]
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn restrictions(&self) -> Vec<Restriction> {
        self.branch.iter().map(|b| b.restriction).collect()
    }

    /// Adds `col` to the pool unless an identical column is already there.
    pub fn add_column(&mut self, col: Column) -> bool {
        let key = col.key();
        if self.keys.contains_key(&key) {
            return false;
        }
        let (s, t) = (col.satellite, col.period);
        let tau = self.inst.horizon();
        let mut e = vec![(self.rows.mp2[s][t], -(col.load() as f64)), (self.rows.mp10[t], 1.0)];
        let mut by_customer: BTreeMap<usize, Vec<&Delivery>> = BTreeMap::new();
        for d in &col.deliveries {
            by_customer.entry(d.customer).or_default().push(d);
        }
        for &c in &col.route {
            e.push((self.rows.mp8[c][t], 1.0));
            let ds = by_customer.get(&c).map(Vec::as_slice).unwrap_or(&[]);
            for d in ds {
                if let Some(row) = self.rows.mp3[c].get(d.target).copied().flatten() {
                    e.push((row, d.quantity as f64));
                }
            }
            for h in t..=tau {
                let later: i64 = ds.iter().filter(|d| d.target > h).map(|d| d.quantity).sum();
                if later != 0 {
                    e.push((self.rows.mp5[c][h], later as f64));
                }
            }
        }
        for b in &self.branch {
            if let Restriction::Second { term, .. } = b.restriction {
                let v = term.coefficient(self.inst, &col);
                if v != 0.0 {
                    e.push((b.row, v));
                }
            }
        }
        e.retain(|x| x.1 != 0.0);
        let ub = if self.forbids(&col) { 0.0 } else { f64::INFINITY };
        let id = self.lp.add_col(col.cost, 0.0, ub, &e);
        self.keys.insert(key, self.columns.len());
        self.column_ids.push(id);
        self.columns.push(col);
        true
    }

    fn forbidden_edges(&self, t: usize) -> Vec<(usize, usize)> {
        self.branch
            .iter()
            .filter_map(|b| match b.restriction {
                Restriction::Second { term: BranchTerm::Edge { period, a, b }, sense: Sense::Le, rhs } if period == t && rhs < 0.5 => {
                    Some((a, b))
                }
                _ => None,
            })
            .collect()
    }

    fn forbids(&self, col: &Column) -> bool {
        let f = self.forbidden_edges(col.period);
        !f.is_empty() && col.edges(self.inst).iter().any(|e| f.iter().any(|&(a, b)| crate::column::edge(a, b) == *e))
    }

    /// Replaces the node restrictions. Bounds changed by earlier restrictions are reset.
    pub fn set_restrictions(&mut self, restrictions: &[Restriction]) {
        let old: Vec<usize> = self.branch.iter().map(|b| b.row).collect();
        if !old.is_empty() {
            self.lp.remove_rows(&old);
        }
        self.branch.clear();
        for a in self.artificials.clone().into_iter().skip(self.base_artificials()) {
            self.lp.set_bounds(a, 0.0, 0.0);
        }
        for p in 0..self.routes.len() {
            for t in 1..=self.inst.horizon() {
                self.lp.set_bounds(self.lambda[p][t], 0.0, 1.0);
            }
        }
        for r in restrictions {
            match *r {
                Restriction::Lambda { route, period, lb, ub } => {
                    let id = self.lambda[route][period];
                    let (l0, u0) = self.lp.bounds(id);
                    self.lp.set_bounds(id, l0.max(lb), u0.min(ub));
                }
                Restriction::First { term, sense, rhs } => {
                    let row = self.lp.add_row(sense, rhs);
                    for (p, route) in self.routes.iter().enumerate() {
                        for t in 1..=self.inst.horizon() {
                            let v = term.coefficient(route, t);
                            if v != 0.0 {
                                self.lp.set_coef(row, self.lambda[p][t], v);
                            }
                        }
                    }
                    self.add_branch_artificial(row, sense);
                    self.branch.push(BranchRow { restriction: *r, row });
                }
                Restriction::Second { term, sense, rhs } => {
                    let row = self.lp.add_row(sense, rhs);
                    for (k, col) in self.columns.iter().enumerate() {
                        let v = term.coefficient(self.inst, col);
                        if v != 0.0 {
                            self.lp.set_coef(row, self.column_ids[k], v);
                        }
                    }
                    self.add_branch_artificial(row, sense);
                    self.branch.push(BranchRow { restriction: *r, row });
                }
            }
        }
        for k in 0..self.columns.len() {
            let ub = if self.forbids(&self.columns[k]) { 0.0 } else { f64::INFINITY };
            self.lp.set_bounds(self.column_ids[k], 0.0, ub);
        }
    }

    fn base_artificials(&self) -> usize {
        let tau = self.inst.horizon();
        self.inst.n_satellites() * tau + self.rows.mp3.iter().flatten().flatten().count()
    }

    /// Reuses an artificial left without a row by an earlier reset when one is free.
    fn add_branch_artificial(&mut self, row: usize, sense: Sense) {
        if sense == Sense::Le {
            return;
        }
        let in_use = self.base_artificials() + self.branch.iter().filter(|b| b.restriction.has_artificial()).count();
        match self.artificials.get(in_use) {
            Some(&a) => {
                self.lp.set_coef(row, a, 1.0);
                self.lp.set_bounds(a, 0.0, f64::INFINITY);
            }
            None => {
                let a = self.lp.add_col(ARTIFICIAL_COST, 0.0, f64::INFINITY, &[(row, 1.0)]);
                self.artificials.push(a);
            }
        }
    }

    pub fn basis(&self) -> Basis {
        self.lp.basis()
    }

    /// Warm-starts the next solve from `basis`, typically the parent node's.
    pub fn set_basis(&mut self, basis: &Basis) {
        self.lp.set_basis(basis);
    }

    pub fn solve_lp(&mut self) -> LpSolution {
        self.lp.solve()
    }

    pub fn duals(&self, sol: &LpSolution) -> DualPrices {
        let inst = self.inst;
        let y = &sol.duals;
        let mut d = DualPrices::zero(inst);
        for t in 1..=inst.horizon() {
            for s in 0..inst.n_satellites() {
                d.pi2[s][t] = y[self.rows.mp2[s][t]];
            }
            for c in 0..inst.n_customers() {
                if let Some(r) = self.rows.mp3[c][t] {
                    d.pi3[c][t] = y[r];
                }
                d.pi5[c][t] = y[self.rows.mp5[c][t]];
                d.pi8[c][t] = y[self.rows.mp8[c][t]];
            }
            d.pi10[t] = y[self.rows.mp10[t]];
        }
        for b in &self.branch {
            if let Restriction::Second { term, .. } = b.restriction {
                d.branch.push(BranchDual { term, dual: y[b.row] });
            }
        }
        d
    }

    pub fn artificial_total(&self, primal: &[f64]) -> f64 {
        self.artificials.iter().map(|&a| primal[a]).sum()
    }

    fn subproblems(&self) -> Vec<(usize, usize)> {
        let tau = self.inst.horizon();
        (0..self.inst.n_satellites()).flat_map(|s| (1..=tau).map(move |t| (s, t))).collect()
    }

    fn graph(&self, duals: &DualPrices, s: usize, t: usize, seed: u64) -> (PricingGraph, PricingConfig) {
        let cfg = PricingConfig { seed, ..self.config.pricing };
        (PricingGraph::build(self.inst, s, t, duals, &self.forbidden_edges(t), &cfg), cfg)
    }

    fn heuristic_round(&mut self, duals: &DualPrices) -> Vec<Column> {
        let seed = self.config.pricing.seed ^ self.iterations as u64;
        let subs = self.subproblems();
        let results: Vec<(Vec<Column>, bool)> = subs
            .par_iter()
            .enumerate()
            .map(|(k, &(s, t))| {
                let (g, cfg) = self.graph(duals, s, t, seed);
                let cols = tabu_pricer(self.inst, &g, &cfg);
                if !cols.is_empty() {
                    return (cols, false);
                }
                if self.use_labeler_1[k] {
                    let cols = heuristic_labeler_1(self.inst, &g, &cfg);
                    if !cols.is_empty() {
                        return (cols, false);
                    }
                }
                (heuristic_labeler_2(self.inst, &g, &cfg), self.use_labeler_1[k])
            })
            .collect();
        let mut out = Vec::new();
        for (k, (cols, l1_failed)) in results.into_iter().enumerate() {
            if l1_failed {
                self.use_labeler_1[k] = false;
            }
            out.extend(cols);
        }
        out
    }

    /// Exact pricing over the enabled subproblems: columns, per-subproblem success, any aborted.
    fn exact_round(&self, duals: &DualPrices, enabled: &[bool]) -> (Vec<Vec<Column>>, bool) {
        let seed = self.config.pricing.seed ^ self.iterations as u64;
        let subs = self.subproblems();
        let results: Vec<(Vec<Column>, bool)> = subs
            .par_iter()
            .enumerate()
            .map(|(k, &(s, t))| {
                if !enabled[k] {
                    return (Vec::new(), false);
                }
                let (g, cfg) = self.graph(duals, s, t, seed);
                let out = solve_pricing(self.inst, &g, &cfg);
                (out.columns, out.aborted)
            })
            .collect();
        let aborted = results.iter().any(|r| r.1);
        (results.into_iter().map(|r| r.0).collect(), aborted)
    }

    /// Adds the negative reduced-cost columns among `cols`; returns how many were new.
    fn absorb(&mut self, duals: &DualPrices, cols: Vec<Column>) -> usize {
        let found = cols.len();
        let keep = select_columns(self.inst, duals, cols, usize::MAX);
        let mut added = 0;
        for c in keep {
            added += self.add_column(c) as usize;
        }
        if added == 0 && found > 0 {
            debug!("pricing returned {found} columns, none new");
        }
        added
    }

    fn solve_checked(&mut self) -> Result<Option<LpSolution>> {
        self.iterations += 1;
        let sol = self.lp.solve();
        match sol.status {
            LpStatus::Optimal => Ok(Some(sol)),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Build("master LP unbounded".into())),
            LpStatus::IterationLimit => Err(Error::IterationLimit("master LP".into())),
        }
    }

    fn trace(&self, sol: &LpSolution, added: usize, mode: &str) {
        debug!("iter {}, {:.6}, {}, {}, {}", self.iterations, sol.objective, self.columns.len(), added, mode);
    }

    /// Column generation at the current node.
    pub fn column_generation(&mut self) -> Result<ColgenOutcome> {
        let start_iter = self.iterations;
        let start_cols = self.columns.len();
        let n_sub = self.subproblems().len();
        let mut enabled = vec![true; n_sub];
        let mut heuristic_phase = self.config.heuristics;
        let mut proven;
        let Some(mut sol) = self.solve_checked()? else {
            return Ok(self.infeasible(start_iter, start_cols));
        };
        loop {
            if self.iterations - start_iter >= self.config.max_iterations {
                return Err(Error::IterationLimit(format!("column generation stopped after {} iterations", self.config.max_iterations)));
            }
            let duals = self.duals(&sol);
            if heuristic_phase {
                let cols = self.heuristic_round(&duals);
                let added = self.absorb(&duals, cols);
                if added > 0 {
                    let Some(s) = self.solve_checked()? else { return Ok(self.infeasible(start_iter, start_cols)) };
                    sol = s;
                    self.trace(&sol, added, "heuristic");
                    continue;
                }
                heuristic_phase = false;
            }
            let full_round = enabled.iter().all(|&e| e);
            let (per_sub, aborted) = self.exact_round(&duals, &enabled);
            proven = !aborted;
            let mut cols = Vec::new();
            for (k, c) in per_sub.into_iter().enumerate() {
                if enabled[k] && c.is_empty() {
                    enabled[k] = false;
                }
                cols.extend(c);
            }
            let added = self.absorb(&duals, cols);
            if added == 0 {
                if full_round {
                    break;
                }
                enabled.iter_mut().for_each(|e| *e = true);
                continue;
            }
            let Some(s) = self.solve_checked()? else { return Ok(self.infeasible(start_iter, start_cols)) };
            sol = s;
            self.trace(&sol, added, "exact");
            if self.config.heuristics {
                let duals = self.duals(&sol);
                let cols = self.heuristic_round(&duals);
                let added = self.absorb(&duals, cols);
                if added > 0 {
                    let Some(s) = self.solve_checked()? else { return Ok(self.infeasible(start_iter, start_cols)) };
                    sol = s;
                    self.trace(&sol, added, "heuristic");
                }
            }
        }
        let art = self.artificial_total(&sol.primal);
        Ok(ColgenOutcome {
            feasible: art <= ARTIFICIAL_TOL,
            objective: sol.objective,
            primal: sol.primal,
            iterations: self.iterations - start_iter,
            columns_added: self.columns.len() - start_cols,
            proven,
        })
    }

    fn infeasible(&self, start_iter: usize, start_cols: usize) -> ColgenOutcome {
        ColgenOutcome {
            feasible: false,
            objective: f64::INFINITY,
            primal: Vec::new(),
            iterations: self.iterations - start_iter,
            columns_added: self.columns.len() - start_cols,
            proven: true,
        }
    }

    /// λ and per-route α sums are all integral.
    pub fn is_integral(&self, primal: &[f64]) -> bool {
        let frac = |v: f64| (v - v.round()).abs() > 1e-6;
        if self.lambda.iter().flat_map(|l| l.iter().skip(1)).any(|&id| frac(primal[id])) {
            return false;
        }
        self.route_values(primal).values().all(|&v| !frac(v))
    }

    fn route_values(&self, primal: &[f64]) -> BTreeMap<(usize, usize, Vec<usize>), f64> {
        let mut m = BTreeMap::new();
        for (k, col) in self.columns.iter().enumerate() {
            let v = primal[self.column_ids[k]];
            if v > VALUE_TOL {
                *m.entry(col.route_key()).or_insert(0.0) += v;
            }
        }
        m
    }

    /// Builds a solution from an integral primal vector of this master.
    pub fn solution(&self, primal: &[f64]) -> Solution {
        let inst = self.inst;
        let tau = inst.horizon();
        let mut cost = 0.0;
        let mut periods: Vec<PeriodPlan> =
            (1..=tau).map(|t| PeriodPlan { period: t, first_echelon: Vec::new(), routes: Vec::new() }).collect();
        for (p, r) in self.routes.iter().enumerate() {
            for t in 1..=tau {
                let v = primal[self.lambda[p][t]];
                cost += v * r.cost;
                if v > 0.5 {
                    periods[t - 1].first_echelon.push(FirstLeg { supplier: r.supplier, satellites: r.satellites.clone(), cost: r.cost });
                }
            }
        }
        let mut plans: BTreeMap<(usize, usize, Vec<usize>), (f64, BTreeMap<(usize, usize), f64>)> = BTreeMap::new();
        for (k, col) in self.columns.iter().enumerate() {
            let v = primal[self.column_ids[k]];
            if v <= VALUE_TOL {
                continue;
            }
            cost += v * col.cost;
            let e = plans.entry(col.route_key()).or_default();
            e.0 += v;
            for d in &col.deliveries {
                *e.1.entry((d.customer, d.target)).or_insert(0.0) += v * d.quantity as f64;
            }
        }
        for ((s, t, route), (v, dl)) in plans {
            if v < 0.5 {
                continue;
            }
            let travel = crate::column::route_travel(inst, s, &route);
            let deliveries = dl
                .into_iter()
                .filter(|x| x.1 > VALUE_TOL)
                .map(|((c, h), q)| DeliveryAmount { customer: c, target: h, quantity: q })
                .collect();
            periods[t - 1].routes.push(RoutePlan { satellite: s, customers: route, deliveries, travel });
        }
        let mut transfers = Vec::new();
        for s in 0..inst.n_satellites() {
            for t in 1..=tau + 1 {
                for l in 0..=t.min(tau) {
                    let id = self.psi[s][t][l].expect("psi variable");
                    let q = primal[id];
                    cost += q * psi_cost(inst, s, t, l);
                    if q > VALUE_TOL {
                        transfers.push(Transfer { satellite: s, entry: l, exit: t, quantity: q });
                    }
                }
            }
        }
        Solution { cost, periods, transfers }
    }

    /// Solves the current pool as an integer program, ignoring node restrictions.
    /// Returns the objective and a primal vector indexed like this master's columns.
    pub fn integer_solution(&self, limits: MilpLimits) -> Option<(f64, Vec<f64>)> {
        let mut lp = self.lp.clone();
        let rows: Vec<usize> = self.branch.iter().map(|b| b.row).collect();
        if !rows.is_empty() {
            lp.remove_rows(&rows);
        }
        for &a in &self.artificials {
            lp.set_bounds(a, 0.0, 0.0);
        }
        let mut integer = Vec::new();
        for l in &self.lambda {
            for &id in l.iter().skip(1) {
                lp.set_bounds(id, 0.0, 1.0);
                integer.push(id);
            }
        }
        let mut groups: BTreeMap<(usize, usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for (k, col) in self.columns.iter().enumerate() {
            lp.set_bounds(self.column_ids[k], 0.0, f64::INFINITY);
            groups.entry(col.route_key()).or_default().push(self.column_ids[k]);
        }
        for ids in groups.values() {
            let row = lp.add_row(Sense::Eq, 0.0);
            for &id in ids {
                lp.set_coef(row, id, 1.0);
            }
            integer.push(lp.add_col(0.0, 0.0, 1.0, &[(row, -1.0)]));
        }
        let n = self.lp.n_cols();
        let sol = solve_milp(&lp, &integer, limits)?;
        let mut primal = sol.primal;
        primal.truncate(n);
        Some((sol.objective, primal))
    }
}

/// Row count of the master from the instance dimensions alone.
pub fn expected_rows(inst: &Instance, n_routes: usize) -> usize {
    let (s, n, tau) = (inst.n_satellites(), inst.n_customers(), inst.horizon());
    let covered: usize = (0..n).map(|c| inst.periods(c).residual_demand[1..=tau].iter().filter(|&&d| d > 0).count()).sum();
    5 * s * tau + covered + 2 * n * tau + n_routes * tau + 2 * tau + s
}
