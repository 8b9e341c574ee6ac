//! Branch-and-price tree search and the solve report.

use std::rc::Rc;
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::branching::{aggregates, find_candidate, BranchDecision, Candidate};
use crate::error::{Error, Result};
use crate::lp::{Basis, MilpLimits};
use crate::master::{ColgenConfig, Master};
use crate::model::Instance;
use crate::solution::{validate, Solution};

const PRUNE_TOL: f64 = 1e-6;
/// Gap below which a solution counts as optimal, in percent.
pub const OPTIMAL_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    BestFirst,
    LocalDepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveConfig {
    pub colgen: ColgenConfig,
    pub search: SearchStrategy,
    /// Seconds.
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    /// Pricing threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// When false, report times are zero so reports are reproducible byte for byte.
    pub record_times: bool,
    /// Nodes after which the integer RMP is solved.
    pub integer_rmp_at: [usize; 2],
    pub integer_rmp_nodes: usize,
    /// Seconds.
    pub integer_rmp_time: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            colgen: ColgenConfig::default(),
            search: SearchStrategy::BestFirst,
            time_limit: None,
            node_limit: None,
            threads: None,
            record_times: true,
            integer_rmp_at: [1, 20],
            integer_rmp_nodes: 200,
            integer_rmp_time: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Timeout,
    NodeLimit,
    NoSolution,
    Infeasible,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceMeta {
    pub name: String,
    pub class: String,
    /// Suppliers and satellites, e.g. `1s2`.
    pub combination: String,
    pub k2: usize,
    pub customers: usize,
    pub horizon: usize,
}

impl InstanceMeta {
    pub fn of(inst: &Instance) -> Self {
        InstanceMeta {
            name: String::new(),
            class: String::new(),
            combination: format!("{}s{}", inst.n_suppliers(), inst.n_satellites()),
            k2: inst.second_fleet().vehicles,
            customers: inst.n_customers(),
            horizon: inst.horizon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub lb: Option<f64>,
    pub ub: Option<f64>,
    /// Gaps in percent.
    pub gap0: Option<f64>,
    pub gap20: Option<f64>,
    pub gap_f: Option<f64>,
    pub root_lb: Option<f64>,
    pub nodes: usize,
    pub time_root_sec: f64,
    pub time_total_sec: f64,
    pub columns: usize,
    pub colgen_iterations: usize,
    pub instance: InstanceMeta,
    pub solution: Option<Solution>,
}

/// `(ub - lb) / lb` in percent; `None` without both bounds or with `lb` near zero.
pub fn gap(lb: Option<f64>, ub: Option<f64>) -> Option<f64> {
    let (lb, ub) = (lb?, ub?);
    if lb.abs() < 1e-9 {
        return if (ub - lb).abs() < 1e-9 { Some(0.0) } else { None };
    }
    Some(((ub - lb) / lb * 100.0).max(0.0))
}

#[derive(Debug, Clone)]
struct Node {
    id: usize,
    depth: usize,
    bound: f64,
    decisions: Vec<BranchDecision>,
    basis: Option<Rc<Basis>>,
}

struct Tree {
    open: Vec<Node>,
    dive: Option<Node>,
}

impl Tree {
    fn pop(&mut self) -> Option<Node> {
        if let Some(n) = self.dive.take() {
            return Some(n);
        }
        let k = (0..self.open.len()).min_by(|&a, &b| {
            let (x, y) = (&self.open[a], &self.open[b]);
            x.bound.total_cmp(&y.bound).then(y.depth.cmp(&x.depth)).then(x.id.cmp(&y.id))
        })?;
        Some(self.open.swap_remove(k))
    }

    fn lower_bound(&self) -> Option<f64> {
        self.open.iter().chain(self.dive.iter()).map(|n| n.bound).min_by(|a, b| a.total_cmp(b))
    }
}

struct Incumbent {
    value: f64,
    solution: Solution,
}

fn offer(inc: &mut Option<Incumbent>, inst: &Instance, value: f64, solution: Solution, source: &str) {
    let v = validate(inst, &solution);
    if !v.is_empty() {
        warn!("{source} solution rejected by the validator: {}", v.join("; "));
        return;
    }
    if inc.as_ref().map_or(true, |i| value < i.value - 1e-9) {
        info!("new incumbent {value:.6} from {source}");
        *inc = Some(Incumbent { value, solution });
    }
}

/// Solves `inst` to optimality or until a limit is reached.
pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveReport> {
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Build(format!("thread pool: {e}")))?
            .install(|| search(inst, cfg)),
        None => search(inst, cfg),
    }
}

fn search(inst: &Instance, cfg: &SolveConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let mut master = Master::new(inst, cfg.colgen)?;
    let mut tree = Tree { open: vec![Node { id: 0, depth: 0, bound: f64::NEG_INFINITY, decisions: Vec::new(), basis: None }], dive: None };
    let mut next_id = 1;
    let mut incumbent: Option<Incumbent> = None;
    let mut processed = 0;
    let mut root_lb = None;
    let mut time_root = 0.0;
    let (mut gap0, mut gap20) = (None, None);
    let mut limit = None;
    let milp = MilpLimits { node_limit: cfg.integer_rmp_nodes, time_limit: Duration::from_secs_f64(cfg.integer_rmp_time) };

    let prunable = |bound: f64, inc: &Option<Incumbent>| inc.as_ref().is_some_and(|i| bound >= i.value - PRUNE_TOL);

    while let Some(node) = tree.pop() {
        if prunable(node.bound, &incumbent) {
            continue;
        }
        if cfg.time_limit.is_some_and(|l| start.elapsed().as_secs_f64() >= l) {
            limit = Some(SolveStatus::Timeout);
        } else if cfg.node_limit.is_some_and(|l| processed >= l) {
            limit = Some(SolveStatus::NodeLimit);
        }
        if limit.is_some() {
            tree.open.push(node);
            break;
        }
        let restrictions: Vec<_> = node.decisions.iter().map(|d| d.restriction()).collect();
        master.set_restrictions(&restrictions);
        if let Some(b) = &node.basis {
            master.set_basis(b);
        }
        let out = master.column_generation()?;
        processed += 1;
        if !out.proven {
            warn!("node {}: pricing hit the label cap; its bound is heuristic", node.id);
        }
        let bound = if out.feasible { out.objective.max(node.bound) } else { f64::INFINITY };
        debug!("node {} depth {} bound {:.6} feasible {}", node.id, node.depth, bound, out.feasible);
        if out.feasible && !prunable(bound, &incumbent) {
            match find_candidate(&aggregates(&master, &out.primal)) {
                Candidate::Integral => {
                    if master.is_integral(&out.primal) {
                        let sol = master.solution(&out.primal);
                        offer(&mut incumbent, inst, out.objective, sol, "node");
                    } else {
                        warn!("node {}: families integral but route values are not; node dropped", node.id);
                    }
                }
                Candidate::Branch { family, value } => {
                    let children = BranchDecision::children(family, value);
                    let basis = Rc::new(master.basis());
                    let near = if value - value.floor() < 0.5 { 0 } else { 1 };
                    for (k, d) in children.into_iter().enumerate() {
                        let mut decisions = node.decisions.clone();
                        decisions.push(d);
                        let child = Node { id: next_id, depth: node.depth + 1, bound, decisions, basis: Some(basis.clone()) };
                        next_id += 1;
                        if cfg.search == SearchStrategy::LocalDepthFirst && k == near {
                            tree.dive = Some(child);
                        } else {
                            tree.open.push(child);
                        }
                    }
                }
            }
        }
        if processed == 1 {
            root_lb = out.feasible.then_some(bound);
            time_root = start.elapsed().as_secs_f64();
        }
        if cfg.integer_rmp_at.contains(&processed) {
            if let Some((value, primal)) = master.integer_solution(milp) {
                let sol = master.solution(&primal);
                offer(&mut incumbent, inst, value, sol, "integer RMP");
            }
        }
        let ub = incumbent.as_ref().map(|i| i.value);
        let lb = tree.lower_bound().map(|b| ub.map_or(b, |u| b.min(u))).or(ub);
        if processed == 1 {
            gap0 = gap(lb.or(root_lb), ub);
        }
        if processed == 20 {
            gap20 = gap(lb, ub);
        }
    }

    let ub = incumbent.as_ref().map(|i| i.value);
    let lb = match (limit, tree.lower_bound()) {
        (Some(_), Some(b)) => Some(ub.map_or(b, |u| b.min(u))),
        _ => ub.or(root_lb),
    };
    let gap_f = gap(lb, ub);
    if processed < 20 && limit.is_none() {
        gap20 = gap_f;
    }
    let status = match (limit, &incumbent) {
        (None, Some(_)) => SolveStatus::Optimal,
        (None, None) => SolveStatus::Infeasible,
        (Some(_), Some(_)) if gap_f.is_some_and(|g| g <= OPTIMAL_GAP) => SolveStatus::Optimal,
        (Some(l), Some(_)) => l,
        (Some(_), None) => SolveStatus::NoSolution,
    };
    let total = start.elapsed().as_secs_f64();
    let times = |t: f64| if cfg.record_times { t } else { 0.0 };
    Ok(SolveReport {
        status,
        objective: ub,
        lb: lb.filter(|b| b.is_finite()),
        ub,
        gap0,
        gap20,
        gap_f,
        root_lb: root_lb.filter(|b| b.is_finite()),
        nodes: processed,
        time_root_sec: times(time_root),
        time_total_sec: times(total),
        columns: master.columns().len(),
        colgen_iterations: master.iterations(),
        instance: InstanceMeta::of(inst),
        solution: incumbent.map(|i| i.solution),
    })
}
