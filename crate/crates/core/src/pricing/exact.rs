//! Bidirectional labeling with ng-memories for one subproblem.

use std::collections::{HashSet, VecDeque};

use super::label::{dominates, LabelState};
use super::{PricingConfig, PricingGraph, RC_TOL};
use crate::column::{Column, Delivery};
use crate::model::Instance;

#[derive(Debug, Clone, Default)]
pub struct PricingOutcome {
    /// Elementary columns with negative reduced cost, best first.
    pub columns: Vec<Column>,
    /// Least reduced cost over the elementary routes the labeling completed (`+inf` if none).
    pub best: f64,
    pub labels: usize,
    /// The label cap was hit; the result is not a proof.
    pub aborted: bool,
    /// Only non-elementary ng-routes priced out, so the search was repeated elementary.
    pub fell_back: bool,
}

#[derive(Debug, Clone)]
struct Node {
    st: LabelState,
    vertex: usize,
    visited: u64,
    elementary: bool,
    pred: u32,
    cdp: u32,
    alive: bool,
}

const NONE: u32 = u32::MAX;

struct Side {
    labels: Vec<Node>,
    at: Vec<Vec<u32>>,
}

struct Run<'a> {
    g: &'a PricingGraph,
    dominance: bool,
    cap: usize,
    created: usize,
    aborted: bool,
}

impl Run<'_> {
    /// Grows labels from the source (`forward`) or the sink while their load is at most `limit`.
    fn grow(&mut self, forward: bool, limit: f64) -> Side {
        let g = self.g;
        let mut side = Side { labels: Vec::new(), at: vec![Vec::new(); g.n] };
        let mut queue: VecDeque<u32> = VecDeque::new();
        self.expand(&mut side, &mut queue, None, forward, limit);
        while let Some(idx) = queue.pop_front() {
            if self.aborted {
                break;
            }
            if side.labels[idx as usize].alive {
                self.expand(&mut side, &mut queue, Some(idx), forward, limit);
            }
        }
        side
    }

    fn expand(&mut self, side: &mut Side, queue: &mut VecDeque<u32>, parent: Option<u32>, forward: bool, limit: f64) {
        let g = self.g;
        let (st, vertex, visited, elementary) = match parent {
            None => (LabelState::root(), usize::MAX, 0u64, true),
            Some(p) => {
                let n = &side.labels[p as usize];
                (n.st, n.vertex, n.visited, n.elementary)
            }
        };
        for j in 0..g.n {
            if g.active & (1 << j) == 0 || st.mem & (1 << j) != 0 {
                continue;
            }
            let arc = match (parent, forward) {
                (None, true) => g.src[j],
                (None, false) => g.snk[j],
                (Some(_), true) => g.arc(vertex, j),
                (Some(_), false) => g.arc(j, vertex),
            };
            if !arc.is_finite() {
                continue;
            }
            let mem = (st.mem & g.ng[j]) | (1 << j);
            for (k, cdp) in g.cdps[j].iter().enumerate() {
                let part = cdp.partial.is_some();
                if st.part && part {
                    continue;
                }
                let load = st.load + cdp.load;
                if load > g.capacity {
                    continue;
                }
                let (rate, max_p) = if part { (cdp.rate, cdp.max_p) } else { (st.rate, st.max_p) };
                let new = LabelState {
                    cost: st.cost + arc + cdp.cost,
                    load,
                    mem,
                    part: st.part || part,
                    rate,
                    max_p: if st.part || part { max_p.min(g.capacity - load) } else { 0 },
                };
                let node = Node {
                    st: new,
                    vertex: j,
                    visited: visited | (1 << j),
                    elementary: elementary && visited & (1 << j) == 0,
                    pred: parent.unwrap_or(NONE),
                    cdp: k as u32,
                    alive: true,
                };
                self.insert(side, queue, node, limit);
                if self.aborted {
                    return;
                }
            }
        }
    }

    fn insert(&mut self, side: &mut Side, queue: &mut VecDeque<u32>, node: Node, limit: f64) {
        let j = node.vertex;
        if self.dominance {
            if side.at[j].iter().any(|&o| dominates(&side.labels[o as usize].st, &node.st)) {
                return;
            }
            let labels = &mut side.labels;
            side.at[j].retain(|&o| {
                if dominates(&node.st, &labels[o as usize].st) {
                    labels[o as usize].alive = false;
                    false
                } else {
                    true
                }
            });
        }
        let idx = side.labels.len() as u32;
        let extend = node.st.load as f64 <= limit + 1e-9;
        side.labels.push(node);
        side.at[j].push(idx);
        if extend {
            queue.push_back(idx);
        }
        self.created += 1;
        if self.created >= self.cap {
            self.aborted = true;
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Join {
    Forward(u32),
    Backward(u32),
    Pair(u32, u32),
}

fn chain(side: &Side, mut idx: u32) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    while idx != NONE {
        let n = &side.labels[idx as usize];
        out.push((n.vertex, n.cdp as usize));
        idx = n.pred;
    }
    out
}

fn joined(a: &LabelState, b: &LabelState, capacity: i64) -> Option<f64> {
    if a.mem & b.mem != 0 || (a.part && b.part) {
        return None;
    }
    let load = a.load + b.load;
    if load > capacity {
        return None;
    }
    let room = capacity - load;
    let p = if a.part { a.rate * a.max_p.min(room) as f64 } else if b.part { b.rate * b.max_p.min(room) as f64 } else { 0.0 };
    Some(a.cost + b.cost + p)
}

fn build_column(inst: &Instance, g: &PricingGraph, visits: &[(usize, usize)]) -> Option<Column> {
    let mut deliveries = Vec::new();
    let mut partial = None;
    let mut load = 0;
    for &(c, k) in visits {
        let cdp = &g.cdps[c][k];
        for &i in &cdp.full {
            let it = g.items[c][i];
            deliveries.push(Delivery { customer: c, target: it.target, quantity: it.ub });
            load += it.ub;
        }
        if let Some(i) = cdp.partial {
            partial = Some((c, g.items[c][i]));
        }
    }
    if let Some((c, it)) = partial {
        let q = (it.ub - 1).min(g.capacity - load);
        if q > 0 {
            deliveries.push(Delivery { customer: c, target: it.target, quantity: q });
        }
    }
    g.column(inst, visits.iter().map(|v| v.0).collect(), deliveries).ok()
}

/// Exact pricing of one subproblem. Returns up to `max_columns` elementary
/// columns with reduced cost below `-RC_TOL`; `best` is their lower envelope
/// over every completed elementary route.
pub fn solve_pricing(inst: &Instance, g: &PricingGraph, cfg: &PricingConfig) -> PricingOutcome {
    let (out, non_elementary) = label(inst, g, cfg);
    let full = g.active;
    if out.columns.is_empty() && non_elementary && g.ng.iter().any(|&m| m & full != full) {
        let mut elem = g.clone();
        elem.ng = vec![u64::MAX; g.n];
        let (mut again, _) = label(inst, &elem, cfg);
        again.labels += out.labels;
        again.aborted |= out.aborted;
        again.fell_back = true;
        return again;
    }
    out
}

fn label(inst: &Instance, g: &PricingGraph, cfg: &PricingConfig) -> (PricingOutcome, bool) {
    let q = g.capacity as f64;
    let bidir = cfg.bidirectional && cfg.half_point < 1.0;
    let mut run = Run { g, dominance: cfg.dominance, cap: cfg.label_cap.max(1), created: 0, aborted: false };
    let fwd = run.grow(true, if bidir { cfg.half_point * q } else { q });
    let bwd = if bidir { Some(run.grow(false, q - cfg.half_point * q)) } else { None };

    let mut best = f64::INFINITY;
    let mut cands: Vec<(f64, Join)> = Vec::new();
    let mut non_elem = false;
    let mut consider = |cost: f64, elementary: bool, j: Join| {
        if elementary {
            best = best.min(cost);
        }
        if cost < -RC_TOL {
            if elementary {
                cands.push((cost, j));
            } else {
                non_elem = true;
            }
        }
    };
    for i in 0..g.n {
        for &f in &fwd.at[i] {
            let n = &fwd.labels[f as usize];
            let cost = n.st.completed(g.capacity - n.st.load) + g.snk[i];
            if cost.is_finite() {
                consider(cost, n.elementary, Join::Forward(f));
            }
        }
    }
    if let Some(bwd) = &bwd {
        for j in 0..g.n {
            for &b in &bwd.at[j] {
                let n = &bwd.labels[b as usize];
                let cost = n.st.completed(g.capacity - n.st.load) + g.src[j];
                if cost.is_finite() {
                    consider(cost, n.elementary, Join::Backward(b));
                }
            }
        }
        for i in 0..g.n {
            for j in 0..g.n {
                let arc = if i == j { f64::INFINITY } else { g.arc(i, j) };
                if !arc.is_finite() {
                    continue;
                }
                for &f in &fwd.at[i] {
                    let a = &fwd.labels[f as usize];
                    for &b in &bwd.at[j] {
                        let bl = &bwd.labels[b as usize];
                        if let Some(c) = joined(&a.st, &bl.st, g.capacity) {
                            let elem = a.elementary && bl.elementary && a.visited & bl.visited == 0;
                            consider(c + arc, elem, Join::Pair(f, b));
                        }
                    }
                }
            }
        }
    }

    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut columns = Vec::new();
    let mut seen = HashSet::new();
    for (_, j) in cands {
        if columns.len() >= cfg.max_columns {
            break;
        }
        let visits = match j {
            Join::Forward(f) => {
                let mut v = chain(&fwd, f);
                v.reverse();
                v
            }
            Join::Backward(b) => chain(bwd.as_ref().unwrap(), b),
            Join::Pair(f, b) => {
                let mut v = chain(&fwd, f);
                v.reverse();
                v.extend(chain(bwd.as_ref().unwrap(), b));
                v
            }
        };
        if let Some(col) = build_column(inst, g, &visits) {
            if seen.insert(col.key()) {
                columns.push(col);
            }
        }
    }
    let out = PricingOutcome { columns, best, labels: run.created, aborted: run.aborted, fell_back: false };
    (out, non_elem)
}
