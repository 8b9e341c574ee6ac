//! Pricing subproblems: one per (satellite, period), each a shortest path with
//! resource constraints over customers plus a knapsack over sub-deliveries.

mod cdp;
mod exact;
mod heuristic;
mod label;

use serde::{Deserialize, Serialize};

pub use cdp::{enumerate_cdps, Cdp};
pub use exact::{solve_pricing, PricingOutcome};
pub use heuristic::{best_rdp, heuristic_labeler_1, heuristic_labeler_2, labeler_1_customers, tabu_pricer};
pub use label::{dominates, LabelState};

use crate::column::{satellite_vertex, Column, Delivery};
use crate::duals::{BranchTerm, DualPrices};
use crate::error::Result;
use crate::model::Instance;

pub const RC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PricingConfig {
    /// ng-neighbourhood size.
    pub kappa: usize,
    /// Share of the vehicle capacity at which forward labels stop extending.
    pub half_point: f64,
    pub bidirectional: bool,
    /// Label dominance; delivery patterns are always pruned.
    pub dominance: bool,
    pub max_columns: usize,
    pub label_cap: usize,
    pub tabu_tenure: usize,
    pub tabu_iterations: usize,
    pub labeler_1_customers: usize,
    pub seed: u64,
}

impl Default for PricingConfig {
    fn default() -> Self {
        PricingConfig {
            kappa: 5,
            half_point: 0.5,
            bidirectional: true,
            dominance: true,
            max_columns: 50,
            label_cap: 2_000_000,
            tabu_tenure: 7,
            tabu_iterations: 100,
            labeler_1_customers: 5,
            seed: 0,
        }
    }
}

/// One admissible sub-delivery of a customer: target period, upper bound, unit reduced cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub target: usize,
    pub ub: i64,
    pub rho: f64,
}

/// Arc reduced costs, ng-neighbourhoods and delivery options of subproblem `(s, t)`.
/// Removed arcs cost `+inf`.
#[derive(Debug, Clone)]
pub struct PricingGraph {
    pub satellite: usize,
    pub period: usize,
    pub n: usize,
    pub capacity: i64,
    pub src: Vec<f64>,
    pub snk: Vec<f64>,
    arc: Vec<f64>,
    pub ng: Vec<u64>,
    /// Customers the labeling may visit.
    pub active: u64,
    pub items: Vec<Vec<Item>>,
    pub cdps: Vec<Vec<Cdp>>,
}

fn neighbourhoods(inst: &Instance, kappa: usize) -> Vec<u64> {
    let n = inst.n_customers();
    (0..n)
        .map(|c| {
            let mut others: Vec<usize> = (0..n).collect();
            others.sort_by(|&a, &b| {
                let da = if a == c { -1.0 } else { inst.customer_cost(c, a) };
                let db = if b == c { -1.0 } else { inst.customer_cost(c, b) };
                da.total_cmp(&db).then(a.cmp(&b))
            });
            others.iter().take(kappa.max(1)).fold(0u64, |m, &x| m | 1 << x)
        })
        .collect()
}

impl PricingGraph {
    /// `forbidden` lists second-echelon edges (vertex ids) removed in this period.
    pub fn build(
        inst: &Instance,
        s: usize,
        t: usize,
        duals: &DualPrices,
        forbidden: &[(usize, usize)],
        config: &PricingConfig,
    ) -> Self {
        let n = inst.n_customers();
        let sv = satellite_vertex(inst, s);
        let mut src: Vec<f64> = (0..n).map(|c| inst.satellite_customer_cost(s, c) - duals.pi10[t]).collect();
        let mut snk: Vec<f64> = (0..n).map(|c| inst.satellite_customer_cost(s, c) - duals.pi8[c][t]).collect();
        let mut arc = vec![f64::INFINITY; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    arc[i * n + j] = inst.customer_cost(i, j) - duals.pi8[i][t];
                }
            }
        }
        for b in duals.branch.iter().filter(|b| b.term.applies_to(inst, s, t)) {
            match b.term {
                BranchTerm::Routes { .. } => src.iter_mut().for_each(|x| *x -= b.dual),
                BranchTerm::Customer { customer, .. } => {
                    src[customer] -= b.dual;
                    for i in 0..n {
                        arc[i * n + customer] -= b.dual;
                    }
                }
                BranchTerm::Edge { a, b: e, .. } => {
                    if a < n && e < n {
                        arc[a * n + e] -= b.dual;
                        arc[e * n + a] -= b.dual;
                    } else {
                        let c = a.min(e);
                        src[c] -= b.dual;
                        snk[c] -= b.dual;
                    }
                }
            }
        }
        for &(a, b) in forbidden {
            if a < n && b < n {
                arc[a * n + b] = f64::INFINITY;
                arc[b * n + a] = f64::INFINITY;
            } else if a.max(b) == sv && a.min(b) < n {
                src[a.min(b)] = f64::INFINITY;
                snk[a.min(b)] = f64::INFINITY;
            }
        }
        let items: Vec<Vec<Item>> = (0..n)
            .map(|c| {
                inst.periods(c)
                    .targets(t)
                    .iter()
                    .filter(|sp| sp.ub > 0)
                    .map(|sp| Item { target: sp.target, ub: sp.ub, rho: duals.rho(inst, s, t, c, sp.target) })
                    .collect()
            })
            .collect();
        let capacity = inst.second_fleet().capacity;
        let cdps = items.iter().map(|it| enumerate_cdps(it, capacity, true)).collect();
        PricingGraph {
            satellite: s,
            period: t,
            n,
            capacity,
            src,
            snk,
            arc,
            ng: neighbourhoods(inst, config.kappa),
            active: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            items,
            cdps,
        }
    }

    pub fn arc(&self, i: usize, j: usize) -> f64 {
        self.arc[i * self.n + j]
    }

    /// Reduced cost of the arcs of `route` (no deliveries).
    pub fn route_cost(&self, route: &[usize]) -> f64 {
        let (Some(&first), Some(&last)) = (route.first(), route.last()) else {
            return f64::INFINITY;
        };
        let mut c = self.src[first];
        for w in route.windows(2) {
            c += self.arc(w[0], w[1]);
        }
        c + self.snk[last]
    }

    pub fn restricted(&self, active: u64) -> Self {
        PricingGraph { active, ..self.clone() }
    }

    pub fn column(&self, inst: &Instance, route: Vec<usize>, deliveries: Vec<Delivery>) -> Result<Column> {
        Column::new(inst, self.satellite, self.period, route, deliveries)
    }
}

/// Keeps columns with reduced cost below `-RC_TOL`, best first, one per key.
pub(crate) fn select_columns(
    inst: &Instance,
    duals: &DualPrices,
    cols: Vec<Column>,
    max: usize,
) -> Vec<Column> {
    let mut scored: Vec<(f64, Column)> = cols
        .into_iter()
        .map(|c| (duals.reduced_cost(inst, &c), c))
        .filter(|(rc, _)| *rc < -RC_TOL)
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.key().cmp(&b.1.key())));
    let mut seen = std::collections::HashSet::new();
    scored.retain(|(_, c)| seen.insert(c.key()));
    scored.into_iter().take(max).map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests;
