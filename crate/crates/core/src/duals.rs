//! Dual prices of the master rows that second-echelon columns touch, and the
//! reduced-cost assembly shared by the master and the pricers.

use serde::{Deserialize, Serialize};

use crate::column::{edge, satellite_vertex, Column};
use crate::model::Instance;

/// The part of a branching row that involves second-echelon columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchTerm {
    /// Number of routes, over all periods or in one period.
    Routes { period: Option<usize> },
    /// Visits to a customer, optionally restricted to a period and a satellite.
    Customer { customer: usize, period: Option<usize>, satellite: Option<usize> },
    /// Traversals of edge `(a, b)` in a period, in second-echelon vertex ids.
    Edge { period: usize, a: usize, b: usize },
}

impl BranchTerm {
    pub fn coefficient(&self, inst: &Instance, col: &Column) -> f64 {
        match *self {
            BranchTerm::Routes { period } => {
                if period.map_or(true, |t| t == col.period) {
                    1.0
                } else {
                    0.0
                }
            }
            BranchTerm::Customer { customer, period, satellite } => {
                if period.map_or(true, |t| t == col.period)
                    && satellite.map_or(true, |s| s == col.satellite)
                    && col.visits(customer)
                {
                    1.0
                } else {
                    0.0
                }
            }
            BranchTerm::Edge { period, a, b } => {
                if period == col.period {
                    col.edge_count(inst, edge(a, b)) as f64
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether the term can touch columns of subproblem `(s, t)`.
    pub fn applies_to(&self, inst: &Instance, s: usize, t: usize) -> bool {
        match *self {
            BranchTerm::Routes { period } => period.map_or(true, |p| p == t),
            BranchTerm::Customer { period, satellite, .. } => {
                period.map_or(true, |p| p == t) && satellite.map_or(true, |x| x == s)
            }
            BranchTerm::Edge { period, a, b } => {
                let n = inst.n_customers();
                period == t && (a < n || a == satellite_vertex(inst, s)) && (b < n || b == satellite_vertex(inst, s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchDual {
    pub term: BranchTerm,
    pub dual: f64,
}

/// Row duals `y` of the master (reduced cost `c - y a`), indexed by 1-based periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPrices {
    /// Satellite outflow linking, `[s][t]`.
    pub pi2: Vec<Vec<f64>>,
    /// Residual-demand covering, `[c][h]`; 0 where no row exists and at `h = horizon + 1`.
    pub pi3: Vec<Vec<f64>>,
    /// Customer capacity, `[c][h]` for `h` in 1..=horizon.
    pub pi5: Vec<Vec<f64>>,
    /// Customer visit at most once, `[c][t]`.
    pub pi8: Vec<Vec<f64>>,
    /// Second-echelon fleet size, `[t]`.
    pub pi10: Vec<f64>,
    pub branch: Vec<BranchDual>,
}

impl DualPrices {
    pub fn zero(inst: &Instance) -> Self {
        let p = inst.horizon() + 2;
        let n = inst.n_customers();
        DualPrices {
            pi2: vec![vec![0.0; p]; inst.n_satellites()],
            pi3: vec![vec![0.0; p]; n],
            pi5: vec![vec![0.0; p]; n],
            pi8: vec![vec![0.0; p]; n],
            pi10: vec![0.0; p],
            branch: Vec::new(),
        }
    }

    /// Per-unit reduced cost of a sub-delivery to `c` in period `t` for target `h` from satellite `s`.
    pub fn rho(&self, inst: &Instance, s: usize, t: usize, c: usize, h: usize) -> f64 {
        let tau = inst.horizon();
        let mut r = self.pi2[s][t];
        if h <= tau {
            r -= self.pi3[c][h];
        }
        for l in t..h.min(tau + 1) {
            r -= self.pi5[c][l];
        }
        r + inst.customer(c).holding_cost * inst.periods(c).holding_periods(t, h) as f64
    }

    /// Reduced cost of `col`: cost minus the duals of every row it enters.
    pub fn reduced_cost(&self, inst: &Instance, col: &Column) -> f64 {
        let (s, t) = (col.satellite, col.period);
        let mut rc = col.travel - self.pi10[t];
        for &c in &col.route {
            rc -= self.pi8[c][t];
        }
        for d in &col.deliveries {
            rc += d.quantity as f64 * self.rho(inst, s, t, d.customer, d.target);
        }
        for b in &self.branch {
            rc -= b.dual * b.term.coefficient(inst, col);
        }
        rc
    }
}
