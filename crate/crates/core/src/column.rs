//! Second-echelon columns: a route out of one satellite in one period plus an
//! extreme route delivery pattern.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Delivery {
    pub customer: usize,
    /// Period whose demand the quantity covers; `horizon + 1` is end inventory.
    pub target: usize,
    pub quantity: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub satellite: usize,
    pub period: usize,
    /// Customer indices in visiting order, oriented so the first is not larger than the last.
    pub route: Vec<usize>,
    /// Nonzero sub-deliveries sorted by (customer, target).
    pub deliveries: Vec<Delivery>,
    pub travel: f64,
    pub holding: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnKey {
    pub satellite: usize,
    pub period: usize,
    pub route: Vec<usize>,
    pub deliveries: Vec<(usize, usize, i64)>,
}

/// Reverses `route` when its first customer has a larger index than its last.
pub fn canonical_route(mut route: Vec<usize>) -> Vec<usize> {
    if route.len() > 1 && route[0] > route[route.len() - 1] {
        route.reverse();
    }
    route
}

pub fn route_travel(inst: &Instance, s: usize, route: &[usize]) -> f64 {
    let (Some(&first), Some(&last)) = (route.first(), route.last()) else {
        return 0.0;
    };
    let mut cost = inst.satellite_customer_cost(s, first);
    for w in route.windows(2) {
        cost += inst.customer_cost(w[0], w[1]);
    }
    cost + inst.satellite_customer_cost(s, last)
}

/// Second-echelon vertex id: customers keep their index, satellite `s` is `n + s`.
pub fn satellite_vertex(inst: &Instance, s: usize) -> usize {
    inst.n_customers() + s
}

pub fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Column {
    pub fn new(inst: &Instance, satellite: usize, period: usize, route: Vec<usize>, deliveries: Vec<Delivery>) -> Result<Self> {
        if satellite >= inst.n_satellites() || period == 0 || period > inst.horizon() {
            return input(format!("column at satellite {satellite}, period {period} is out of range"));
        }
        if route.is_empty() {
            return input("column route is empty");
        }
        let mut seen = 0u64;
        for &c in &route {
            if c >= inst.n_customers() || seen & (1 << c) != 0 {
                return input(format!("route {route:?} repeats or misnames a customer"));
            }
            seen |= 1 << c;
        }
        let mut deliveries: Vec<Delivery> = deliveries.into_iter().filter(|d| d.quantity != 0).collect();
        deliveries.sort();
        let mut partial = 0;
        let mut holding = 0.0;
        for (k, d) in deliveries.iter().enumerate() {
            if seen & (1 << d.customer) == 0 {
                return input(format!("delivery to customer {} not on the route", d.customer));
            }
            if k > 0 && (deliveries[k - 1].customer, deliveries[k - 1].target) == (d.customer, d.target) {
                return input("duplicate sub-delivery");
            }
            let p = inst.periods(d.customer);
            let Some(ub) = p.ub(period, d.target) else {
                return input(format!("period {} is not a target of customer {} in period {period}", d.target, d.customer));
            };
            if d.quantity < 0 || d.quantity > ub {
                return input(format!("sub-delivery {} outside [0, {ub}]", d.quantity));
            }
            if d.quantity < ub {
                partial += 1;
            }
            holding += inst.customer(d.customer).holding_cost * d.quantity as f64 * p.holding_periods(period, d.target) as f64;
        }
        if partial > 1 {
            return input("more than one partial sub-delivery");
        }
        let route = canonical_route(route);
        let col = Column {
            satellite,
            period,
            travel: route_travel(inst, satellite, &route),
            route,
            deliveries,
            holding,
            cost: 0.0,
        };
        if col.load() > inst.second_fleet().capacity {
            return input(format!("load {} exceeds vehicle capacity", col.load()));
        }
        Ok(Column { cost: col.travel + col.holding, ..col })
    }

    pub fn load(&self) -> i64 {
        self.deliveries.iter().map(|d| d.quantity).sum()
    }

    pub fn visits(&self, c: usize) -> bool {
        self.route.contains(&c)
    }

    pub fn quantity(&self, c: usize, h: usize) -> i64 {
        self.deliveries.iter().filter(|d| d.customer == c && d.target == h).map(|d| d.quantity).sum()
    }

    /// Edges in second-echelon vertex ids, with multiplicity (a round trip uses its edge twice).
    pub fn edges(&self, inst: &Instance) -> Vec<(usize, usize)> {
        let sv = satellite_vertex(inst, self.satellite);
        let mut path = Vec::with_capacity(self.route.len() + 2);
        path.push(sv);
        path.extend_from_slice(&self.route);
        path.push(sv);
        path.windows(2).map(|w| edge(w[0], w[1])).collect()
    }

    pub fn edge_count(&self, inst: &Instance, e: (usize, usize)) -> usize {
        self.edges(inst).into_iter().filter(|&x| x == e).count()
    }

    pub fn key(&self) -> ColumnKey {
        ColumnKey {
            satellite: self.satellite,
            period: self.period,
            route: self.route.clone(),
            deliveries: self.deliveries.iter().map(|d| (d.customer, d.target, d.quantity)).collect(),
        }
    }

    pub fn route_key(&self) -> (usize, usize, Vec<usize>) {
        (self.satellite, self.period, self.route.clone())
    }
}
