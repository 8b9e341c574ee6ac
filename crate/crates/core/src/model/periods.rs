//! Per-customer period bookkeeping under first-in first-out consumption.
//!
//! Periods are 1-based. `horizon + 1` is the artificial end-inventory period.
//! Every vector here is indexed directly by period; slot 0 either holds the
//! "before the horizon" value (inventories) or is unused.

use serde::{Deserialize, Serialize};

/// One admissible sub-delivery target for a delivery made in some period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubPeriod {
    /// Period whose demand the quantity covers (`horizon + 1` = end inventory).
    pub target: usize,
    /// Largest quantity a single delivery may dedicate to `target`.
    pub ub: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomerPeriods {
    pub horizon: usize,
    /// `residual_inventory[h]` = initial stock left at the end of period `h`; slot 0 is the initial stock.
    pub residual_inventory: Vec<i64>,
    /// `residual_demand[h]` for `h` in 1..=horizon; slot 0 is 0.
    pub residual_demand: Vec<i64>,
    /// `delivery[t]` lists the targets a delivery in period `t` may serve, in increasing order.
    pub delivery: Vec<Vec<SubPeriod>>,
    /// `t_minus[h]` = periods from which the demand of `h` can be served (h in 1..=horizon+1).
    pub t_minus: Vec<Vec<usize>>,
    /// `gamma_minus[h]` = periods `t <= h` whose deliveries may still be in stock at the end of `h`.
    pub gamma_minus: Vec<Vec<usize>>,
    /// `gamma_plus[t]` = periods `h` with `t` in `gamma_minus[h]`.
    pub gamma_plus: Vec<Vec<usize>>,
}

/// Initial stock remaining at the end of each period, slot 0 being the initial stock itself.
pub fn residual_inventory(initial: i64, demand: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(demand.len() + 1);
    out.push(initial);
    let mut consumed = 0;
    for &d in demand {
        consumed += d;
        out.push((initial - consumed).max(0));
    }
    out
}

/// Demand not covered by the initial stock; slot 0 is unused.
pub fn residual_demand(initial: i64, demand: &[i64]) -> Vec<i64> {
    let inv = residual_inventory(initial, demand);
    let mut out = vec![0; demand.len() + 1];
    for h in 1..=demand.len() {
        out[h] = (demand[h - 1] - inv[h - 1]).max(0);
    }
    out
}

impl CustomerPeriods {
    pub fn new(initial: i64, capacity: i64, demand: &[i64]) -> Self {
        let horizon = demand.len();
        let end = horizon + 1;
        let inv = residual_inventory(initial, demand);
        let dbar = residual_demand(initial, demand);
        // cumulative[h] = d_1 + .. + d_h
        let mut cumulative = vec![0i64; end + 1];
        for h in 1..=horizon {
            cumulative[h] = cumulative[h - 1] + demand[h - 1];
        }
        let span = |t: usize, h: usize| cumulative[h - 1] - cumulative[t - 1];

        let mut delivery = vec![Vec::new(); end];
        for (t, slot) in delivery.iter_mut().enumerate().skip(1) {
            for h in t..=end {
                let ok = if h <= horizon {
                    dbar[h] > 0 && (h == t || span(t, h) < capacity)
                } else {
                    span(t, h) < capacity
                };
                if !ok {
                    continue;
                }
                let ub = if h == t {
                    dbar[h].min(capacity - inv[h - 1])
                } else if h == end {
                    capacity - span(t, h) - inv[h - 1]
                } else {
                    dbar[h].min(capacity - span(t, h) - inv[h - 1])
                };
                slot.push(SubPeriod { target: h, ub });
            }
        }

        let mut t_minus = vec![Vec::new(); end + 1];
        for (t, targets) in delivery.iter().enumerate().skip(1) {
            for sp in targets {
                t_minus[sp.target].push(t);
            }
        }

        let mut gamma_minus = vec![Vec::new(); end];
        for (h, slot) in gamma_minus.iter_mut().enumerate().skip(1) {
            for t in 1..=h {
                if delivery[t].iter().any(|sp| sp.target >= h) {
                    slot.push(t);
                }
            }
        }
        let mut gamma_plus = vec![Vec::new(); end];
        for (h, ts) in gamma_minus.iter().enumerate().skip(1) {
            for &t in ts {
                gamma_plus[t].push(h);
            }
        }

        CustomerPeriods {
            horizon,
            residual_inventory: inv,
            residual_demand: dbar,
            delivery,
            t_minus,
            gamma_minus,
            gamma_plus,
        }
    }

    pub fn end_period(&self) -> usize {
        self.horizon + 1
    }

    pub fn targets(&self, t: usize) -> &[SubPeriod] {
        &self.delivery[t]
    }

    pub fn ub(&self, t: usize, h: usize) -> Option<i64> {
        self.delivery[t].iter().find(|sp| sp.target == h).map(|sp| sp.ub)
    }

    /// Number of period ends a unit delivered in `t` for target `h` spends in stock.
    pub fn holding_periods(&self, t: usize, h: usize) -> i64 {
        (h.min(self.horizon + 1) - 1).min(self.horizon) as i64 - t as i64 + 1
    }

    pub fn in_gamma_plus(&self, t: usize, h: usize) -> bool {
        self.gamma_plus[t].contains(&h)
    }
}
