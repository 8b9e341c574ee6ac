//! Solution schema and an independent feasibility and cost audit.

use serde::{Deserialize, Serialize};

use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FirstLeg {
    pub supplier: usize,
    pub satellites: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeliveryAmount {
    pub customer: usize,
    pub target: usize,
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoutePlan {
    pub satellite: usize,
    pub customers: Vec<usize>,
    pub deliveries: Vec<DeliveryAmount>,
    pub travel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodPlan {
    pub period: usize,
    pub first_echelon: Vec<FirstLeg>,
    pub routes: Vec<RoutePlan>,
}

/// Quantity entering `satellite` in period `entry` (0 = initial stock) and
/// leaving it in period `exit` (`horizon + 1` = end inventory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Transfer {
    pub satellite: usize,
    pub entry: usize,
    pub exit: usize,
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Solution {
    pub cost: f64,
    pub periods: Vec<PeriodPlan>,
    pub transfers: Vec<Transfer>,
}

const TOL: f64 = 1e-6;

fn tour_cost(inst: &Instance, leg: &FirstLeg) -> f64 {
    let u = inst.supplier_node(leg.supplier);
    let mut prev = u;
    let mut c = 0.0;
    for &s in &leg.satellites {
        c += inst.cost(prev, inst.satellite_node(s));
        prev = inst.satellite_node(s);
    }
    c + inst.cost(prev, u)
}

fn route_cost(inst: &Instance, r: &RoutePlan) -> f64 {
    let s = inst.satellite_node(r.satellite);
    let mut prev = s;
    let mut c = 0.0;
    for &x in &r.customers {
        c += inst.cost(prev, inst.customer_node(x));
        prev = inst.customer_node(x);
    }
    c + inst.cost(prev, s)
}

/// Stock trajectories and audited cost. Customer holding is charged on stock
/// above what the initial inventory alone would leave, matching the objective.
pub fn audit_cost(inst: &Instance, sol: &Solution) -> f64 {
    let tau = inst.horizon();
    let mut cost = 0.0;
    for p in &sol.periods {
        cost += p.first_echelon.iter().map(|l| tour_cost(inst, l)).sum::<f64>();
        cost += p.routes.iter().map(|r| route_cost(inst, r)).sum::<f64>();
    }
    let (cust, sat) = trajectories(inst, sol);
    for c in 0..inst.n_customers() {
        let p = inst.periods(c);
        for h in 1..=tau {
            cost += inst.customer(c).holding_cost * (cust[c][h] - p.residual_inventory[h] as f64);
        }
    }
    for s in 0..inst.n_satellites() {
        for t in 1..=tau {
            cost += inst.satellite(s).holding_cost * sat[s][t];
        }
    }
    cost
}

/// End-of-period stock `[node][t]`, slot 0 the initial stock.
fn trajectories(inst: &Instance, sol: &Solution) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let tau = inst.horizon();
    let (delivered, inflow, outflow) = flows(inst, sol);
    let cust = (0..inst.n_customers())
        .map(|c| {
            let mut v = vec![inst.customer(c).initial_inventory as f64; tau + 1];
            for h in 1..=tau {
                v[h] = v[h - 1] + delivered[c][h] - inst.demand(c, h) as f64;
            }
            v
        })
        .collect();
    let sat = (0..inst.n_satellites())
        .map(|s| {
            let mut v = vec![inst.satellite(s).initial_inventory as f64; tau + 1];
            for t in 1..=tau {
                v[t] = v[t - 1] + inflow[s][t] - outflow[s][t];
            }
            v
        })
        .collect();
    (cust, sat)
}

type Flows = (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

fn flows(inst: &Instance, sol: &Solution) -> Flows {
    let tau = inst.horizon();
    let mut delivered = vec![vec![0.0; tau + 2]; inst.n_customers()];
    let mut inflow = vec![vec![0.0; tau + 2]; inst.n_satellites()];
    let mut outflow = vec![vec![0.0; tau + 2]; inst.n_satellites()];
    for p in &sol.periods {
        for r in &p.routes {
            for d in &r.deliveries {
                if d.customer < inst.n_customers() && r.satellite < inst.n_satellites() && p.period <= tau {
                    delivered[d.customer][p.period] += d.quantity;
                    outflow[r.satellite][p.period] += d.quantity;
                }
            }
        }
    }
    for x in &sol.transfers {
        if x.satellite < inst.n_satellites() && (1..=tau).contains(&x.entry) {
            inflow[x.satellite][x.entry] += x.quantity;
        }
    }
    (delivered, inflow, outflow)
}

/// Malformed solutions (bad indices, periods) are reported before any constraint check.
pub fn schema_errors(inst: &Instance, sol: &Solution) -> Vec<String> {
    let tau = inst.horizon();
    let mut e = Vec::new();
    for p in &sol.periods {
        if p.period == 0 || p.period > tau {
            e.push(format!("period {} outside 1..={tau}", p.period));
        }
        for l in &p.first_echelon {
            if l.supplier >= inst.n_suppliers() || l.satellites.iter().any(|&s| s >= inst.n_satellites()) {
                e.push(format!("period {}: first-echelon route names an unknown node", p.period));
            }
        }
        for r in &p.routes {
            if r.satellite >= inst.n_satellites() || r.customers.iter().any(|&c| c >= inst.n_customers()) {
                e.push(format!("period {}: route names an unknown node", p.period));
            }
            if r.deliveries.iter().any(|d| !r.customers.contains(&d.customer)) {
                e.push(format!("period {}: delivery to a customer off the route", p.period));
            }
        }
    }
    for x in &sol.transfers {
        if x.satellite >= inst.n_satellites() || x.entry > x.exit || x.exit > tau + 1 || x.entry > tau {
            e.push(format!("transfer {x:?} is malformed"));
        }
    }
    e
}

/// Lists every violated constraint; empty means feasible with the reported cost.
pub fn validate(inst: &Instance, sol: &Solution) -> Vec<String> {
    let schema = schema_errors(inst, sol);
    if !schema.is_empty() {
        return schema.into_iter().map(|m| format!("schema: {m}")).collect();
    }
    let tau = inst.horizon();
    let mut v = Vec::new();
    let (k1, q1) = (inst.first_fleet().vehicles, inst.first_fleet().capacity as f64);
    let (k2, q2) = (inst.second_fleet().vehicles, inst.second_fleet().capacity as f64);
    let (_, inflow, outflow) = flows(inst, sol);

    let mut seen_periods = vec![false; tau + 1];
    for p in &sol.periods {
        let t = p.period;
        if seen_periods[t] {
            v.push(format!("period {t} listed twice"));
        }
        seen_periods[t] = true;
        if p.first_echelon.len() > k1 {
            v.push(format!("period {t}: {} first-echelon routes exceed {k1}", p.first_echelon.len()));
        }
        if p.routes.len() > k2 {
            v.push(format!("period {t}: {} second-echelon routes exceed {k2}", p.routes.len()));
        }
        let mut sat_visits = vec![0; inst.n_satellites()];
        for l in &p.first_echelon {
            let mut load = 0.0;
            for (i, &s) in l.satellites.iter().enumerate() {
                if l.satellites[..i].contains(&s) {
                    v.push(format!("period {t}: satellite {s} repeated on a first-echelon route"));
                }
                sat_visits[s] += 1;
                load += inflow[s][t];
                if inflow[s][t] < 1.0 - TOL {
                    v.push(format!("period {t}: visited satellite {s} receives {} < 1", inflow[s][t]));
                }
            }
            if load > q1 + TOL {
                v.push(format!("period {t}: first-echelon load {load} exceeds {q1}"));
            }
            if l.satellites.is_empty() {
                v.push(format!("period {t}: empty first-echelon route"));
            }
        }
        for s in 0..inst.n_satellites() {
            if sat_visits[s] > 1 {
                v.push(format!("period {t}: satellite {s} visited {} times", sat_visits[s]));
            }
            if sat_visits[s] == 0 && inflow[s][t] > TOL {
                v.push(format!("period {t}: satellite {s} receives {} without a visit", inflow[s][t]));
            }
        }
        let mut cust_visits = vec![0; inst.n_customers()];
        for r in &p.routes {
            let load: f64 = r.deliveries.iter().map(|d| d.quantity).sum();
            if load > q2 + TOL {
                v.push(format!("period {t}: route load {load} exceeds {q2}"));
            }
            if r.deliveries.iter().any(|d| d.quantity < -TOL) {
                v.push(format!("period {t}: negative delivery"));
            }
            if r.customers.is_empty() {
                v.push(format!("period {t}: empty route"));
            }
            for &c in &r.customers {
                cust_visits[c] += 1;
            }
        }
        for (c, &n) in cust_visits.iter().enumerate() {
            if n > 1 {
                v.push(format!("period {t}: customer {c} visited {n} times"));
            }
        }
    }

    let (cust, sat) = trajectories(inst, sol);
    let (delivered, _, _) = flows(inst, sol);
    for c in 0..inst.n_customers() {
        let cap = inst.customer(c).capacity as f64;
        for h in 1..=tau {
            if cust[c][h - 1] + delivered[c][h] > cap + TOL {
                v.push(format!("customer {c} exceeds capacity in period {h}"));
            }
            if cust[c][h] < -TOL {
                v.push(format!("customer {c} short of {} in period {h}", -cust[c][h]));
            }
        }
    }
    for s in 0..inst.n_satellites() {
        let cap = inst.satellite(s).capacity as f64;
        for t in 1..=tau {
            if sat[s][t - 1] + inflow[s][t] > cap + TOL {
                v.push(format!("satellite {s} exceeds capacity in period {t}"));
            }
            if sat[s][t] < -TOL {
                v.push(format!("satellite {s} short of {} in period {t}", -sat[s][t]));
            }
        }
        let initial: f64 = sol.transfers.iter().filter(|x| x.satellite == s && x.entry == 0).map(|x| x.quantity).sum();
        if (initial - inst.satellite(s).initial_inventory as f64).abs() > TOL {
            v.push(format!("satellite {s}: transfers of the initial stock total {initial}"));
        }
        for t in 1..=tau {
            let out: f64 = sol.transfers.iter().filter(|x| x.satellite == s && x.exit == t).map(|x| x.quantity).sum();
            if (out - outflow[s][t]).abs() > TOL {
                v.push(format!("satellite {s}: transfers leaving in period {t} total {out}, routes carry {}", outflow[s][t]));
            }
        }
    }

    let audited = audit_cost(inst, sol);
    if (audited - sol.cost).abs() > TOL * sol.cost.abs().max(1.0) {
        v.push(format!("reported cost {} differs from audited cost {audited}", sol.cost));
    }
    v
}
