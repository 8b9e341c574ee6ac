use serde::{Deserialize, Serialize};

use super::periods::CustomerPeriods;
use crate::error::{input, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Supplier {
    pub id: u32,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Satellite {
    pub id: u32,
    pub pos: Point,
    pub capacity: i64,
    pub initial_inventory: i64,
    pub holding_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: u32,
    pub pos: Point,
    pub capacity: i64,
    pub initial_inventory: i64,
    pub holding_cost: f64,
    /// Demand of periods 1..=horizon (`demand[h - 1]` is the demand of period `h`).
    pub demand: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fleet {
    pub vehicles: usize,
    pub capacity: i64,
}

/// Raw instance contents, as read from a file or produced by a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub horizon: usize,
    pub suppliers: Vec<Supplier>,
    pub satellites: Vec<Satellite>,
    pub customers: Vec<Customer>,
    pub first_fleet: Fleet,
    pub second_fleet: Fleet,
    /// Explicit edge costs `(id, id, cost)` replacing the Euclidean value.
    #[serde(default)]
    pub edge_overrides: Vec<(u32, u32, f64)>,
    /// Round Euclidean distances to the nearest integer.
    #[serde(default)]
    pub round_distances: bool,
}

/// A validated instance with its travel-cost matrix and per-customer derived periods.
///
/// Nodes are numbered suppliers first, then satellites, then customers.
#[derive(Debug, Clone)]
pub struct Instance {
    data: InstanceData,
    n_nodes: usize,
    costs: Vec<f64>,
    periods: Vec<CustomerPeriods>,
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        validate(&data)?;
        let n_nodes = data.suppliers.len() + data.satellites.len() + data.customers.len();
        let mut pos = Vec::with_capacity(n_nodes);
        let mut ids = Vec::with_capacity(n_nodes);
        pos.extend(data.suppliers.iter().map(|u| u.pos));
        ids.extend(data.suppliers.iter().map(|u| u.id));
        pos.extend(data.satellites.iter().map(|s| s.pos));
        ids.extend(data.satellites.iter().map(|s| s.id));
        pos.extend(data.customers.iter().map(|c| c.pos));
        ids.extend(data.customers.iter().map(|c| c.id));

        let mut costs = vec![0.0; n_nodes * n_nodes];
        for a in 0..n_nodes {
            for b in 0..n_nodes {
                let d = pos[a].dist(&pos[b]);
                costs[a * n_nodes + b] = if data.round_distances { d.round() } else { d };
            }
        }
        for &(i, j, c) in &data.edge_overrides {
            let a = ids.iter().position(|&x| x == i);
            let b = ids.iter().position(|&x| x == j);
            match (a, b) {
                (Some(a), Some(b)) if c >= 0.0 && c.is_finite() => {
                    costs[a * n_nodes + b] = c;
                    costs[b * n_nodes + a] = c;
                }
                (Some(_), Some(_)) => return input(format!("edge {i}-{j} has invalid cost {c}")),
                _ => return input(format!("edge override references unknown node {i} or {j}")),
            }
        }

        let periods = data
            .customers
            .iter()
            .map(|c| CustomerPeriods::new(c.initial_inventory, c.capacity, &c.demand))
            .collect();
        Ok(Instance { data, n_nodes, costs, periods })
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn horizon(&self) -> usize {
        self.data.horizon
    }

    /// The artificial end-inventory period.
    pub fn end_period(&self) -> usize {
        self.data.horizon + 1
    }

    pub fn n_suppliers(&self) -> usize {
        self.data.suppliers.len()
    }

    pub fn n_satellites(&self) -> usize {
        self.data.satellites.len()
    }

    pub fn n_customers(&self) -> usize {
        self.data.customers.len()
    }

    pub fn suppliers(&self) -> &[Supplier] {
        &self.data.suppliers
    }

    pub fn satellites(&self) -> &[Satellite] {
        &self.data.satellites
    }

    pub fn customers(&self) -> &[Customer] {
        &self.data.customers
    }

    pub fn satellite(&self, s: usize) -> &Satellite {
        &self.data.satellites[s]
    }

    pub fn customer(&self, c: usize) -> &Customer {
        &self.data.customers[c]
    }

    pub fn first_fleet(&self) -> Fleet {
        self.data.first_fleet
    }

    pub fn second_fleet(&self) -> Fleet {
        self.data.second_fleet
    }

    /// Demand of customer `c` in period `h` (1-based); 0 outside the horizon.
    pub fn demand(&self, c: usize, h: usize) -> i64 {
        if h == 0 || h > self.data.horizon {
            0
        } else {
            self.data.customers[c].demand[h - 1]
        }
    }

    pub fn periods(&self, c: usize) -> &CustomerPeriods {
        &self.periods[c]
    }

    pub fn supplier_node(&self, u: usize) -> usize {
        u
    }

    pub fn satellite_node(&self, s: usize) -> usize {
        self.data.suppliers.len() + s
    }

    pub fn customer_node(&self, c: usize) -> usize {
        self.data.suppliers.len() + self.data.satellites.len() + c
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.costs[a * self.n_nodes + b]
    }

    pub fn customer_cost(&self, a: usize, b: usize) -> f64 {
        self.cost(self.customer_node(a), self.customer_node(b))
    }

    pub fn satellite_customer_cost(&self, s: usize, c: usize) -> f64 {
        self.cost(self.satellite_node(s), self.customer_node(c))
    }

    pub fn customer_index(&self, id: u32) -> Result<usize> {
        self.data
            .customers
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::Input(format!("unknown customer id {id}")))
    }

    fn check_customer(&self, c: usize) -> Result<()> {
        if c >= self.n_customers() {
            return input(format!("customer index {c} out of range"));
        }
        Ok(())
    }

    fn check_period(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.horizon() {
            return input(format!("period {t} outside 1..={}", self.horizon()));
        }
        Ok(())
    }

    /// Initial stock left at the end of periods 1..=horizon.
    pub fn residual_inventory(&self, c: usize) -> Result<Vec<i64>> {
        self.check_customer(c)?;
        Ok(self.periods[c].residual_inventory[1..].to_vec())
    }

    /// Residual demand of periods 1..=horizon.
    pub fn residual_demand(&self, c: usize) -> Result<Vec<i64>> {
        self.check_customer(c)?;
        Ok(self.periods[c].residual_demand[1..].to_vec())
    }

    pub fn delivery_periods(&self, c: usize, t: usize) -> Result<Vec<usize>> {
        self.check_customer(c)?;
        self.check_period(t)?;
        Ok(self.periods[c].targets(t).iter().map(|sp| sp.target).collect())
    }

    pub fn subdelivery_upper_bound(&self, c: usize, t: usize, h: usize) -> Result<i64> {
        self.check_customer(c)?;
        self.check_period(t)?;
        self.periods[c]
            .ub(t, h)
            .ok_or_else(|| Error::Input(format!("period {h} is not a delivery target of customer {c} in period {t}")))
    }

    /// Total residual demand over all customers and periods.
    pub fn total_residual_demand(&self) -> i64 {
        self.periods.iter().map(|p| p.residual_demand.iter().sum::<i64>()).sum()
    }
}

fn validate(d: &InstanceData) -> Result<()> {
    if d.horizon == 0 {
        return input("horizon must be at least 1");
    }
    if d.suppliers.is_empty() || d.satellites.is_empty() {
        return input("need at least one supplier and one satellite");
    }
    if d.customers.len() > 64 {
        return input("at most 64 customers are supported");
    }
    if d.second_fleet.capacity > d.first_fleet.capacity {
        return input("second-echelon capacity exceeds first-echelon capacity");
    }
    if d.first_fleet.capacity <= 0 || d.second_fleet.capacity <= 0 {
        return input("vehicle capacities must be positive");
    }
    let mut ids: Vec<u32> = d
        .suppliers
        .iter()
        .map(|u| u.id)
        .chain(d.satellites.iter().map(|s| s.id))
        .chain(d.customers.iter().map(|c| c.id))
        .collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return input("node ids must be unique");
    }
    for s in &d.satellites {
        if s.capacity < 0 || s.initial_inventory < 0 || s.initial_inventory > s.capacity {
            return input(format!("satellite {}: need 0 <= initial inventory <= capacity", s.id));
        }
        if !(s.holding_cost >= 0.0) {
            return input(format!("satellite {}: negative holding cost", s.id));
        }
    }
    for c in &d.customers {
        if c.demand.len() != d.horizon {
            return input(format!("customer {}: expected {} demands", c.id, d.horizon));
        }
        if c.capacity < 0 || c.initial_inventory < 0 || c.initial_inventory > c.capacity {
            return input(format!("customer {}: need 0 <= initial inventory <= capacity", c.id));
        }
        if c.demand.iter().any(|&x| x < 0 || x > c.capacity) {
            return input(format!("customer {}: demands must lie in [0, capacity]", c.id));
        }
        if !(c.holding_cost >= 0.0) {
            return input(format!("customer {}: negative holding cost", c.id));
        }
    }
    Ok(())
}
