//! Instance generators: the urban-ring transformation of single-depot IRP data
//! and small synthetic instances for exhaustive checks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::model::periods::residual_demand;
use crate::model::{Customer, Fleet, Instance, InstanceData, Point, Satellite, Supplier};

pub const SATELLITE_RING: (f64, f64) = (0.90, 0.99);
pub const SUPPLIER_RING: (f64, f64) = (2.5, 3.0);

/// Smallest circle containing all points, by enumerating every circle through
/// two (as diameter) or three points.
pub fn enclosing_circle(points: &[Point]) -> Result<(Point, f64)> {
    const TOL: f64 = 1e-9;
    if points.is_empty() {
        return input("enclosing circle of an empty point set");
    }
    let covers = |c: &Point, r: f64| points.iter().all(|p| p.dist(c) <= r + TOL * (1.0 + r));
    let mut best = (points[0], 0.0);
    if covers(&best.0, 0.0) {
        return Ok(best);
    }
    best.1 = f64::INFINITY;
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            let c = Point::new((points[i].x + points[j].x) / 2.0, (points[i].y + points[j].y) / 2.0);
            let r = c.dist(&points[i]);
            if r < best.1 && covers(&c, r) {
                best = (c, r);
            }
            for k in j + 1..n {
                if let Some(c) = circumcenter(points[i], points[j], points[k]) {
                    let r = c.dist(&points[i]);
                    if r < best.1 && covers(&c, r) {
                        best = (c, r);
                    }
                }
            }
        }
    }
    Ok(best)
}

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-12 {
        return None;
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    Some(Point::new(
        (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
        (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
    ))
}

/// Places `count` facilities in a ring around `center`, facility `i` inside the
/// `i`-th of `count` equal angular sectors.
pub fn place_facilities(
    center: Point,
    radius: f64,
    count: usize,
    ring: (f64, f64),
    rng: &mut impl Rng,
) -> Result<Vec<Point>> {
    if count == 0 || !(0.0 < ring.0 && ring.0 < ring.1) {
        return input("need count >= 1 and 0 < inner < outer");
    }
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let sector = 2.0 * PI / count as f64;
    Ok((0..count)
        .map(|i| {
            let angle = sector * (i as f64 + rng.gen::<f64>());
            let r = radius * rng.gen_range(ring.0..=ring.1);
            Point::new(center.x + r * angle.cos(), center.y + r * angle.sin())
        })
        .collect())
}

/// Single-depot IRP data in the classic benchmark layout:
///
/// ```text
/// n H C
/// 0 x y B0 r0 h0
/// i x y I0 U L r h        (one line per customer)
/// ```
///
/// `n` counts the depot plus customers, `H` is the horizon, `C` the vehicle
/// capacity. Customer demand `r` is constant over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceInstance {
    pub horizon: usize,
    pub vehicle_capacity: i64,
    pub depot: Point,
    pub depot_capacity: i64,
    pub production: i64,
    pub depot_holding: f64,
    pub customers: Vec<SourceCustomer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceCustomer {
    pub pos: Point,
    pub initial_inventory: i64,
    pub max_level: i64,
    pub demand: i64,
    pub holding_cost: f64,
}

pub fn parse_source(text: &str) -> Result<SourceInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'));
    let num = |t: &[&str], i: usize, line: usize| -> Result<f64> {
        t.get(i)
            .ok_or_else(|| Error::Parse { line, msg: format!("missing field {}", i + 1) })?
            .parse::<f64>()
            .map_err(|_| Error::Parse { line, msg: format!("invalid number `{}`", t[i]) })
    };
    let (ln, head) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty source file".into() })?;
    let n = num(&head, 0, ln)? as usize;
    let horizon = num(&head, 1, ln)? as usize;
    let vehicle_capacity = num(&head, 2, ln)? as i64;
    let (ln, d) = lines.next().ok_or(Error::Parse { line: ln, msg: "missing depot line".into() })?;
    if d.len() < 6 {
        return Err(Error::Parse { line: ln, msg: "depot line needs 6 fields".into() });
    }
    let mut customers = Vec::new();
    for (ln, t) in lines {
        if t.len() < 8 {
            return Err(Error::Parse { line: ln, msg: "customer line needs 8 fields".into() });
        }
        customers.push(SourceCustomer {
            pos: Point::new(num(&t, 1, ln)?, num(&t, 2, ln)?),
            initial_inventory: num(&t, 3, ln)? as i64,
            max_level: num(&t, 4, ln)? as i64,
            demand: num(&t, 6, ln)? as i64,
            holding_cost: num(&t, 7, ln)?,
        });
    }
    if customers.len() + 1 != n {
        return input(format!("header announces {n} nodes, found {}", customers.len() + 1));
    }
    Ok(SourceInstance {
        horizon,
        vehicle_capacity,
        depot: Point::new(num(&d, 1, ln)?, num(&d, 2, ln)?),
        depot_capacity: num(&d, 3, ln)? as i64,
        production: num(&d, 4, ln)? as i64,
        depot_holding: num(&d, 5, ln)?,
        customers,
    })
}

pub fn write_source(s: &SourceInstance) -> String {
    let mut out = format!("{} {} {}\n", s.customers.len() + 1, s.horizon, s.vehicle_capacity);
    out += &format!("0 {} {} {} {} {}\n", s.depot.x, s.depot.y, s.depot_capacity, s.production, s.depot_holding);
    for (i, c) in s.customers.iter().enumerate() {
        out += &format!(
            "{} {} {} {} {} 0 {} {}\n",
            i + 1,
            c.pos.x,
            c.pos.y,
            c.initial_inventory,
            c.max_level,
            c.demand,
            c.holding_cost
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub suppliers: usize,
    pub satellites: usize,
    pub k2: usize,
    pub seed: u64,
}

/// Satellite capacities and inventories plus both fleets.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCapacities {
    pub satellite_capacity: i64,
    pub satellite_inventory: Vec<i64>,
    pub first_fleet: Fleet,
    pub second_fleet: Fleet,
}

pub fn derive_capacities(
    source: &SourceInstance,
    suppliers: usize,
    satellites: usize,
    k2: usize,
    total_residual_demand: i64,
    rng: &mut impl Rng,
) -> Result<DerivedCapacities> {
    if satellites == 0 || k2 == 0 || suppliers == 0 {
        return input("need at least one supplier, one satellite and one second-echelon vehicle");
    }
    let satellite_capacity = source.depot_capacity + source.production;
    let share = total_residual_demand as f64 / satellites as f64;
    let satellite_inventory = (0..satellites)
        .map(|_| {
            let coef = rng.gen_range(0.4..=0.6);
            ((coef * share).round() as i64).min(satellite_capacity)
        })
        .collect();
    Ok(DerivedCapacities {
        satellite_capacity,
        satellite_inventory,
        first_fleet: Fleet { vehicles: suppliers, capacity: 2 * source.production },
        second_fleet: Fleet { vehicles: k2, capacity: source.vehicle_capacity / k2 as i64 },
    })
}

/// Builds a two-echelon instance from single-depot data.
pub fn transform(source: &SourceInstance, cfg: &GenConfig) -> Result<InstanceData> {
    if source.customers.is_empty() {
        return input("source has no customers");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let positions: Vec<Point> = source.customers.iter().map(|c| c.pos).collect();
    let (center, radius) = enclosing_circle(&positions)?;
    let sat_pos = place_facilities(center, radius, cfg.satellites, SATELLITE_RING, &mut rng)?;
    let sup_pos = place_facilities(center, radius, cfg.suppliers, SUPPLIER_RING, &mut rng)?;

    let customers: Vec<Customer> = source
        .customers
        .iter()
        .enumerate()
        .map(|(i, c)| Customer {
            id: (cfg.suppliers + cfg.satellites + i) as u32,
            pos: c.pos,
            capacity: c.max_level,
            initial_inventory: c.initial_inventory,
            holding_cost: c.holding_cost,
            demand: vec![c.demand; source.horizon],
        })
        .collect();
    let total: i64 = customers
        .iter()
        .map(|c| residual_demand(c.initial_inventory, &c.demand).iter().sum::<i64>())
        .sum();
    let caps = derive_capacities(source, cfg.suppliers, cfg.satellites, cfg.k2, total, &mut rng)?;
    let data = InstanceData {
        horizon: source.horizon,
        suppliers: sup_pos.into_iter().enumerate().map(|(i, pos)| Supplier { id: i as u32, pos }).collect(),
        satellites: sat_pos
            .into_iter()
            .enumerate()
            .map(|(i, pos)| Satellite {
                id: (cfg.suppliers + i) as u32,
                pos,
                capacity: caps.satellite_capacity,
                initial_inventory: caps.satellite_inventory[i],
                holding_cost: source.depot_holding,
            })
            .collect(),
        customers,
        first_fleet: caps.first_fleet,
        second_fleet: caps.second_fleet,
        edge_overrides: vec![],
        round_distances: false,
    };
    Instance::new(data.clone())?;
    Ok(data)
}

/// Random single-depot data in the style of the classic 3-period benchmark:
/// demands in [10, 100], maximum levels 2-3 times demand, starting levels one
/// demand below the maximum, depot producing the total demand each period.
pub fn synthetic_source(customers: usize, horizon: usize, high_holding: bool, seed: u64) -> SourceInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let customers: Vec<SourceCustomer> = (0..customers)
        .map(|_| {
            let demand = rng.gen_range(10..=100);
            let max_level = demand * rng.gen_range(2..=3);
            let h = if high_holding { rng.gen_range(10..=50) } else { rng.gen_range(1..=5) };
            SourceCustomer {
                pos: Point::new(rng.gen_range(0..=500) as f64, rng.gen_range(0..=500) as f64),
                initial_inventory: max_level - demand,
                max_level,
                demand,
                holding_cost: h as f64 / 100.0,
            }
        })
        .collect();
    let production: i64 = customers.iter().map(|c| c.demand).sum();
    SourceInstance {
        horizon,
        vehicle_capacity: production * 3 / 2,
        depot: Point::new(rng.gen_range(0..=500) as f64, rng.gen_range(0..=500) as f64),
        depot_capacity: production * 2,
        production,
        depot_holding: if high_holding { 0.3 } else { 0.03 },
        customers,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicroConfig {
    pub customers: usize,
    pub horizon: usize,
    pub k2: usize,
    pub seed: u64,
}

/// A small feasible instance: one supplier, two satellites, integral demands.
pub fn generate_micro(cfg: &MicroConfig) -> Result<InstanceData> {
    if cfg.customers == 0 || cfg.customers > 6 || !(2..=3).contains(&cfg.horizon) || cfg.k2 == 0 {
        return input("micro instances need 1..=6 customers, horizon 2 or 3 and k2 >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..100 {
        let data = draw_micro(cfg, &mut rng)?;
        if Instance::new(data.clone()).is_ok() && just_in_time_feasible(&data) {
            return Ok(data);
        }
    }
    Err(Error::Infeasible("no feasible micro instance after 100 draws".into()))
}

fn draw_micro(cfg: &MicroConfig, rng: &mut ChaCha8Rng) -> Result<InstanceData> {
    let n = cfg.customers;
    let tau = cfg.horizon;
    let positions: Vec<Point> =
        (0..n).map(|_| Point::new(rng.gen_range(0..=100) as f64, rng.gen_range(0..=100) as f64)).collect();
    let (center, radius) = enclosing_circle(&positions)?;
    let sats = place_facilities(center, radius, 2, SATELLITE_RING, rng)?;
    let sup = place_facilities(center, radius, 1, SUPPLIER_RING, rng)?;

    let customers: Vec<Customer> = positions
        .iter()
        .enumerate()
        .map(|(i, &pos)| {
            let demand: Vec<i64> = (0..tau).map(|_| rng.gen_range(1..=6)).collect();
            let peak = *demand.iter().max().unwrap();
            let capacity = 2 * peak + rng.gen_range(0..=4);
            Customer {
                id: (3 + i) as u32,
                pos,
                capacity,
                initial_inventory: rng.gen_range(0..=capacity / 2),
                holding_cost: rng.gen_range(1..=10) as f64 / 100.0,
                demand,
            }
        })
        .collect();
    let residual: Vec<Vec<i64>> =
        customers.iter().map(|c| residual_demand(c.initial_inventory, &c.demand)).collect();
    let per_period = (1..=tau).map(|h| residual.iter().map(|r| r[h]).sum::<i64>()).max().unwrap_or(0);
    let peak = residual.iter().flat_map(|r| r.iter().copied()).max().unwrap_or(0).max(1);
    let q2 = peak.max((per_period + cfg.k2 as i64 - 1) / cfg.k2 as i64) + rng.gen_range(0..=3);
    let q1 = q2 * cfg.k2 as i64;
    let total: i64 = residual.iter().map(|r| r.iter().sum::<i64>()).sum();
    let capacity = total + q1;
    let satellites = sats
        .into_iter()
        .enumerate()
        .map(|(i, pos)| {
            let coef = rng.gen_range(0.4..=0.6);
            Satellite {
                id: (1 + i) as u32,
                pos,
                capacity,
                initial_inventory: (coef * total as f64 / 2.0).round() as i64,
                holding_cost: rng.gen_range(1..=5) as f64 / 100.0,
            }
        })
        .collect();
    Ok(InstanceData {
        horizon: tau,
        suppliers: vec![Supplier { id: 0, pos: sup[0] }],
        satellites,
        customers,
        first_fleet: Fleet { vehicles: 1, capacity: q1 },
        second_fleet: Fleet { vehicles: cfg.k2, capacity: q2 },
        edge_overrides: vec![],
        round_distances: false,
    })
}

/// Serves every residual demand in its own period from satellite 0: customers
/// packed first-fit-decreasing into the second-echelon fleet, the satellite
/// topped up by one first-echelon trip whenever its stock runs short.
pub fn just_in_time_feasible(data: &InstanceData) -> bool {
    let q2 = data.second_fleet.capacity;
    let sat = &data.satellites[0];
    let mut stock = sat.initial_inventory;
    for t in 1..=data.horizon {
        let mut items: Vec<i64> = data
            .customers
            .iter()
            .map(|c| residual_demand(c.initial_inventory, &c.demand)[t])
            .filter(|&d| d > 0)
            .collect();
        items.sort_unstable_by(|a, b| b.cmp(a));
        let mut bins: Vec<i64> = Vec::new();
        for d in &items {
            if *d > q2 {
                return false;
            }
            match bins.iter_mut().find(|b| **b + d <= q2) {
                Some(b) => *b += d,
                None => bins.push(*d),
            }
        }
        if bins.len() > data.second_fleet.vehicles {
            return false;
        }
        let out: i64 = items.iter().sum();
        let inflow = (out - stock).max(0);
        if inflow > 0 && (data.first_fleet.vehicles == 0 || inflow > data.first_fleet.capacity) {
            return false;
        }
        if stock + inflow > sat.capacity {
            return false;
        }
        stock += inflow - out;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::io::write_instance;

    fn brute_circle(points: &[Point]) -> f64 {
        let mut best = f64::INFINITY;
        let covers = |c: &Point, r: f64| points.iter().all(|p| p.dist(c) <= r + 1e-9);
        for i in 0..points.len() {
            if covers(&points[i], 0.0) {
                return 0.0;
            }
            for j in 0..points.len() {
                let c = Point::new((points[i].x + points[j].x) / 2.0, (points[i].y + points[j].y) / 2.0);
                if covers(&c, c.dist(&points[i])) {
                    best = best.min(c.dist(&points[i]));
                }
                for k in 0..points.len() {
                    if let Some(c) = circumcenter(points[i], points[j], points[k]) {
                        if covers(&c, c.dist(&points[i])) {
                            best = best.min(c.dist(&points[i]));
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn circle_examples() {
        let (c, r) = enclosing_circle(&[Point::new(0.0, 0.0), Point::new(2.0, 0.0)]).unwrap();
        assert_eq!((c.x, c.y, r), (1.0, 0.0, 1.0));
        let (c, r) = enclosing_circle(&[Point::new(5.0, 5.0)]).unwrap();
        assert_eq!((c.x, c.y, r), (5.0, 5.0, 0.0));
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 2.0)];
        let (_, r) = enclosing_circle(&pts).unwrap();
        assert!((r - brute_circle(&pts)).abs() < 1e-9);
        assert!(enclosing_circle(&[]).is_err());
    }

    #[test]
    fn circle_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let n = rng.gen_range(2..12);
            let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0))).collect();
            let (c, r) = enclosing_circle(&pts).unwrap();
            assert!(pts.iter().all(|p| p.dist(&c) <= r + 1e-9));
            assert!((r - brute_circle(&pts)).abs() < 1e-9);
        }
    }

    #[test]
    fn facilities_land_in_their_sectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = Point::new(10.0, -3.0);
        let pts = place_facilities(o, 20.0, 2, SATELLITE_RING, &mut rng).unwrap();
        for (i, p) in pts.iter().enumerate() {
            let d = p.dist(&o);
            assert!((18.0 - 1e-9..=19.8 + 1e-9).contains(&d));
            let mut a = (p.y - o.y).atan2(p.x - o.x);
            if a < 0.0 {
                a += 2.0 * PI;
            }
            assert!(a >= i as f64 * PI - 1e-9 && a <= (i + 1) as f64 * PI + 1e-9);
        }
        let sup = place_facilities(o, 20.0, 1, SUPPLIER_RING, &mut rng).unwrap();
        assert!((50.0 - 1e-9..=60.0 + 1e-9).contains(&sup[0].dist(&o)));

        let a = place_facilities(o, 20.0, 3, SATELLITE_RING, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let b = place_facilities(o, 20.0, 3, SATELLITE_RING, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(a, b);
        let z = place_facilities(o, 0.0, 1, SATELLITE_RING, &mut rng).unwrap();
        assert!((0.9 - 1e-9..=0.99 + 1e-9).contains(&z[0].dist(&o)));
    }

    fn source_with(capacity: i64, production: i64, vehicle: i64) -> SourceInstance {
        SourceInstance {
            horizon: 3,
            vehicle_capacity: vehicle,
            depot: Point::new(0.0, 0.0),
            depot_capacity: capacity,
            production,
            depot_holding: 0.1,
            customers: vec![],
        }
    }

    #[test]
    fn capacity_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = derive_capacities(&source_with(100, 50, 100), 1, 2, 3, 120, &mut rng).unwrap();
        assert_eq!(d.satellite_capacity, 150);
        assert_eq!(d.first_fleet, Fleet { vehicles: 1, capacity: 100 });
        assert_eq!(d.second_fleet.capacity, 33);
        for inv in d.satellite_inventory {
            assert!((24..=36).contains(&inv));
        }
    }

    #[test]
    fn transform_respects_rings_and_shares() {
        let src = synthetic_source(10, 3, true, 5);
        let text = write_source(&src);
        assert_eq!(parse_source(&text).unwrap(), src);
        for (a, b) in [(1, 2), (2, 3)] {
            let data = transform(&src, &GenConfig { suppliers: a, satellites: b, k2: 3, seed: 11 }).unwrap();
            let pts: Vec<Point> = data.customers.iter().map(|c| c.pos).collect();
            let (o, r) = enclosing_circle(&pts).unwrap();
            for s in &data.satellites {
                let d = s.pos.dist(&o);
                assert!(d >= 0.9 * r - 1e-9 && d <= 0.99 * r + 1e-9);
            }
            for u in &data.suppliers {
                let d = u.pos.dist(&o);
                assert!(d >= 2.5 * r - 1e-9 && d <= 3.0 * r + 1e-9);
            }
            let inst = Instance::new(data.clone()).unwrap();
            let total = inst.total_residual_demand() as f64;
            let sum: i64 = data.satellites.iter().map(|s| s.initial_inventory).sum();
            assert!(sum as f64 >= 0.4 * total - b as f64 && sum as f64 <= 0.6 * total + b as f64);
            assert_eq!(data.first_fleet.vehicles, a);
        }
    }

    #[test]
    fn micro_is_deterministic_and_valid() {
        let cfg = MicroConfig { customers: 3, horizon: 3, k2: 2, seed: 1 };
        let a = write_instance(&generate_micro(&cfg).unwrap());
        let b = write_instance(&generate_micro(&cfg).unwrap());
        assert_eq!(a, b);
        for seed in 0..40 {
            for n in 1..=6 {
                let data = generate_micro(&MicroConfig { customers: n, horizon: 2 + (seed % 2) as usize, k2: 2, seed }).unwrap();
                assert_eq!(data.customers.len(), n);
                assert_eq!(data.satellites.len(), 2);
                assert!(data.customers.iter().all(|c| c.demand.iter().all(|&d| d > 0)));
                assert!(Instance::new(data.clone()).is_ok());
                assert!(just_in_time_feasible(&data));
            }
        }
    }
}
