//! Cheapest first-echelon tour for every nonempty satellite subset.

use serde::{Deserialize, Serialize};

use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstEchelonRoute {
    /// Supplier index.
    pub supplier: usize,
    /// Satellite indices in visiting order.
    pub satellites: Vec<usize>,
    /// Bit `s` set iff satellite `s` is visited.
    pub mask: u32,
    pub cost: f64,
}

impl FirstEchelonRoute {
    pub fn visits(&self, s: usize) -> bool {
        self.mask & (1 << s) != 0
    }
}

/// Held-Karp over the satellites for one supplier. Returns, for every mask,
/// the best closed tour cost and visiting order.
fn held_karp(inst: &Instance, u: usize) -> Vec<(f64, Vec<usize>)> {
    let n = inst.n_satellites();
    let full = 1usize << n;
    let un = inst.supplier_node(u);
    let sn = |s: usize| inst.satellite_node(s);
    let mut dp = vec![f64::INFINITY; full * n];
    let mut prev = vec![usize::MAX; full * n];
    for s in 0..n {
        dp[(1 << s) * n + s] = inst.cost(un, sn(s));
    }
    for mask in 1..full {
        for last in 0..n {
            let cur = dp[mask * n + last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let m2 = mask | (1 << next);
                let cand = cur + inst.cost(sn(last), sn(next));
                if cand < dp[m2 * n + next] {
                    dp[m2 * n + next] = cand;
                    prev[m2 * n + next] = last;
                }
            }
        }
    }
    let mut out = vec![(f64::INFINITY, Vec::new()); full];
    for (mask, slot) in out.iter_mut().enumerate().skip(1) {
        let mut best = f64::INFINITY;
        let mut best_last = usize::MAX;
        for last in 0..n {
            if mask & (1 << last) == 0 {
                continue;
            }
            let c = dp[mask * n + last] + inst.cost(sn(last), un);
            if c < best {
                best = c;
                best_last = last;
            }
        }
        let mut order = Vec::new();
        let (mut m, mut last) = (mask, best_last);
        while last != usize::MAX {
            order.push(last);
            let p = prev[m * n + last];
            m &= !(1 << last);
            last = p;
        }
        order.reverse();
        let mut rev = order.clone();
        rev.reverse();
        if rev < order {
            order = rev;
        }
        *slot = (best, order);
    }
    out
}

/// One route per nonempty satellite subset, in increasing mask order.
pub fn enumerate_routes(inst: &Instance) -> Vec<FirstEchelonRoute> {
    let n = inst.n_satellites();
    let tables: Vec<_> = (0..inst.n_suppliers()).map(|u| held_karp(inst, u)).collect();
    (1..(1usize << n))
        .map(|mask| {
            let mut best: Option<FirstEchelonRoute> = None;
            for (u, table) in tables.iter().enumerate() {
                let (cost, order) = &table[mask];
                if best.as_ref().map_or(true, |b| *cost < b.cost) {
                    best = Some(FirstEchelonRoute {
                        supplier: u,
                        satellites: order.clone(),
                        mask: mask as u32,
                        cost: *cost,
                    });
                }
            }
            best.expect("at least one supplier")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Customer, Fleet, InstanceData, Point, Satellite, Supplier};

    fn instance(suppliers: &[(f64, f64)], sats: &[(f64, f64)]) -> Instance {
        let mut id = 0;
        let mut next = || {
            id += 1;
            id
        };
        Instance::new(InstanceData {
            horizon: 3,
            suppliers: suppliers.iter().map(|&(x, y)| Supplier { id: next(), pos: Point::new(x, y) }).collect(),
            satellites: sats
                .iter()
                .map(|&(x, y)| Satellite {
                    id: next(),
                    pos: Point::new(x, y),
                    capacity: 10,
                    initial_inventory: 0,
                    holding_cost: 0.0,
                })
                .collect(),
            customers: vec![Customer {
                id: next(),
                pos: Point::new(0.0, 1.0),
                capacity: 5,
                initial_inventory: 0,
                holding_cost: 0.0,
                demand: vec![1, 1, 1],
            }],
            first_fleet: Fleet { vehicles: 1, capacity: 10 },
            second_fleet: Fleet { vehicles: 1, capacity: 5 },
            edge_overrides: vec![],
            round_distances: false,
        })
        .unwrap()
    }

    #[test]
    fn route_counts() {
        let two = instance(&[(0.0, 0.0)], &[(1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(enumerate_routes(&two).len(), 3);
        assert_eq!(enumerate_routes(&two).len() * two.horizon(), 9);
        let three = instance(&[(0.0, 0.0)], &[(1.0, 0.0), (2.0, 0.0), (0.0, 3.0)]);
        assert_eq!(enumerate_routes(&three).len() * three.horizon(), 21);
    }

    #[test]
    fn collinear_tour() {
        let inst = instance(&[(0.0, 0.0)], &[(1.0, 0.0), (2.0, 0.0)]);
        let r = &enumerate_routes(&inst)[2];
        assert_eq!(r.mask, 0b11);
        assert!((r.cost - 4.0).abs() < 1e-12);
        assert_eq!(r.satellites, vec![0, 1]);
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn no_permutation_is_cheaper() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let sups: Vec<(f64, f64)> = (0..2).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
            let sats: Vec<(f64, f64)> = (0..4).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
            let inst = instance(&sups, &sats);
            for route in enumerate_routes(&inst) {
                let members: Vec<usize> = (0..4).filter(|&s| route.visits(s)).collect();
                let mut walked = inst.cost(inst.supplier_node(route.supplier), inst.satellite_node(route.satellites[0]));
                for w in route.satellites.windows(2) {
                    walked += inst.cost(inst.satellite_node(w[0]), inst.satellite_node(w[1]));
                }
                walked += inst.cost(inst.satellite_node(*route.satellites.last().unwrap()), inst.supplier_node(route.supplier));
                assert!((walked - route.cost).abs() < 1e-9);
                for u in 0..2 {
                    for p in permutations(&members) {
                        let un = inst.supplier_node(u);
                        let mut c = inst.cost(un, inst.satellite_node(p[0]));
                        for w in p.windows(2) {
                            c += inst.cost(inst.satellite_node(w[0]), inst.satellite_node(w[1]));
                        }
                        c += inst.cost(inst.satellite_node(*p.last().unwrap()), un);
                        assert!(route.cost <= c + 1e-9);
                    }
                }
            }
        }
    }
}
