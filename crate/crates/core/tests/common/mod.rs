//! Oracles shared by the integration tests. Nothing here calls the solver's
//! own formulation code; it only uses instance data and the LP engine.
#![allow(dead_code)]

use teirp_core::column::{Column, Delivery};
use teirp_core::generate::{generate_micro, MicroConfig};
use teirp_core::lp::{LinearProgram, LpStatus, Sense};
use teirp_core::Instance;

/// Seeded micro grid: |N| cycles 3,4,5; τ cycles 2,3 every three seeds; K² 2 or 3 every six.
pub fn micro_params(seed: u64) -> (usize, usize, usize) {
    let s = seed as usize;
    (3 + s % 3, 2 + (s / 3) % 2, 2 + (s / 6) % 2)
}

pub fn micro(seed: u64) -> Instance {
    let (customers, horizon, k2) = micro_params(seed);
    micro_with(customers, horizon, k2, seed)
}

pub fn micro_with(customers: usize, horizon: usize, k2: usize, seed: u64) -> Instance {
    Instance::new(generate_micro(&MicroConfig { customers, horizon, k2, seed }).unwrap()).unwrap()
}

fn routes(n: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() && (cur.len() == 1 || cur[0] < cur[cur.len() - 1]) {
            out.push(cur.clone());
        }
        for c in 0..n {
            if !cur.contains(&c) {
                cur.push(c);
                grow(cur, n, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Every elementary route (one orientation) with every extreme delivery pattern:
/// each sub-delivery at zero or its bound, at most one strictly between.
pub fn all_columns(inst: &Instance) -> Vec<Column> {
    let q2 = inst.second_fleet().capacity;
    let mut out = Vec::new();
    let routes = routes(inst.n_customers());
    for s in 0..inst.n_satellites() {
        for t in 1..=inst.horizon() {
            for r in &routes {
                let items: Vec<(usize, usize, i64)> = r
                    .iter()
                    .flat_map(|&c| inst.periods(c).targets(t).iter().filter(|sp| sp.ub > 0).map(move |sp| (c, sp.target, sp.ub)))
                    .collect();
                for mask in 0u32..(1 << items.len()) {
                    let full: Vec<usize> = (0..items.len()).filter(|&i| mask & (1 << i) != 0).collect();
                    let load: i64 = full.iter().map(|&i| items[i].2).sum();
                    if load > q2 {
                        continue;
                    }
                    let base: Vec<Delivery> =
                        full.iter().map(|&i| Delivery { customer: items[i].0, target: items[i].1, quantity: items[i].2 }).collect();
                    out.push(Column::new(inst, s, t, r.clone(), base.clone()).unwrap());
                    for p in (0..items.len()).filter(|&i| mask & (1 << i) == 0) {
                        let q = q2 - load;
                        if q > 0 && q < items[p].2 {
                            let mut d = base.clone();
                            d.push(Delivery { customer: items[p].0, target: items[p].1, quantity: q });
                            out.push(Column::new(inst, s, t, r.clone(), d).unwrap());
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of columns `all_columns` would produce, without building them.
pub fn count_columns(inst: &Instance) -> usize {
    let q2 = inst.second_fleet().capacity;
    let mut n = 0;
    for r in routes(inst.n_customers()) {
        for t in 1..=inst.horizon() {
            let ubs: Vec<i64> =
                r.iter().flat_map(|&c| inst.periods(c).targets(t).iter().filter(|sp| sp.ub > 0).map(|sp| sp.ub)).collect();
            for mask in 0u32..(1 << ubs.len()) {
                let load: i64 = (0..ubs.len()).filter(|&i| mask & (1 << i) != 0).map(|i| ubs[i]).sum();
                if load <= q2 {
                    n += 1 + (0..ubs.len()).filter(|&i| mask & (1 << i) == 0 && q2 - load > 0 && q2 - load < ubs[i]).count();
                }
            }
        }
    }
    n * inst.n_satellites()
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

/// Cheapest closed tour from any supplier through exactly the satellites of `mask`.
fn first_tour(inst: &Instance, mask: usize) -> f64 {
    let sats: Vec<usize> = (0..inst.n_satellites()).filter(|s| mask & (1 << s) != 0).collect();
    let mut best = f64::INFINITY;
    for u in 0..inst.n_suppliers() {
        let un = inst.supplier_node(u);
        for p in permutations(&sats) {
            let mut prev = un;
            let mut c = 0.0;
            for &s in &p {
                c += inst.cost(prev, inst.satellite_node(s));
                prev = inst.satellite_node(s);
            }
            best = best.min(c + inst.cost(prev, un));
        }
    }
    best
}

/// LP relaxation of a compact model: arc flows with single-commodity loads on
/// the second echelon, end-of-period stock variables, no delivery split.
/// Holding is charged the same way the column objective charges it.
pub fn compact_lp_bound(inst: &Instance) -> f64 {
    let tau = inst.horizon();
    let (ns, nc) = (inst.n_satellites(), inst.n_customers());
    let (k1, q1) = (inst.first_fleet().vehicles as f64, inst.first_fleet().capacity as f64);
    let (k2, q2) = (inst.second_fleet().vehicles as f64, inst.second_fleet().capacity as f64);
    let mut lp = LinearProgram::new();
    let inf = f64::INFINITY;

    // Rows.
    let per_st = |f: &mut dyn FnMut() -> usize| -> Vec<Vec<usize>> { (0..ns).map(|_| (0..=tau).map(|_| f()).collect()).collect() };
    let sat_balance = per_st(&mut || lp.add_row(Sense::Eq, 0.0));
    let sat_cap = per_st(&mut || lp.add_row(Sense::Le, 0.0));
    let link_up = per_st(&mut || lp.add_row(Sense::Le, 0.0));
    let link_lo = per_st(&mut || lp.add_row(Sense::Ge, 0.0));
    let one_visit = per_st(&mut || lp.add_row(Sense::Le, 1.0));
    let n_routes = (1usize << ns) - 1;
    let route_cap: Vec<Vec<usize>> = (0..n_routes)
        .map(|p| {
            let k = (p + 1).count_ones() as f64;
            (0..=tau).map(|_| lp.add_row(Sense::Le, q1 * k)).collect()
        })
        .collect();
    let fleet1: Vec<usize> = (0..=tau).map(|_| lp.add_row(Sense::Le, k1)).collect();
    let fleet2: Vec<usize> = (0..=tau).map(|_| lp.add_row(Sense::Le, k2)).collect();
    // Customer stock: I_{t-1} + D_t - I_t = d_t, and I_{t-1} + D_t <= C.
    let cust_balance: Vec<Vec<usize>> = (0..nc).map(|_| (0..=tau).map(|_| lp.add_row(Sense::Eq, 0.0)).collect()).collect();
    let cust_cap: Vec<Vec<usize>> = (0..nc).map(|_| (0..=tau).map(|_| lp.add_row(Sense::Le, 0.0)).collect()).collect();
    let visit_once: Vec<Vec<usize>> = (0..nc).map(|_| (0..=tau).map(|_| lp.add_row(Sense::Le, 1.0)).collect()).collect();
    // Per (s,t,c): degree in = y, degree out = y, load conservation = q.
    let deg_in: Vec<Vec<Vec<usize>>> =
        (0..ns).map(|_| (0..=tau).map(|_| (0..nc).map(|_| lp.add_row(Sense::Eq, 0.0)).collect()).collect()).collect();
    let deg_out: Vec<Vec<Vec<usize>>> =
        (0..ns).map(|_| (0..=tau).map(|_| (0..nc).map(|_| lp.add_row(Sense::Eq, 0.0)).collect()).collect()).collect();
    let load: Vec<Vec<Vec<usize>>> =
        (0..ns).map(|_| (0..=tau).map(|_| (0..nc).map(|_| lp.add_row(Sense::Eq, 0.0)).collect()).collect()).collect();
    let q_vs_y: Vec<Vec<Vec<usize>>> =
        (0..ns).map(|_| (0..=tau).map(|_| (0..nc).map(|_| lp.add_row(Sense::Le, 0.0)).collect()).collect()).collect();

    let mut constant = 0.0;
    for s in 0..ns {
        let sat = inst.satellite(s);
        let i0 = sat.initial_inventory as f64;
        // S_{s,t} = S_{s,t-1} + inflow - out; S_{s,0} fixed.
        lp.set_rhs(sat_balance[s][1], i0);
        lp.set_rhs(sat_cap[s][1], sat.capacity as f64 - i0);
        for t in 2..=tau {
            lp.set_rhs(sat_cap[s][t], sat.capacity as f64);
        }
    }
    for c in 0..nc {
        let cu = inst.customer(c);
        let i0 = cu.initial_inventory as f64;
        for t in 1..=tau {
            let d = inst.demand(c, t) as f64;
            lp.set_rhs(cust_balance[c][t], if t == 1 { d - i0 } else { d });
            lp.set_rhs(cust_cap[c][t], if t == 1 { cu.capacity as f64 - i0 } else { cu.capacity as f64 });
            constant -= cu.holding_cost * inst.periods(c).residual_inventory[t] as f64;
        }
    }

    // First echelon.
    for p in 0..n_routes {
        let mask = p + 1;
        let cost = first_tour(inst, mask);
        let k = mask.count_ones() as f64;
        for t in 1..=tau {
            let mut e = vec![(fleet1[t], 1.0), (route_cap[p][t], q1 * (k - 1.0))];
            for s in (0..ns).filter(|s| mask & (1 << s) != 0) {
                e.push((link_up[s][t], -q1));
                e.push((link_lo[s][t], -1.0));
                e.push((one_visit[s][t], 1.0));
            }
            lp.add_col(cost, 0.0, 1.0, &e);
        }
    }
    for s in 0..ns {
        for t in 1..=tau {
            let mut inflow = vec![(sat_balance[s][t], -1.0), (sat_cap[s][t], 1.0), (link_up[s][t], 1.0), (link_lo[s][t], 1.0)];
            for p in (0..n_routes).filter(|p| (p + 1) & (1 << s) != 0) {
                inflow.push((route_cap[p][t], 1.0));
            }
            lp.add_col(0.0, 0.0, inf, &inflow);
            // Stock at the end of t.
            let mut stock = vec![(sat_balance[s][t], 1.0)];
            if t < tau {
                stock.push((sat_balance[s][t + 1], -1.0));
                stock.push((sat_cap[s][t + 1], 1.0));
            }
            lp.add_col(inst.satellite(s).holding_cost, 0.0, inf, &stock);
        }
    }
    for c in 0..nc {
        for t in 1..=tau {
            let mut stock = vec![(cust_balance[c][t], -1.0)];
            if t < tau {
                stock.push((cust_balance[c][t + 1], 1.0));
                stock.push((cust_cap[c][t + 1], 1.0));
            }
            lp.add_col(inst.customer(c).holding_cost, 0.0, inf, &stock);
        }
    }

    // Second echelon, one graph per (s,t). Vertex nc is the satellite.
    for s in 0..ns {
        for t in 1..=tau {
            let node = |v: usize| if v == nc { inst.satellite_node(s) } else { inst.customer_node(v) };
            for c in 0..nc {
                // Quantity q_{c,s,t}.
                lp.add_col(
                    0.0,
                    0.0,
                    inf,
                    &[
                        (cust_balance[c][t], 1.0),
                        (cust_cap[c][t], 1.0),
                        (sat_balance[s][t], 1.0),
                        (load[s][t][c], -1.0),
                        (q_vs_y[s][t][c], 1.0),
                    ],
                );
                // Visit y_{c,s,t}.
                lp.add_col(
                    0.0,
                    0.0,
                    1.0,
                    &[(visit_once[c][t], 1.0), (deg_in[s][t][c], -1.0), (deg_out[s][t][c], -1.0), (q_vs_y[s][t][c], -q2)],
                );
            }
            for i in 0..=nc {
                for j in 0..=nc {
                    if i == j {
                        continue;
                    }
                    let mut x = Vec::new();
                    let mut f = Vec::new();
                    if i == nc {
                        x.push((fleet2[t], 1.0));
                    } else {
                        x.push((deg_out[s][t][i], 1.0));
                        f.push((load[s][t][i], -1.0));
                    }
                    if j != nc {
                        x.push((deg_in[s][t][j], 1.0));
                        f.push((load[s][t][j], 1.0));
                    }
                    let xid = lp.add_col(inst.cost(node(i), node(j)), 0.0, 1.0, &x);
                    // f_ij <= Q2 x_ij through a dedicated row.
                    let cap = lp.add_row(Sense::Le, 0.0);
                    lp.set_coef(cap, xid, -q2);
                    f.push((cap, 1.0));
                    lp.add_col(0.0, 0.0, inf, &f);
                }
            }
        }
    }
    let sol = lp.solve();
    assert_eq!(sol.status, LpStatus::Optimal, "compact LP not optimal");
    sol.objective + constant
}

/// FIFO stock simulation of one customer. `deliveries[t]` for t in 1..=τ (slot 0 unused).
/// Returns, per delivery period, the quantity consumed in each period 1..=τ+1
/// (τ+1 = left at the end), or `None` on a shortage or a capacity overflow.
pub fn fifo(initial: i64, capacity: i64, demand: &[i64], deliveries: &[i64]) -> Option<Vec<Vec<i64>>> {
    let tau = demand.len();
    // Queue of (delivery period, quantity); period 0 is the initial stock.
    let mut queue: std::collections::VecDeque<(usize, i64)> = std::collections::VecDeque::new();
    if initial > 0 {
        queue.push_back((0, initial));
    }
    let mut used = vec![vec![0; tau + 2]; tau + 1];
    for h in 1..=tau {
        if deliveries[h] > 0 {
            queue.push_back((h, deliveries[h]));
        }
        if queue.iter().map(|x| x.1).sum::<i64>() > capacity {
            return None;
        }
        let mut need = demand[h - 1];
        while need > 0 {
            let front = queue.front_mut()?;
            let take = front.1.min(need);
            front.1 -= take;
            need -= take;
            if front.0 > 0 {
                used[front.0][h] += take;
            }
            if front.1 == 0 {
                queue.pop_front();
            }
        }
    }
    for (t, q) in queue {
        if t > 0 {
            used[t][tau + 1] += q;
        }
    }
    Some(used)
}
