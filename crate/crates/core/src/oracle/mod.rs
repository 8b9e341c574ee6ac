//! Brute-force optimum for micro instances. Enumerates, period by period, every
//! first-echelon visit plan and every assignment of customers to at most K²
//! routes, then prices quantities with an inventory LP on the natural stock
//! model. Uses only the instance data, the validator types and its own LP.

mod tableau;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::solution::{DeliveryAmount, FirstLeg, PeriodPlan, RoutePlan, Solution, Transfer};
pub use tableau::{Cmp, Tableau};

pub const MAX_CUSTOMERS: usize = 5;
pub const MAX_HORIZON: usize = 3;
pub const MAX_SATELLITES: usize = 2;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: f64,
    pub solution: Solution,
    /// Routing combinations whose inventory LP was solved.
    pub leaves: usize,
}

#[derive(Debug, Clone)]
struct Tour {
    /// Supplier (first echelon) or satellite (second echelon).
    depot: usize,
    order: Vec<usize>,
    cost: f64,
}

#[derive(Debug, Clone)]
struct Plan {
    first: Vec<Tour>,
    second: Vec<Tour>,
    travel: f64,
    customers: u64,
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

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Cheapest closed tour from `depot` through `nodes`, by trying every order.
fn tsp(depot: usize, nodes: &[usize], cost: &dyn Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for p in permutations(nodes) {
        let mut c = 0.0;
        let mut prev = depot;
        for &x in &p {
            c += cost(prev, x);
            prev = x;
        }
        c += cost(prev, depot);
        if c < best.0 - 1e-12 {
            best = (c, p);
        }
    }
    best
}

fn first_options(inst: &Instance) -> Vec<Vec<Tour>> {
    let ns = inst.n_satellites();
    let k1 = inst.first_fleet().vehicles;
    let best: Vec<Tour> = (0..1u64 << ns)
        .map(|mask| {
            let sats = members(mask, ns);
            let nodes: Vec<usize> = sats.iter().map(|&s| inst.satellite_node(s)).collect();
            (0..inst.n_suppliers())
                .map(|u| {
                    let (c, order) = tsp(inst.supplier_node(u), &nodes, &|a, b| inst.cost(a, b));
                    let order = order.iter().map(|&v| sats[nodes.iter().position(|&x| x == v).unwrap()]).collect();
                    Tour { depot: u, order, cost: c }
                })
                .min_by(|a, b| a.cost.total_cmp(&b.cost))
                .unwrap()
        })
        .collect();
    let mut out = Vec::new();
    fn rec(s: usize, ns: usize, k1: usize, blocks: &mut Vec<u64>, best: &[Tour], out: &mut Vec<Vec<Tour>>) {
        if s == ns {
            out.push(blocks.iter().map(|&m| best[m as usize].clone()).collect());
            return;
        }
        rec(s + 1, ns, k1, blocks, best, out);
        for i in 0..blocks.len() {
            blocks[i] |= 1 << s;
            rec(s + 1, ns, k1, blocks, best, out);
            blocks[i] &= !(1 << s);
        }
        if blocks.len() < k1 {
            blocks.push(1 << s);
            rec(s + 1, ns, k1, blocks, best, out);
            blocks.pop();
        }
    }
    rec(0, ns, k1, &mut Vec::new(), &best, &mut out);
    out
}

fn second_options(inst: &Instance) -> Vec<Vec<Tour>> {
    let (ns, n) = (inst.n_satellites(), inst.n_customers());
    let k2 = inst.second_fleet().vehicles;
    let tours: Vec<Vec<Tour>> = (0..ns)
        .map(|s| {
            (0..1u64 << n)
                .map(|mask| {
                    let cs = members(mask, n);
                    let depot = inst.satellite_node(s);
                    let nodes: Vec<usize> = cs.iter().map(|&c| inst.customer_node(c)).collect();
                    let (c, order) = tsp(depot, &nodes, &|a, b| inst.cost(a, b));
                    let order = order.iter().map(|&v| cs[nodes.iter().position(|&x| x == v).unwrap()]).collect();
                    Tour { depot: s, order, cost: c }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    fn rec(c: usize, n: usize, ns: usize, k2: usize, blocks: &mut Vec<(usize, u64)>, tours: &[Vec<Tour>], out: &mut Vec<Vec<Tour>>) {
        if c == n {
            out.push(blocks.iter().map(|&(s, m)| tours[s][m as usize].clone()).collect());
            return;
        }
        rec(c + 1, n, ns, k2, blocks, tours, out);
        for i in 0..blocks.len() {
            blocks[i].1 |= 1 << c;
            rec(c + 1, n, ns, k2, blocks, tours, out);
            blocks[i].1 &= !(1 << c);
        }
        if blocks.len() < k2 {
            for s in 0..ns {
                blocks.push((s, 1 << c));
                rec(c + 1, n, ns, k2, blocks, tours, out);
                blocks.pop();
            }
        }
    }
    rec(0, n, ns, k2, &mut Vec::new(), &tours, &mut out);
    out
}

struct Search<'a> {
    inst: &'a Instance,
    plans: Vec<Plan>,
    /// `cum[c][h]`: demand of periods 1..=h.
    cum: Vec<Vec<i64>>,
    best: Option<(f64, Vec<usize>, Vec<f64>)>,
    leaves: usize,
    prefixes: usize,
    infeasible_leaves: usize,
    /// `cover[mask]`: cheapest set of second-echelon tours visiting every customer of `mask`.
    cover: Vec<f64>,
}

impl Search<'_> {
    /// Whether customer `c`, last visited in `last` (0 = never), can still meet period `h`'s demand.
    fn covered(&self, c: usize, last: usize, h: usize) -> bool {
        let cu = self.inst.customer(c);
        let need = self.cum[c][h] - cu.initial_inventory;
        let reach = if last == 0 { 0 } else { cu.capacity - cu.initial_inventory + self.cum[c][last - 1] };
        need <= reach
    }

    fn dfs(&mut self, t: usize, chosen: &mut Vec<usize>, last: &mut Vec<usize>, travel: f64) {
        let tau = self.inst.horizon();
        if t > tau {
            self.leaf(chosen, travel);
            return;
        }
        for k in 0..self.plans.len() {
            let p = &self.plans[k];
            if self.best.as_ref().is_some_and(|b| travel + p.travel >= b.0 - 1e-9) {
                break;
            }
            let mask = p.customers;
            let ok = (0..self.inst.n_customers()).all(|c| {
                let l = if mask & (1 << c) != 0 { t } else { last[c] };
                self.covered(c, l, t)
            });
            if !ok {
                continue;
            }
            let saved = last.clone();
            for c in 0..self.inst.n_customers() {
                if mask & (1 << c) != 0 {
                    last[c] = t;
                }
            }
            let pending = (0..self.inst.n_customers())
                .filter(|&c| !self.covered(c, last[c], tau))
                .fold(0u64, |m, c| m | 1 << c);
            let future = if t < tau { self.cover[pending as usize] } else { 0.0 };
            if self.best.as_ref().is_some_and(|b| travel + p.travel + future >= b.0 - 1e-9) {
                *last = saved;
                continue;
            }
            chosen.push(k);
            let feasible = t == tau || !self.quick_infeasible(chosen) && {
                self.prefixes += 1;
                inventory_lp(self.inst, &self.cum, chosen.iter().map(|&k| &self.plans[k])).is_some()
            };
            if feasible {
                let tr = travel + self.plans[k].travel;
                self.dfs(t + 1, chosen, last, tr);
            }
            chosen.pop();
            *last = saved;
        }
    }

    /// Necessary conditions checked without an LP: for every customer set, the
    /// demand due by each period fits in the routes that visited the set, and
    /// the total fits in the satellite stock plus the first-echelon deliveries.
    fn quick_infeasible(&self, chosen: &[usize]) -> bool {
        let n = self.inst.n_customers();
        let q1 = self.inst.first_fleet().capacity;
        let q2 = self.inst.second_fleet().capacity;
        let stock: i64 = self.inst.satellites().iter().map(|s| s.initial_inventory).sum();
        let mut supply = stock;
        for h in 1..=chosen.len() {
            let p = &self.plans[chosen[h - 1]];
            for f in &p.first {
                supply += q1.min(f.order.iter().map(|&s| self.inst.satellite(s).capacity).sum());
            }
            let need: Vec<i64> = (0..n).map(|c| (self.cum[c][h] - self.inst.customer(c).initial_inventory).max(0)).collect();
            if need.iter().sum::<i64>() > supply {
                return true;
            }
            for mask in 1u64..(1 << n) {
                let due: i64 = members(mask, n).iter().map(|&c| need[c]).sum();
                if due == 0 {
                    continue;
                }
                let mut room = 0;
                for &k in &chosen[..h] {
                    for r in &self.plans[k].second {
                        let reach: i64 = r.order.iter().filter(|&&c| mask & (1 << c) != 0).map(|&c| self.inst.customer(c).capacity).sum();
                        room += q2.min(reach);
                    }
                }
                if due > room {
                    return true;
                }
            }
        }
        false
    }

    fn leaf(&mut self, chosen: &[usize], travel: f64) {
        if self.quick_infeasible(chosen) {
            return;
        }
        self.leaves += 1;
        let Some((holding, x)) = inventory_lp(self.inst, &self.cum, chosen.iter().map(|&k| &self.plans[k])) else {
            self.infeasible_leaves += 1;
            return;
        };
        let total = travel + holding;
        if self.best.as_ref().map_or(true, |b| total < b.0 - 1e-9) {
            self.best = Some((total, chosen.to_vec(), x));
        }
    }
}

/// Variables: one delivery per (period, route, customer), then one inflow per
/// (period, visited satellite). Returns the holding cost and the values.
/// With fewer plans than periods only the rows of the covered periods are kept,
/// which gives a feasibility test for a prefix.
fn inventory_lp<'p>(inst: &Instance, cum: &[Vec<i64>], plans: impl Iterator<Item = &'p Plan>) -> Option<(f64, Vec<f64>)> {
    let plans: Vec<&Plan> = plans.collect();
    let upto = plans.len();
    let tau = inst.horizon();
    let mut del: Vec<(usize, usize, usize, usize)> = Vec::new(); // (t, route, customer, satellite)
    let mut inflow: Vec<(usize, usize, usize)> = Vec::new(); // (t, first route, satellite)
    for (i, p) in plans.iter().enumerate() {
        let t = i + 1;
        for (r, tour) in p.second.iter().enumerate() {
            for &c in &tour.order {
                del.push((t, r, c, tour.depot));
            }
        }
        for (r, tour) in p.first.iter().enumerate() {
            for &s in &tour.order {
                inflow.push((t, r, s));
            }
        }
    }
    let nd = del.len();
    let mut lp = Tableau::new(nd + inflow.len());
    let mut constant = 0.0;
    let rem = |t: usize| (tau - t + 1) as f64;
    for (j, &(t, _, c, s)) in del.iter().enumerate() {
        lp.set_cost(j, (inst.customer(c).holding_cost - inst.satellite(s).holding_cost) * rem(t));
    }
    for (j, &(t, _, s)) in inflow.iter().enumerate() {
        lp.set_cost(nd + j, inst.satellite(s).holding_cost * rem(t));
    }
    for c in 0..inst.n_customers() {
        let cu = inst.customer(c);
        for h in 1..=upto {
            constant += cu.holding_cost * (cu.initial_inventory - cum[c][h]).min(0) as f64;
            let e: Vec<(usize, f64)> = (0..nd).filter(|&j| del[j].2 == c && del[j].0 <= h).map(|j| (j, 1.0)).collect();
            lp.row(&e, Cmp::Ge, (cum[c][h] - cu.initial_inventory) as f64);
            lp.row(&e, Cmp::Le, (cu.capacity - cu.initial_inventory + cum[c][h - 1]) as f64);
        }
    }
    for s in 0..inst.n_satellites() {
        let sa = inst.satellite(s);
        constant += sa.holding_cost * sa.initial_inventory as f64 * tau as f64;
        for t in 1..=upto {
            let mut stock: Vec<(usize, f64)> = (0..nd).filter(|&j| del[j].3 == s && del[j].0 <= t).map(|j| (j, 1.0)).collect();
            stock.extend(inflow.iter().enumerate().filter(|(_, x)| x.2 == s && x.0 <= t).map(|(j, _)| (nd + j, -1.0)));
            lp.row(&stock, Cmp::Le, sa.initial_inventory as f64);
            let mut cap: Vec<(usize, f64)> = (0..nd).filter(|&j| del[j].3 == s && del[j].0 < t).map(|j| (j, -1.0)).collect();
            cap.extend(inflow.iter().enumerate().filter(|(_, x)| x.2 == s && x.0 <= t).map(|(j, _)| (nd + j, 1.0)));
            lp.row(&cap, Cmp::Le, (sa.capacity - sa.initial_inventory) as f64);
        }
    }
    let q1 = inst.first_fleet().capacity as f64;
    let q2 = inst.second_fleet().capacity as f64;
    for (i, p) in plans.iter().enumerate() {
        let t = i + 1;
        for r in 0..p.first.len() {
            let e: Vec<(usize, f64)> =
                inflow.iter().enumerate().filter(|(_, x)| x.0 == t && x.1 == r).map(|(j, _)| (nd + j, 1.0)).collect();
            lp.row(&e, Cmp::Le, q1);
            for &(j, _) in &e {
                lp.row(&[(j, 1.0)], Cmp::Ge, 1.0);
            }
        }
        for r in 0..p.second.len() {
            let e: Vec<(usize, f64)> = (0..nd).filter(|&j| del[j].0 == t && del[j].1 == r).map(|j| (j, 1.0)).collect();
            lp.row(&e, Cmp::Le, q2);
        }
    }
    let (v, x) = lp.minimize()?;
    Some((v + constant, x))
}

fn cover_bounds(inst: &Instance) -> Vec<f64> {
    let n = inst.n_customers();
    let mut tour = vec![f64::INFINITY; 1 << n];
    for (mask, slot) in tour.iter_mut().enumerate().skip(1) {
        let cs = members(mask as u64, n);
        let nodes: Vec<usize> = cs.iter().map(|&c| inst.customer_node(c)).collect();
        for s in 0..inst.n_satellites() {
            *slot = slot.min(tsp(inst.satellite_node(s), &nodes, &|a, b| inst.cost(a, b)).0);
        }
    }
    let mut cover = vec![f64::INFINITY; 1 << n];
    cover[0] = 0.0;
    for mask in 1..1usize << n {
        let mut sub = mask;
        while sub > 0 {
            cover[mask] = cover[mask].min(tour[sub] + cover[mask & !sub]);
            sub = (sub - 1) & mask;
        }
    }
    cover
}

/// Splits per-period quantities over FIFO slots; `slots` are (label, amount) in consumption order.
fn fifo(amounts: &[(usize, f64)], slots: &[(usize, f64)]) -> Vec<(usize, usize, f64)> {
    let mut queue: VecDeque<(usize, f64)> = slots.iter().copied().filter(|s| s.1 > 1e-9).collect();
    let mut out = Vec::new();
    for &(t, mut q) in amounts {
        while q > 1e-9 {
            let Some(front) = queue.front_mut() else { break };
            let take = q.min(front.1);
            out.push((t, front.0, take));
            front.1 -= take;
            q -= take;
            if front.1 <= 1e-9 {
                queue.pop_front();
            }
        }
        if q > 1e-9 {
            out.push((t, usize::MAX, q));
        }
    }
    out
}

/// Exhaustive optimum. Refuses instances above the size guard.
pub fn oracle_solve(inst: &Instance) -> Result<OracleResult> {
    if inst.n_customers() > MAX_CUSTOMERS || inst.horizon() > MAX_HORIZON || inst.n_satellites() > MAX_SATELLITES {
        return Err(Error::Refused(format!(
            "oracle handles at most {MAX_CUSTOMERS} customers, {MAX_SATELLITES} satellites and horizon {MAX_HORIZON}"
        )));
    }
    let tau = inst.horizon();
    let firsts = first_options(inst);
    let seconds = second_options(inst);
    let mut plans = Vec::with_capacity(firsts.len() * seconds.len());
    for f in &firsts {
        for s in &seconds {
            let travel = f.iter().chain(s).map(|x| x.cost).sum();
            let customers = s.iter().flat_map(|x| &x.order).fold(0u64, |m, &c| m | 1 << c);
            plans.push(Plan { first: f.clone(), second: s.clone(), travel, customers });
        }
    }
    plans.sort_by(|a, b| a.travel.total_cmp(&b.travel));
    let cum: Vec<Vec<i64>> = (0..inst.n_customers())
        .map(|c| {
            let mut v = vec![0; tau + 1];
            for h in 1..=tau {
                v[h] = v[h - 1] + inst.demand(c, h);
            }
            v
        })
        .collect();
    let cover = cover_bounds(inst);
    let mut search = Search { inst, plans, cum, best: None, leaves: 0, prefixes: 0, infeasible_leaves: 0, cover };
    search.dfs(1, &mut Vec::new(), &mut vec![0; inst.n_customers()], 0.0);
    let leaves = search.leaves;
    log::debug!("oracle: {} plans per period, {} prefix LPs, {leaves} leaves, {} infeasible", search.plans.len(), search.prefixes, search.infeasible_leaves);
    let Some((objective, chosen, x)) = search.best.take() else {
        return Err(Error::Infeasible("no feasible plan".into()));
    };
    let plans: Vec<&Plan> = chosen.iter().map(|&k| &search.plans[k]).collect();
    let solution = build_solution(inst, &search.cum, &plans, &x, objective);
    Ok(OracleResult { objective, solution, leaves })
}

fn build_solution(inst: &Instance, cum: &[Vec<i64>], plans: &[&Plan], x: &[f64], objective: f64) -> Solution {
    let tau = inst.horizon();
    let mut j = 0;
    let mut periods = Vec::new();
    let mut delivered = vec![Vec::new(); inst.n_customers()];
    let mut route_of = Vec::new();
    let mut out_of = vec![vec![0.0; tau + 1]; inst.n_satellites()];
    for (i, p) in plans.iter().enumerate() {
        let t = i + 1;
        let mut routes = Vec::new();
        for tour in &p.second {
            let mut dl = Vec::new();
            for &c in &tour.order {
                delivered[c].push((t, x[j]));
                out_of[tour.depot][t] += x[j];
                dl.push((c, x[j]));
                j += 1;
            }
            route_of.push(dl);
            routes.push(RoutePlan { satellite: tour.depot, customers: tour.order.clone(), deliveries: Vec::new(), travel: tour.cost });
        }
        let first = p.first.iter().map(|f| FirstLeg { supplier: f.depot, satellites: f.order.clone(), cost: f.cost }).collect();
        periods.push(PeriodPlan { period: t, first_echelon: first, routes });
    }
    let mut inflow = vec![vec![0.0; tau + 1]; inst.n_satellites()];
    for p in plans.iter().enumerate() {
        for tour in &p.1.first {
            for &s in &tour.order {
                inflow[s][p.0 + 1] += x[j];
                j += 1;
            }
        }
    }
    // targets of customer deliveries: residual demand periods in order, then end inventory
    for c in 0..inst.n_customers() {
        let i0 = inst.customer(c).initial_inventory;
        let slots: Vec<(usize, f64)> =
            (1..=tau).map(|h| (h, ((cum[c][h] - i0).max(0) - (cum[c][h - 1] - i0).max(0)) as f64)).collect();
        for (t, h, q) in fifo(&delivered[c], &slots) {
            let h = if h == usize::MAX { tau + 1 } else { h };
            let period = &mut periods[t - 1];
            if let Some(r) = period.routes.iter_mut().find(|r| r.customers.contains(&c)) {
                r.deliveries.push(DeliveryAmount { customer: c, target: h, quantity: q });
            }
        }
    }
    let mut transfers = Vec::new();
    for s in 0..inst.n_satellites() {
        let mut slots = vec![(0, inst.satellite(s).initial_inventory as f64)];
        slots.extend((1..=tau).map(|l| (l, inflow[s][l])));
        let outs: Vec<(usize, f64)> = (1..=tau).map(|t| (t, out_of[s][t])).collect();
        let mut left: Vec<f64> = slots.iter().map(|x| x.1).collect();
        for (t, l, q) in fifo(&outs, &slots) {
            if l != usize::MAX {
                left[l] -= q;
            }
            transfers.push(Transfer { satellite: s, entry: l, exit: t, quantity: q });
        }
        for (l, &q) in left.iter().enumerate() {
            if q > 1e-9 {
                transfers.push(Transfer { satellite: s, entry: l, exit: tau + 1, quantity: q });
            }
        }
    }
    Solution { cost: objective, periods, transfers }
}
