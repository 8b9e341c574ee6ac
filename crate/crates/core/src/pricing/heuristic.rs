//! Heuristic pricers: tabu search over routes and two restricted labelers.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exact::solve_pricing;
use super::{PricingConfig, PricingGraph, RC_TOL};
use crate::column::{canonical_route, Column, Delivery};
use crate::model::Instance;

/// Cheapest delivery pattern for a fixed route: fill the vehicle with the most
/// negative unit costs first. Returns the delivery cost and the sub-deliveries.
pub fn best_rdp(g: &PricingGraph, route: &[usize]) -> (f64, Vec<Delivery>) {
    let mut items: Vec<(f64, usize, usize, i64)> = route
        .iter()
        .flat_map(|&c| g.items[c].iter().filter(|it| it.rho < 0.0).map(move |it| (it.rho, c, it.target, it.ub)))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut room = g.capacity;
    let mut cost = 0.0;
    let mut out = Vec::new();
    for (rho, c, h, ub) in items {
        if room == 0 {
            break;
        }
        let q = ub.min(room);
        room -= q;
        cost += rho * q as f64;
        out.push(Delivery { customer: c, target: h, quantity: q });
    }
    (cost, out)
}

fn evaluate(g: &PricingGraph, route: &[usize]) -> (f64, Vec<Delivery>) {
    let arcs = g.route_cost(route);
    if !arcs.is_finite() {
        return (f64::INFINITY, Vec::new());
    }
    let (c, d) = best_rdp(g, route);
    (arcs + c, d)
}

fn finish(inst: &Instance, g: &PricingGraph, found: HashMap<Vec<usize>, (f64, Vec<Delivery>)>, max: usize) -> Vec<Column> {
    let mut list: Vec<(f64, Vec<usize>, Vec<Delivery>)> = found.into_iter().map(|(r, (v, d))| (v, r, d)).collect();
    list.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    list.into_iter().take(max).filter_map(|(_, r, d)| g.column(inst, r, d).ok()).collect()
}

fn record(found: &mut HashMap<Vec<usize>, (f64, Vec<Delivery>)>, route: &[usize], value: f64, d: &[Delivery]) {
    if value < -RC_TOL {
        found.entry(canonical_route(route.to_vec())).or_insert_with(|| (value, d.to_vec()));
    }
}

fn active(g: &PricingGraph) -> Vec<usize> {
    (0..g.n).filter(|&c| g.active & (1 << c) != 0).collect()
}

enum Move {
    Insert(usize, usize),
    Remove(usize),
    Swap(usize, usize),
}

/// Tabu search over elementary routes with insert, remove and swap moves.
pub fn tabu_pricer(inst: &Instance, g: &PricingGraph, cfg: &PricingConfig) -> Vec<Column> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((g.satellite as u64) << 32 | g.period as u64));
    let customers = active(g);
    let mut found = HashMap::new();
    let mut start: Option<(f64, Vec<usize>)> = None;
    for &c in &customers {
        let (v, d) = evaluate(g, &[c]);
        record(&mut found, &[c], v, &d);
        if v.is_finite() && start.as_ref().map_or(true, |s| v < s.0) {
            start = Some((v, vec![c]));
        }
    }
    let Some((mut best, mut route)) = start else {
        return Vec::new();
    };
    let mut tabu_until = vec![0usize; g.n];
    for iter in 1..=cfg.tabu_iterations {
        let mut moves: Vec<(f64, Move)> = Vec::new();
        for &c in &customers {
            if route.contains(&c) {
                continue;
            }
            for pos in 0..=route.len() {
                let mut r = route.clone();
                r.insert(pos, c);
                moves.push((evaluate(g, &r).0, Move::Insert(c, pos)));
            }
        }
        if route.len() > 1 {
            for pos in 0..route.len() {
                let mut r = route.clone();
                r.remove(pos);
                moves.push((evaluate(g, &r).0, Move::Remove(pos)));
            }
        }
        for a in 0..route.len() {
            for b in a + 1..route.len() {
                let mut r = route.clone();
                r.swap(a, b);
                moves.push((evaluate(g, &r).0, Move::Swap(a, b)));
            }
        }
        let touched = |m: &Move| -> Vec<usize> {
            match *m {
                Move::Insert(c, _) => vec![c],
                Move::Remove(p) => vec![route[p]],
                Move::Swap(a, b) => vec![route[a], route[b]],
            }
        };
        let allowed: Vec<&(f64, Move)> = moves
            .iter()
            .filter(|(v, m)| v.is_finite() && (touched(m).iter().all(|&c| tabu_until[c] < iter) || *v < best - 1e-9))
            .collect();
        let Some(min) = allowed.iter().map(|x| x.0).min_by(|a, b| a.total_cmp(b)) else {
            break;
        };
        let ties: Vec<&&(f64, Move)> = allowed.iter().filter(|x| x.0 <= min + 1e-12).collect();
        let (value, mv) = ties[rng.gen_range(0..ties.len())];
        for c in touched(mv) {
            tabu_until[c] = iter + cfg.tabu_tenure;
        }
        match *mv {
            Move::Insert(c, p) => route.insert(p, c),
            Move::Remove(p) => {
                route.remove(p);
            }
            Move::Swap(a, b) => route.swap(a, b),
        }
        let (v, d) = evaluate(g, &route);
        debug_assert!((v - value).abs() < 1e-9);
        record(&mut found, &route, v, &d);
        best = best.min(v);
    }
    finish(inst, g, found, cfg.max_columns)
}

/// The `k` customers with the cheapest round trip, ties by index.
pub fn labeler_1_customers(g: &PricingGraph, k: usize) -> Vec<usize> {
    let mut rt: Vec<(f64, usize)> =
        active(g).into_iter().map(|c| (evaluate(g, &[c]).0, c)).filter(|x| x.0.is_finite()).collect();
    rt.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    rt.into_iter().take(k).map(|x| x.1).collect()
}

/// Exact labeling restricted to the customers with the cheapest round trips.
pub fn heuristic_labeler_1(inst: &Instance, g: &PricingGraph, cfg: &PricingConfig) -> Vec<Column> {
    let keep = labeler_1_customers(g, cfg.labeler_1_customers);
    let mask = keep.iter().fold(0u64, |m, &c| m | 1 << c);
    solve_pricing(inst, &g.restricted(mask), cfg).columns
}

/// One greedy chain per first customer: always extend to the customer giving
/// the cheapest label, scoring patterns by their full sub-deliveries only.
/// Each chain contributes its best prefix, re-optimized over all patterns.
pub fn heuristic_labeler_2(inst: &Instance, g: &PricingGraph, cfg: &PricingConfig) -> Vec<Column> {
    let customers = active(g);
    let step = |c: usize, load: i64| -> Option<(f64, i64)> {
        g.cdps[c]
            .iter()
            .filter(|p| p.partial.is_none() && load + p.load <= g.capacity)
            .map(|p| (p.cost, p.load))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
    };
    let mut found = HashMap::new();
    for &first in &customers {
        if !g.src[first].is_finite() {
            continue;
        }
        let Some((c0, l0)) = step(first, 0) else { continue };
        let mut route = vec![first];
        let (mut cost, mut load) = (g.src[first] + c0, l0);
        let mut best: Option<(f64, Vec<usize>, Vec<Delivery>)> = None;
        loop {
            let (v, d) = evaluate(g, &route);
            if v < best.as_ref().map_or(f64::INFINITY, |b| b.0) {
                best = Some((v, route.clone(), d));
            }
            let last = *route.last().unwrap();
            let next = customers
                .iter()
                .filter(|&&j| !route.contains(&j) && g.arc(last, j).is_finite())
                .filter_map(|&j| step(j, load).map(|(c, l)| (cost + g.arc(last, j) + c, l, j)))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
            match next {
                Some((c, l, j)) => {
                    cost = c;
                    load += l;
                    route.push(j);
                }
                None => break,
            }
        }
        if let Some((v, r, d)) = best {
            record(&mut found, &r, v, &d);
        }
    }
    finish(inst, g, found, cfg.max_columns)
}
