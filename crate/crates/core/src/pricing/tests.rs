use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::duals::BranchDual;
use crate::generate::{generate_micro, MicroConfig};

fn micro(n: usize, seed: u64) -> Instance {
    Instance::new(generate_micro(&MicroConfig { customers: n, horizon: 3, k2: 2, seed }).unwrap()).unwrap()
}

fn random_duals(inst: &Instance, rng: &mut ChaCha8Rng) -> DualPrices {
    let mut d = DualPrices::zero(inst);
    for t in 1..=inst.horizon() {
        for s in 0..inst.n_satellites() {
            d.pi2[s][t] = rng.gen_range(-5.0..5.0);
        }
        for c in 0..inst.n_customers() {
            d.pi3[c][t] = rng.gen_range(0.0..40.0);
            d.pi5[c][t] = if rng.gen_bool(0.3) { rng.gen_range(-3.0..0.0) } else { 0.0 };
            d.pi8[c][t] = if rng.gen_bool(0.5) { rng.gen_range(-20.0..0.0) } else { 0.0 };
        }
        d.pi10[t] = if rng.gen_bool(0.5) { rng.gen_range(-20.0..0.0) } else { 0.0 };
    }
    d
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

/// Every elementary route with its cheapest delivery vector. For a fixed
/// route the deliveries form a box cut by one capacity row, so the minimum over
/// its vertices is the fractional knapsack optimum.
fn brute_force_min(inst: &Instance, d: &DualPrices, s: usize, t: usize) -> f64 {
    let n = inst.n_customers();
    let q2 = inst.second_fleet().capacity;
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&c| mask & (1 << c) != 0).collect();
        let mut slots: Vec<(f64, usize, usize, i64)> = members
            .iter()
            .flat_map(|&c| {
                inst.periods(c)
                    .targets(t)
                    .iter()
                    .filter(|sp| sp.ub > 0)
                    .map(move |sp| (d.rho(inst, s, t, c, sp.target), c, sp.target, sp.ub))
            })
            .filter(|x| x.0 < 0.0)
            .collect();
        slots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut room = q2;
        let mut dl = Vec::new();
        for (_, c, h, ub) in slots {
            let q = ub.min(room);
            if q > 0 {
                dl.push(Delivery { customer: c, target: h, quantity: q });
            }
            room -= q;
        }
        for perm in permutations(&members) {
            if perm[0] > perm[perm.len() - 1] {
                continue;
            }
            let col = Column::new(inst, s, t, perm.clone(), dl.clone()).unwrap();
            best = best.min(d.reduced_cost(inst, &col));
        }
    }
    best
}

fn exact_cfg() -> PricingConfig {
    PricingConfig { kappa: 64, ..PricingConfig::default() }
}

#[test]
fn graph_arc_costs() {
    let inst = micro(3, 1);
    let mut d = DualPrices::zero(&inst);
    d.pi10[1] = 2.0;
    d.pi8[0][1] = 3.0;
    let g = PricingGraph::build(&inst, 0, 1, &d, &[], &PricingConfig::default());
    assert!((g.src[1] - (inst.satellite_customer_cost(0, 1) - 2.0)).abs() < 1e-12);
    assert!((g.arc(0, 1) - (inst.customer_cost(0, 1) - 3.0)).abs() < 1e-12);
    assert!((g.snk[0] - (inst.satellite_customer_cost(0, 0) - 3.0)).abs() < 1e-12);
    let all = PricingGraph::build(&inst, 0, 1, &d, &[], &PricingConfig { kappa: 3, ..PricingConfig::default() });
    assert!(all.ng.iter().all(|&m| m == 0b111));
    let one = PricingGraph::build(&inst, 0, 1, &d, &[], &PricingConfig { kappa: 1, ..PricingConfig::default() });
    assert_eq!(one.ng, vec![1, 2, 4]);
}

#[test]
fn forbidden_edges_and_branch_duals() {
    let inst = micro(3, 2);
    let mut d = DualPrices::zero(&inst);
    d.branch.push(BranchDual { term: BranchTerm::Customer { customer: 2, period: Some(1), satellite: None }, dual: 1.5 });
    d.branch.push(BranchDual { term: BranchTerm::Routes { period: None }, dual: 0.25 });
    let sv = satellite_vertex(&inst, 0);
    let g = PricingGraph::build(&inst, 0, 1, &d, &[(0, 1), (2, sv)], &PricingConfig::default());
    assert!(g.arc(0, 1).is_infinite() && g.arc(1, 0).is_infinite());
    assert!(g.src[2].is_infinite() && g.snk[2].is_infinite());
    assert!((g.arc(0, 2) - (inst.customer_cost(0, 2) - 1.5)).abs() < 1e-12);
    assert!((g.src[0] - (inst.satellite_customer_cost(0, 0) - 0.25)).abs() < 1e-12);
    let col = Column::new(&inst, 0, 1, vec![1, 2, 0], vec![]).unwrap();
    let via_graph = g.route_cost(&[1, 2, 0]);
    assert!((via_graph - d.reduced_cost(&inst, &col)).abs() < 1e-9);
}

#[test]
fn zero_duals_price_nothing() {
    let inst = micro(4, 3);
    let d = DualPrices::zero(&inst);
    let g = PricingGraph::build(&inst, 0, 1, &d, &[], &PricingConfig::default());
    let out = solve_pricing(&inst, &g, &PricingConfig::default());
    assert!(out.columns.is_empty());
    assert!(out.best > 0.0);
    assert!(tabu_pricer(&inst, &g, &PricingConfig::default()).is_empty());
}

#[test]
fn exact_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..12 {
        let inst = micro(3 + (seed as usize % 3), seed);
        let d = random_duals(&inst, &mut rng);
        for t in 1..=inst.horizon() {
            for s in 0..2 {
                let oracle = brute_force_min(&inst, &d, s, t);
                let g = PricingGraph::build(&inst, s, t, &d, &[], &exact_cfg());
                for cfg in [
                    exact_cfg(),
                    PricingConfig { half_point: 0.05, ..exact_cfg() },
                    PricingConfig { bidirectional: false, ..exact_cfg() },
                    PricingConfig { dominance: inst.n_customers() > 4, ..exact_cfg() },
                ] {
                    let out = solve_pricing(&inst, &g, &cfg);
                    assert!((out.best - oracle).abs() < 1e-9, "seed {seed} s {s} t {t}: {} vs {oracle}", out.best);
                    if let Some(first) = out.columns.first() {
                        assert!((d.reduced_cost(&inst, first) - out.best).abs() < 1e-6);
                    }
                    for col in &out.columns {
                        assert!(d.reduced_cost(&inst, col) < -RC_TOL);
                        assert!(col.route.len() == 1 || col.route[0] < *col.route.last().unwrap());
                    }
                    assert_eq!(out.columns.is_empty(), oracle >= -RC_TOL);
                }
            }
        }
    }
}

#[test]
fn ng_relaxation_never_prices_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..6 {
        let inst = micro(5, seed);
        let d = random_duals(&inst, &mut rng);
        for t in 1..=3 {
            let cfg = PricingConfig { kappa: 2, ..PricingConfig::default() };
            let g = PricingGraph::build(&inst, 0, t, &d, &[], &cfg);
            let ng = solve_pricing(&inst, &g, &cfg);
            let oracle = brute_force_min(&inst, &d, 0, t);
            assert_eq!(ng.columns.is_empty(), oracle >= -RC_TOL);
            for col in &ng.columns {
                assert!(d.reduced_cost(&inst, col) < -RC_TOL);
            }
        }
    }
}

#[test]
fn heuristics_are_sound_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..8 {
        let inst = micro(4 + (seed as usize % 2), seed);
        let d = random_duals(&inst, &mut rng);
        for t in 1..=3 {
            let cfg = PricingConfig { seed: 9, ..PricingConfig::default() };
            let g = PricingGraph::build(&inst, 1, t, &d, &[], &cfg);
            let tabu = tabu_pricer(&inst, &g, &cfg);
            assert_eq!(tabu, tabu_pricer(&inst, &g, &cfg));
            let l2 = heuristic_labeler_2(&inst, &g, &cfg);
            assert!(l2.len() <= inst.n_customers());
            for col in tabu.iter().chain(&l2).chain(&heuristic_labeler_1(&inst, &g, &cfg)) {
                assert!(d.reduced_cost(&inst, col) < -RC_TOL);
            }
            assert_eq!(heuristic_labeler_1(&inst, &g, &cfg), solve_pricing(&inst, &g, &cfg).columns);
        }
    }
}

#[test]
fn labeler_1_picks_cheapest_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst = micro(6, 4);
    let d = random_duals(&inst, &mut rng);
    let g = PricingGraph::build(&inst, 0, 1, &d, &[], &PricingConfig::default());
    let picked = labeler_1_customers(&g, 5);
    let mut all: Vec<(f64, usize)> = (0..6)
        .map(|c| (g.src[c] + g.snk[c] + best_rdp(&g, &[c]).0, c))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(picked, all.iter().take(5).map(|x| x.1).collect::<Vec<_>>());
}

#[test]
fn single_customer_round_trip() {
    let inst = micro(1, 6);
    let mut d = DualPrices::zero(&inst);
    let travel = 2.0 * inst.satellite_customer_cost(0, 0);
    let (t, sp) = (1..=3)
        .flat_map(|t| inst.periods(0).targets(t).iter().map(move |sp| (t, *sp)))
        .find(|(_, sp)| sp.target <= 3 && sp.ub > 0)
        .unwrap();
    // credit chosen so the full sub-delivery is worth travel + 2
    d.pi3[0][sp.target] = (travel + 2.0) / sp.ub as f64 + inst.customer(0).holding_cost * inst.periods(0).holding_periods(t, sp.target) as f64;
    let g = PricingGraph::build(&inst, 0, t, &d, &[], &PricingConfig::default());
    let out = solve_pricing(&inst, &g, &PricingConfig::default());
    assert_eq!(out.columns.len(), 1);
    assert_eq!(out.columns[0].route, vec![0]);
    assert!((out.best + 2.0).abs() < 1e-9);
    assert_eq!(tabu_pricer(&inst, &g, &PricingConfig::default()), out.columns);
    assert_eq!(heuristic_labeler_2(&inst, &g, &PricingConfig::default()), out.columns);
}
