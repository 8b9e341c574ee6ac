//! Depth-first branch-and-bound over integer columns, used as a primal heuristic.

use std::time::{Duration, Instant};

use super::simplex::{LinearProgram, LpStatus, INT_TOL};

#[derive(Debug, Clone, Copy)]
pub struct MilpLimits {
    pub time_limit: Duration,
    pub node_limit: usize,
}

impl Default for MilpLimits {
    fn default() -> Self {
        MilpLimits { time_limit: Duration::from_secs(30), node_limit: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub objective: f64,
    pub primal: Vec<f64>,
    pub nodes: usize,
    /// True when the tree was exhausted within the limits.
    pub complete: bool,
}

/// Best integer solution found, or `None` if none was found within the limits.
pub fn solve_milp(lp: &LinearProgram, integer: &[usize], limits: MilpLimits) -> Option<MilpSolution> {
    let start = Instant::now();
    let mut lp = lp.clone();
    let original: Vec<(f64, f64)> = integer.iter().map(|&j| lp.bounds(j)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0;
    let mut complete = true;

    // Each stack entry holds the bounds of every integer column at that node.
    let mut stack: Vec<Vec<(f64, f64)>> = vec![original.clone()];
    while let Some(bounds) = stack.pop() {
        if nodes >= limits.node_limit || start.elapsed() > limits.time_limit {
            complete = false;
            break;
        }
        nodes += 1;
        for (k, &j) in integer.iter().enumerate() {
            lp.set_bounds(j, bounds[k].0, bounds[k].1);
        }
        let sol = lp.solve();
        if sol.status != LpStatus::Optimal {
            if sol.status == LpStatus::IterationLimit {
                complete = false;
            }
            continue;
        }
        if let Some((inc, _)) = &best {
            if sol.objective >= inc - 1e-9 {
                continue;
            }
        }
        let mut branch: Option<(usize, f64)> = None;
        let mut best_score = INT_TOL;
        for (k, &j) in integer.iter().enumerate() {
            let v = sol.primal[j];
            let frac = v - v.floor();
            let score = frac.min(1.0 - frac);
            if score > best_score {
                best_score = score;
                branch = Some((k, v));
            }
        }
        match branch {
            None => {
                let mut primal = sol.primal.clone();
                for &j in integer {
                    primal[j] = primal[j].round();
                }
                best = Some((sol.objective, primal));
            }
            Some((k, v)) => {
                let mut down = bounds.clone();
                down[k].1 = v.floor();
                let mut up = bounds;
                up[k].0 = v.ceil();
                if v - v.floor() >= 0.5 {
                    stack.push(down);
                    stack.push(up);
                } else {
                    stack.push(up);
                    stack.push(down);
                }
            }
        }
    }
    best.map(|(objective, primal)| MilpSolution { objective, primal, nodes, complete })
}
