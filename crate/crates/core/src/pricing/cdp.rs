//! Customer delivery patterns: per target period, deliver nothing, the full
//! upper bound, or (at most once) a partial quantity.

use super::label::{dominates, LabelState};
use super::Item;

#[derive(Debug, Clone, PartialEq)]
pub struct Cdp {
    /// Indices into the customer's items delivered at their upper bound.
    pub full: Vec<usize>,
    /// Index of the partially delivered item.
    pub partial: Option<usize>,
    pub cost: f64,
    pub load: i64,
    pub rate: f64,
    pub max_p: i64,
}

impl Cdp {
    pub fn state(&self) -> LabelState {
        LabelState {
            cost: self.cost,
            load: self.load,
            mem: 0,
            part: self.partial.is_some(),
            rate: self.rate,
            max_p: self.max_p,
        }
    }
}

/// All patterns that fit `capacity`, zero pattern first. A partial choice needs
/// an upper bound of at least 2 and a negative unit cost. With `prune`,
/// dominated patterns are dropped (earlier one kept on ties).
pub fn enumerate_cdps(items: &[Item], capacity: i64, prune: bool) -> Vec<Cdp> {
    let mut out = Vec::new();
    let mut choice = vec![0u8; items.len()];
    walk(items, capacity, 0, &mut choice, &mut out);
    if !prune {
        return out;
    }
    let mut kept: Vec<Cdp> = Vec::new();
    for c in out {
        let st = c.state();
        if kept.iter().any(|k| dominates(&k.state(), &st)) {
            continue;
        }
        kept.retain(|k| !dominates(&st, &k.state()));
        kept.push(c);
    }
    kept
}

fn walk(items: &[Item], capacity: i64, k: usize, choice: &mut Vec<u8>, out: &mut Vec<Cdp>) {
    if k == items.len() {
        let mut cdp = Cdp { full: Vec::new(), partial: None, cost: 0.0, load: 0, rate: 0.0, max_p: 0 };
        for (i, &ch) in choice.iter().enumerate() {
            match ch {
                1 => {
                    cdp.full.push(i);
                    cdp.cost += items[i].ub as f64 * items[i].rho;
                    cdp.load += items[i].ub;
                }
                2 => {
                    cdp.partial = Some(i);
                    cdp.rate = items[i].rho;
                    cdp.max_p = items[i].ub - 1;
                }
                _ => {}
            }
        }
        if cdp.load > capacity {
            return;
        }
        if cdp.partial.is_some() {
            cdp.max_p = cdp.max_p.min(capacity - cdp.load);
            if cdp.max_p <= 0 {
                return;
            }
        }
        out.push(cdp);
        return;
    }
    let has_partial = choice[..k].contains(&2);
    for ch in 0..3u8 {
        if ch == 2 && (has_partial || items[k].ub < 2 || items[k].rho >= 0.0) {
            continue;
        }
        choice[k] = ch;
        walk(items, capacity, k + 1, choice, out);
    }
    choice[k] = 0;
}
