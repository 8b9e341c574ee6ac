//! The ten branching families and candidate selection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::duals::BranchTerm;
use crate::lp::Sense;
use crate::master::{FirstTerm, Master, Restriction};

const FRAC_TOL: f64 = 1e-6;

/// An aggregate of master variables. Variant order is the family number 1..=10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "family")]
pub enum Family {
    FirstTotal,
    FirstPeriod { period: usize },
    SatelliteVisits { satellite: usize },
    FirstRoute { route: usize, period: usize },
    SecondTotal,
    SecondPeriod { period: usize },
    CustomerVisits { customer: usize },
    CustomerPeriod { customer: usize, period: usize },
    CustomerSatellite { customer: usize, period: usize, satellite: usize },
    /// Second-echelon edge in vertex ids (customers, then satellites).
    Edge { period: usize, a: usize, b: usize },
}

impl Family {
    pub fn number(&self) -> u8 {
        match self {
            Family::FirstTotal => 1,
            Family::FirstPeriod { .. } => 2,
            Family::SatelliteVisits { .. } => 3,
            Family::FirstRoute { .. } => 4,
            Family::SecondTotal => 5,
            Family::SecondPeriod { .. } => 6,
            Family::CustomerVisits { .. } => 7,
            Family::CustomerPeriod { .. } => 8,
            Family::CustomerSatellite { .. } => 9,
            Family::Edge { .. } => 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchDecision {
    pub family: Family,
    /// `true`: aggregate ≤ `bound`; `false`: aggregate ≥ `bound`.
    pub at_most: bool,
    pub bound: f64,
    /// Fractional value that produced the decision.
    pub value: f64,
}

impl BranchDecision {
    pub fn children(family: Family, value: f64) -> [BranchDecision; 2] {
        [
            BranchDecision { family, at_most: true, bound: value.floor(), value },
            BranchDecision { family, at_most: false, bound: value.ceil(), value },
        ]
    }

    pub fn restriction(&self) -> Restriction {
        let sense = if self.at_most { Sense::Le } else { Sense::Ge };
        let rhs = self.bound;
        let first = |term| Restriction::First { term, sense, rhs };
        let second = |term| Restriction::Second { term, sense, rhs };
        match self.family {
            Family::FirstTotal => first(FirstTerm::Total),
            Family::FirstPeriod { period } => first(FirstTerm::Period(period)),
            Family::SatelliteVisits { satellite } => first(FirstTerm::Satellite(satellite)),
            Family::FirstRoute { route, period } => {
                let (lb, ub) = if self.at_most { (0.0, rhs) } else { (rhs, 1.0) };
                Restriction::Lambda { route, period, lb, ub }
            }
            Family::SecondTotal => second(BranchTerm::Routes { period: None }),
            Family::SecondPeriod { period } => second(BranchTerm::Routes { period: Some(period) }),
            Family::CustomerVisits { customer } => second(BranchTerm::Customer { customer, period: None, satellite: None }),
            Family::CustomerPeriod { customer, period } => {
                second(BranchTerm::Customer { customer, period: Some(period), satellite: None })
            }
            Family::CustomerSatellite { customer, period, satellite } => {
                second(BranchTerm::Customer { customer, period: Some(period), satellite: Some(satellite) })
            }
            Family::Edge { period, a, b } => second(BranchTerm::Edge { period, a, b }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate {
    Integral,
    Branch { family: Family, value: f64 },
}

/// Nonzero values of every family aggregate, in (family, index) order.
pub fn aggregates(master: &Master, primal: &[f64]) -> BTreeMap<Family, f64> {
    let inst = master.instance();
    let mut m: BTreeMap<Family, f64> = BTreeMap::new();
    let mut add = |f: Family, v: f64| *m.entry(f).or_insert(0.0) += v;
    for (p, r) in master.routes().iter().enumerate() {
        for t in 1..=inst.horizon() {
            let v = primal[master.lambda_id(p, t)];
            if v <= 1e-12 {
                continue;
            }
            add(Family::FirstTotal, v);
            add(Family::FirstPeriod { period: t }, v);
            for &s in &r.satellites {
                add(Family::SatelliteVisits { satellite: s }, v);
            }
            add(Family::FirstRoute { route: p, period: t }, v);
        }
    }
    for (k, col) in master.columns().iter().enumerate() {
        let v = primal[master.column_id(k)];
        if v <= 1e-12 {
            continue;
        }
        let t = col.period;
        add(Family::SecondTotal, v);
        add(Family::SecondPeriod { period: t }, v);
        for &c in &col.route {
            add(Family::CustomerVisits { customer: c }, v);
            add(Family::CustomerPeriod { customer: c, period: t }, v);
            add(Family::CustomerSatellite { customer: c, period: t, satellite: col.satellite }, v);
        }
        for (a, b) in col.edges(inst) {
            add(Family::Edge { period: t, a, b }, v);
        }
    }
    m
}

fn fractional(v: f64) -> bool {
    let f = v - v.floor();
    f.min(1.0 - f) > FRAC_TOL
}

fn closeness(v: f64) -> f64 {
    (v - v.floor() - 0.5).abs()
}

/// Picks the branching aggregate, or reports that every family is integral.
pub fn find_candidate(values: &BTreeMap<Family, f64>) -> Candidate {
    let mut best: [Option<(Family, f64)>; 11] = [None; 11];
    for (&f, &v) in values {
        if !fractional(v) {
            continue;
        }
        let slot = &mut best[f.number() as usize];
        if slot.map_or(true, |(_, w)| closeness(v) < closeness(w)) {
            *slot = Some((f, v));
        }
    }
    let pick = |types: &[usize]| {
        types.iter().filter_map(|&k| best[k]).fold(None, |acc: Option<(Family, f64)>, c| match acc {
            Some(a) if closeness(a.1) <= closeness(c.1) => Some(a),
            _ => Some(c),
        })
    };
    let chosen = best[1]
        .or_else(|| pick(&[2, 3, 4]))
        .or_else(|| {
            [7, 8, 9, 10]
                .iter()
                .filter_map(|&k| best[k])
                .find(|&(_, v)| (0.25..=0.75).contains(&(v - v.floor())))
        })
        .or_else(|| pick(&[5, 6, 7, 8, 9, 10]));
    match chosen {
        Some((family, value)) => Candidate::Branch { family, value },
        None => Candidate::Integral,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(v: &[(Family, f64)]) -> BTreeMap<Family, f64> {
        v.iter().copied().collect()
    }

    #[test]
    fn type_one_first() {
        let v = values(&[(Family::FirstTotal, 2.5), (Family::FirstPeriod { period: 1 }, 0.5)]);
        let Candidate::Branch { family, value } = find_candidate(&v) else { panic!() };
        assert_eq!(family, Family::FirstTotal);
        let [lo, hi] = BranchDecision::children(family, value);
        assert_eq!((lo.bound, hi.bound), (2.0, 3.0));
        assert_eq!(hi.restriction(), Restriction::First { term: FirstTerm::Total, sense: Sense::Ge, rhs: 3.0 });
    }

    #[test]
    fn first_echelon_closest_to_half() {
        let v = values(&[
            (Family::FirstTotal, 2.0),
            (Family::FirstPeriod { period: 1 }, 0.3),
            (Family::SatelliteVisits { satellite: 0 }, 1.6),
            (Family::FirstRoute { route: 2, period: 1 }, 0.4),
            (Family::CustomerVisits { customer: 0 }, 0.5),
        ]);
        assert_eq!(find_candidate(&v), Candidate::Branch { family: Family::FirstRoute { route: 2, period: 1 }, value: 0.4 });
    }

    #[test]
    fn priority_inside_quarter_band() {
        let v = values(&[
            (Family::SecondTotal, 2.5),
            (Family::CustomerVisits { customer: 1 }, 0.6),
            (Family::CustomerPeriod { customer: 0, period: 1 }, 0.5),
        ]);
        assert_eq!(find_candidate(&v), Candidate::Branch { family: Family::CustomerVisits { customer: 1 }, value: 0.6 });
        let v = values(&[
            (Family::SecondTotal, 2.4),
            (Family::CustomerVisits { customer: 1 }, 0.9),
            (Family::Edge { period: 1, a: 0, b: 3 }, 0.8),
        ]);
        assert_eq!(find_candidate(&v), Candidate::Branch { family: Family::SecondTotal, value: 2.4 });
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let v = values(&[
            (Family::CustomerPeriod { customer: 2, period: 1 }, 0.5),
            (Family::CustomerPeriod { customer: 0, period: 2 }, 0.5),
        ]);
        assert_eq!(
            find_candidate(&v),
            Candidate::Branch { family: Family::CustomerPeriod { customer: 0, period: 2 }, value: 0.5 }
        );
    }

    #[test]
    fn integral_values() {
        let v = values(&[(Family::FirstTotal, 2.0), (Family::Edge { period: 1, a: 0, b: 1 }, 1.0 - 1e-9)]);
        assert_eq!(find_candidate(&v), Candidate::Integral);
    }

    #[test]
    fn route_fixing_bounds() {
        let [lo, hi] = BranchDecision::children(Family::FirstRoute { route: 1, period: 2 }, 0.3);
        assert_eq!(lo.restriction(), Restriction::Lambda { route: 1, period: 2, lb: 0.0, ub: 0.0 });
        assert_eq!(hi.restriction(), Restriction::Lambda { route: 1, period: 2, lb: 1.0, ub: 1.0 });
    }
}
