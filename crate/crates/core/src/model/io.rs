//! Canonical text format.
//!
//! ```text
//! nU nS nN tau K1 Q1 K2 Q2
//! id x y                                      (one line per supplier)
//! id x y capS initInvS holdS                  (one line per satellite)
//! id x y capC initInvC holdC d_1 ... d_tau    (one line per customer)
//! edge i j cost                               (optional, any number)
//! rounding nearest                            (optional)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::instance::{Customer, Fleet, Instance, InstanceData, Point, Satellite, Supplier};
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate() }
    }

    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens()
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })
    }
}

fn field<T: std::str::FromStr>(tokens: &[&str], i: usize, line: usize, name: &str) -> Result<T> {
    let raw = tokens.get(i).ok_or_else(|| Error::Parse { line, msg: format!("missing field `{name}`") })?;
    raw.parse().map_err(|_| Error::Parse { line, msg: format!("invalid `{name}`: {raw}") })
}

fn arity(tokens: &[&str], n: usize, line: usize) -> Result<()> {
    if tokens.len() != n {
        return Err(Error::Parse { line, msg: format!("expected {n} fields, found {}", tokens.len()) });
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<InstanceData> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("header")?;
    arity(&head, 8, ln)?;
    let n_sup: usize = field(&head, 0, ln, "nU")?;
    let n_sat: usize = field(&head, 1, ln, "nS")?;
    let n_cus: usize = field(&head, 2, ln, "nN")?;
    let horizon: usize = field(&head, 3, ln, "tau")?;
    let first_fleet = Fleet { vehicles: field(&head, 4, ln, "K1")?, capacity: field(&head, 5, ln, "Q1")? };
    let second_fleet = Fleet { vehicles: field(&head, 6, ln, "K2")?, capacity: field(&head, 7, ln, "Q2")? };

    let mut suppliers = Vec::with_capacity(n_sup);
    for _ in 0..n_sup {
        let (ln, t) = lines.expect("supplier")?;
        arity(&t, 3, ln)?;
        suppliers.push(Supplier {
            id: field(&t, 0, ln, "id")?,
            pos: Point::new(field(&t, 1, ln, "x")?, field(&t, 2, ln, "y")?),
        });
    }
    let mut satellites = Vec::with_capacity(n_sat);
    for _ in 0..n_sat {
        let (ln, t) = lines.expect("satellite")?;
        arity(&t, 6, ln)?;
        satellites.push(Satellite {
            id: field(&t, 0, ln, "id")?,
            pos: Point::new(field(&t, 1, ln, "x")?, field(&t, 2, ln, "y")?),
            capacity: field(&t, 3, ln, "capS")?,
            initial_inventory: field(&t, 4, ln, "initInvS")?,
            holding_cost: field(&t, 5, ln, "holdS")?,
        });
    }
    let mut customers = Vec::with_capacity(n_cus);
    for _ in 0..n_cus {
        let (ln, t) = lines.expect("customer")?;
        arity(&t, 6 + horizon, ln)?;
        let demand = (0..horizon).map(|h| field(&t, 6 + h, ln, "demand")).collect::<Result<Vec<i64>>>()?;
        customers.push(Customer {
            id: field(&t, 0, ln, "id")?,
            pos: Point::new(field(&t, 1, ln, "x")?, field(&t, 2, ln, "y")?),
            capacity: field(&t, 3, ln, "capC")?,
            initial_inventory: field(&t, 4, ln, "initInvC")?,
            holding_cost: field(&t, 5, ln, "holdC")?,
            demand,
        });
    }

    let mut edge_overrides = Vec::new();
    let mut round_distances = false;
    while let Some((ln, t)) = lines.next_tokens() {
        match t[0] {
            "edge" => {
                arity(&t, 4, ln)?;
                edge_overrides.push((field(&t, 1, ln, "i")?, field(&t, 2, ln, "j")?, field(&t, 3, ln, "cost")?));
            }
            "rounding" => {
                arity(&t, 2, ln)?;
                round_distances = match t[1] {
                    "nearest" => true,
                    "none" => false,
                    other => return Err(Error::Parse { line: ln, msg: format!("unknown rounding `{other}`") }),
                };
            }
            other => return Err(Error::Parse { line: ln, msg: format!("unexpected directive `{other}`") }),
        }
    }

    Ok(InstanceData {
        horizon,
        suppliers,
        satellites,
        customers,
        first_fleet,
        second_fleet,
        edge_overrides,
        round_distances,
    })
}

pub fn write_instance(d: &InstanceData) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {} {} {} {}",
        d.suppliers.len(),
        d.satellites.len(),
        d.customers.len(),
        d.horizon,
        d.first_fleet.vehicles,
        d.first_fleet.capacity,
        d.second_fleet.vehicles,
        d.second_fleet.capacity
    );
    for u in &d.suppliers {
        let _ = writeln!(out, "{} {} {}", u.id, u.pos.x, u.pos.y);
    }
    for s in &d.satellites {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            s.id, s.pos.x, s.pos.y, s.capacity, s.initial_inventory, s.holding_cost
        );
    }
    for c in &d.customers {
        let _ = write!(
            out,
            "{} {} {} {} {} {}",
            c.id, c.pos.x, c.pos.y, c.capacity, c.initial_inventory, c.holding_cost
        );
        for x in &c.demand {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    for (i, j, c) in &d.edge_overrides {
        let _ = writeln!(out, "edge {i} {j} {c}");
    }
    if d.round_distances {
        out.push_str("rounding nearest\n");
    }
    out
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    Instance::new(parse_instance(&text)?)
}
