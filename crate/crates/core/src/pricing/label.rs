//! Label resources and the dominance rule.

/// Resources of a partial path: reduced cost, load of full sub-deliveries,
/// ng-memory, and the open partial sub-delivery segment if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelState {
    pub cost: f64,
    pub load: i64,
    pub mem: u64,
    pub part: bool,
    /// Unit reduced cost of the partial sub-delivery, negative when `part`.
    pub rate: f64,
    /// Largest quantity the partial sub-delivery may still take.
    pub max_p: i64,
}

impl LabelState {
    pub fn root() -> Self {
        LabelState { cost: 0.0, load: 0, mem: 0, part: false, rate: 0.0, max_p: 0 }
    }

    fn rate_eff(&self) -> f64 {
        if self.part {
            self.rate
        } else {
            0.0
        }
    }

    /// Cost once the partial sub-delivery takes `room` units at most.
    pub fn completed(&self, room: i64) -> f64 {
        if self.part {
            self.cost + self.rate * self.max_p.min(room).max(0) as f64
        } else {
            self.cost
        }
    }
}

const EPS: f64 = 1e-12;

/// True when `a` is at least as good as `b` for every completion.
pub fn dominates(a: &LabelState, b: &LabelState) -> bool {
    let (ra, rb) = (a.rate_eff(), b.rate_eff());
    let (ma, mb) = (if a.part { a.max_p } else { 0 } as f64, if b.part { b.max_p } else { 0 } as f64);
    a.load <= b.load
        && a.mem & !b.mem == 0
        && (a.part as u8) <= (b.part as u8)
        && a.cost + ma * ra <= b.cost + mb * rb + EPS
        && a.cost <= b.cost + EPS
        && a.cost + mb * ra <= b.cost + mb * rb + EPS
}
