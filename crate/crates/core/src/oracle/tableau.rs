//! Dense two-phase tableau simplex with Bland's rule. Small and slow on purpose:
//! it shares no code with the solver's LP.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Default)]
pub struct Tableau {
    n: usize,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
}

const EPS: f64 = 1e-9;

impl Tableau {
    pub fn new(n: usize) -> Self {
        Tableau { n, cost: vec![0.0; n], rows: Vec::new() }
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.cost[j] = c;
    }

    pub fn row(&mut self, coefs: &[(usize, f64)], cmp: Cmp, rhs: f64) {
        let mut a = vec![0.0; self.n];
        for &(j, v) in coefs {
            a[j] += v;
        }
        self.rows.push((a, cmp, rhs));
    }

    /// Minimum of `cost · x` over `x ≥ 0` and the rows; `None` if infeasible.
    pub fn minimize(&self) -> Option<(f64, Vec<f64>)> {
        let m = self.rows.len();
        let n = self.n;
        let n_slack = self.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let width = n + n_slack + m;
        let art0 = n + n_slack;
        let mut t = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0; m];
        let mut k = n;
        for (i, (a, cmp, rhs)) in self.rows.iter().enumerate() {
            let flip = if *rhs < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i][j] = a[j] * flip;
            }
            match cmp {
                Cmp::Le => {
                    t[i][k] = flip;
                    k += 1;
                }
                Cmp::Ge => {
                    t[i][k] = -flip;
                    k += 1;
                }
                Cmp::Eq => {}
            }
            t[i][art0 + i] = 1.0;
            t[i][width] = rhs * flip;
            basis[i] = art0 + i;
        }
        let mut phase1 = vec![0.0; width];
        for c in phase1.iter_mut().skip(art0) {
            *c = 1.0;
        }
        run(&mut t, &mut basis, &phase1, width, width);
        let infeas: f64 = (0..m).filter(|&i| basis[i] >= art0).map(|i| t[i][width]).sum();
        if infeas > 1e-7 {
            return None;
        }
        for i in 0..m {
            if basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| t[i][j].abs() > EPS) {
                    pivot(&mut t, &mut basis, i, j, width);
                }
            }
        }
        let mut phase2 = vec![0.0; width];
        phase2[..n].copy_from_slice(&self.cost);
        run(&mut t, &mut basis, &phase2, art0, width);
        let mut x = vec![0.0; n];
        for i in 0..m {
            if basis[i] < n {
                x[basis[i]] = t[i][width];
            }
        }
        let obj = (0..n).map(|j| self.cost[j] * x[j]).sum();
        Some((obj, x))
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize, width: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let pr = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && row[c].abs() > 0.0 {
            let f = row[c];
            for j in 0..=width {
                row[j] -= f * pr[j];
            }
        }
    }
    basis[r] = c;
}

/// Bland's rule over the columns `0..enter_limit`.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], enter_limit: usize, width: usize) {
    loop {
        let dual: Vec<f64> = basis.iter().map(|&b| cost[b]).collect();
        let entering = (0..enter_limit).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let rc = cost[j] - (0..t.len()).map(|i| dual[i] * t[i][j]).sum::<f64>();
            rc < -EPS
        });
        let Some(j) = entering else { return };
        let mut leave: Option<(f64, usize, usize)> = None;
        for i in 0..t.len() {
            if t[i][j] > EPS {
                let ratio = t[i][width] / t[i][j];
                let better = match leave {
                    None => true,
                    Some((r, _, b)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < b),
                };
                if better {
                    leave = Some((ratio, i, basis[i]));
                }
            }
        }
        let Some((_, r, _)) = leave else {
            panic!("oracle LP unbounded");
        };
        pivot(t, basis, r, j, width);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_programs() {
        // min -x - y, x + 2y <= 4, 3x + y <= 6
        let mut lp = Tableau::new(2);
        lp.set_cost(0, -1.0);
        lp.set_cost(1, -1.0);
        lp.row(&[(0, 1.0), (1, 2.0)], Cmp::Le, 4.0);
        lp.row(&[(0, 3.0), (1, 1.0)], Cmp::Le, 6.0);
        let (v, x) = lp.minimize().unwrap();
        assert!((v + 2.8).abs() < 1e-9 && (x[0] - 1.6).abs() < 1e-9);

        let mut lp = Tableau::new(2);
        lp.set_cost(0, 2.0);
        lp.set_cost(1, 3.0);
        lp.row(&[(0, 1.0), (1, 1.0)], Cmp::Eq, 5.0);
        lp.row(&[(1, 1.0)], Cmp::Ge, 1.0);
        assert!((lp.minimize().unwrap().0 - 11.0).abs() < 1e-9);

        let mut lp = Tableau::new(1);
        lp.row(&[(0, 1.0)], Cmp::Ge, 2.0);
        lp.row(&[(0, 1.0)], Cmp::Le, 1.0);
        assert!(lp.minimize().is_none());
    }
}
