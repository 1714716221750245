//! A small exact linear-programming solver: dense two-phase simplex over
//! rationals with Bland's rule, so it always terminates and every sign
//! decision is exact.

use num_traits::{One, Signed, Zero};

use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub cmp: Cmp,
    pub rhs: Q,
}

/// Maximize `objective . x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub n_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Q, x: Vec<Q> },
}

impl Lp {
    pub fn new(n_vars: usize) -> Self {
        Lp { n_vars, constraints: vec![], objective: vec![Q::zero(); n_vars] }
    }

    pub fn add(&mut self, coeffs: Vec<Q>, cmp: Cmp, rhs: Q) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    n_orig: usize,
    artificial_from: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let m = lp.constraints.len();
        let n_slack = lp.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let n_art = lp.constraints.iter().filter(|c| c.cmp != Cmp::Le || c.rhs.is_negative()).count();
        let width = lp.n_vars + n_slack + n_art;
        let artificial_from = lp.n_vars + n_slack;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (lp.n_vars, artificial_from);
        for c in &lp.constraints {
            let mut row = vec![Q::zero(); width];
            row[..lp.n_vars].clone_from_slice(&c.coeffs);
            let mut b = c.rhs.clone();
            let mut slack_sign = match c.cmp {
                Cmp::Le => Some(Q::one()),
                Cmp::Ge => Some(-Q::one()),
                Cmp::Eq => None,
            };
            if b.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                b = -b;
                slack_sign = slack_sign.map(|s| -s);
            }
            let mut basic = None;
            if let Some(s) = slack_sign {
                if s.is_positive() {
                    basic = Some(next_slack);
                }
                row[next_slack] = s;
                next_slack += 1;
            }
            let basic = match basic {
                Some(b) => b,
                None => {
                    row[next_art] = Q::one();
                    next_art += 1;
                    next_art - 1
                }
            };
            rows.push(row);
            rhs.push(b);
            basis.push(basic);
        }
        Tableau { rows, rhs, basis, n_orig: lp.n_vars, artificial_from }
    }

    fn width(&self) -> usize {
        self.rows.first().map(|r| r.len()).unwrap_or(self.artificial_from)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for j in 0..self.rows[i].len() {
                if !self.rows[r][j].is_zero() {
                    let d = &f * &self.rows[r][j];
                    self.rows[i][j] -= d;
                }
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = col;
    }

    /// Maximizes `cost` with Bland's rule; `allowed` bounds entering columns.
    /// Returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= &cost[b] * &self.rows[i][j];
                }
                r.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut best: Option<(Q, usize, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][j];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, i, _)) => self.pivot(i, j),
            }
        }
    }

    fn value(&self, cost: &[Q]) -> Q {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }

    fn run(mut self, objective: &[Q]) -> LpResult {
        let width = self.width();
        if self.basis.iter().any(|&b| b >= self.artificial_from) {
            let mut phase1 = vec![Q::zero(); width];
            for v in phase1.iter_mut().skip(self.artificial_from) {
                *v = -Q::one();
            }
            self.optimize(&phase1, width);
            if self.value(&phase1).is_negative() {
                return LpResult::Infeasible;
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![Q::zero(); width];
        cost[..self.n_orig].clone_from_slice(objective);
        if !self.optimize(&cost, self.artificial_from) {
            return LpResult::Unbounded;
        }
        let mut x = vec![Q::zero(); self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                x[b] = self.rhs[i].clone();
            }
        }
        LpResult::Optimal { value: self.value(&cost), x }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn textbook() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
        let mut lp = Lp::new(2);
        lp.objective = vec![q(3), q(5)];
        lp.add(vec![q(1), q(0)], Cmp::Le, q(4));
        lp.add(vec![q(0), q(2)], Cmp::Le, q(12));
        lp.add(vec![q(3), q(2)], Cmp::Le, q(18));
        assert_eq!(lp.solve(), LpResult::Optimal { value: q(36), x: vec![q(2), q(6)] });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add(vec![q(1)], Cmp::Ge, q(2));
        lp.add(vec![q(1)], Cmp::Le, q(1));
        assert_eq!(lp.solve(), LpResult::Infeasible);
        let mut lp = Lp::new(2);
        lp.objective = vec![q(1), q(0)];
        lp.add(vec![q(1), q(-1)], Cmp::Eq, q(0));
        assert_eq!(lp.solve(), LpResult::Unbounded);
    }

    #[test]
    fn equalities_with_redundancy() {
        // x + y = 1, 2x + 2y = 2, maximize x - y.
        let mut lp = Lp::new(2);
        lp.objective = vec![q(1), q(-1)];
        lp.add(vec![q(1), q(1)], Cmp::Eq, q(1));
        lp.add(vec![q(2), q(2)], Cmp::Eq, q(2));
        assert_eq!(lp.solve(), LpResult::Optimal { value: q(1), x: vec![q(1), q(0)] });
    }
}
