//! A small exact linear-programming solver (two-phase simplex, Bland's rule).

use num_traits::{One, Signed, Zero};

use crate::matrix::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . y` over the current basic feasible solution.
    /// Returns false when unbounded.
    fn run(&mut self, cost: &[Rat], allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.width).find(|&j| {
                allowed(j) && !self.basis.contains(&j) && {
                    let mut r = cost[j].clone();
                    for (i, &b) in self.basis.iter().enumerate() {
                        if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                            r -= &cost[b] * &self.rows[i][j];
                        }
                    }
                    r.is_positive()
                }
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.width] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximizes `objective . x` over free variables `x` subject to the constraints.
pub fn maximize(objective: &[Rat], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    // y = (x+, x-, slacks, artificials)
    let art0 = 2 * n + slack_count;
    let width = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut slack = 2 * n;
    for (i, c) in constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); width + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[n + j] = -a.clone();
        }
        match c.rel {
            Relation::Le => {
                row[slack] = Rat::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Rat::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[width] = c.rhs.clone();
        if row[width].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[art0 + i] = Rat::one();
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (art0..art0 + m).collect(), width };
    let mut phase1 = vec![Rat::zero(); width];
    for c in phase1.iter_mut().skip(art0) {
        *c = -Rat::one();
    }
    t.run(&phase1, |_| true);
    let infeas: Rat = t.basis.iter().enumerate().filter(|(_, &b)| b >= art0).map(|(i, _)| t.rows[i][width].clone()).sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= art0 {
            if let Some(c) = (0..art0).find(|&c| !t.rows[i][c].is_zero()) {
                t.pivot(i, c);
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    let mut cost = vec![Rat::zero(); width];
    for (j, c) in objective.iter().enumerate() {
        cost[j] = c.clone();
        cost[n + j] = -c.clone();
    }
    if !t.run(&cost, |j| j < art0) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Rat::zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rows[i][width].clone();
    }
    let point: Vec<Rat> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
    let value = crate::matrix::dot_rat(objective, &point);
    LpOutcome::Optimal { value, point }
}

/// Some point satisfying the constraints, if any.
pub fn feasible_point(nvars: usize, constraints: &[Constraint]) -> Option<Vec<Rat>> {
    match maximize(&vec![Rat::zero(); nvars], constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;

    fn r(v: i64) -> Rat {
        rat(v, 1)
    }

    #[test]
    fn small_lp() {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x >= 0, y >= 0
        let cons = vec![
            Constraint::new(vec![r(1), r(2)], Relation::Le, r(4)),
            Constraint::new(vec![r(3), r(1)], Relation::Le, r(6)),
            Constraint::new(vec![r(1), r(0)], Relation::Ge, r(0)),
            Constraint::new(vec![r(0), r(1)], Relation::Ge, r(0)),
        ];
        match maximize(&[r(1), r(1)], &cons) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(14, 5));
                assert_eq!(point, vec![rat(8, 5), rat(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![
            Constraint::new(vec![r(1)], Relation::Ge, r(2)),
            Constraint::new(vec![r(1)], Relation::Le, r(1)),
        ];
        assert_eq!(maximize(&[r(1)], &cons), LpOutcome::Infeasible);
        let cons = vec![Constraint::new(vec![r(1), r(-1)], Relation::Eq, r(-3))];
        assert_eq!(maximize(&[r(1), r(0)], &cons), LpOutcome::Unbounded);
        assert_eq!(feasible_point(2, &cons).map(|p| &p[0] - &p[1]), Some(r(-3)));
    }
}
