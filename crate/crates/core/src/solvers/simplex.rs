//! Phase-one simplex over exact rationals with Bland's rule.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Feasibility of `{x ≥ 0 : A x ≤ b, C x = d}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearFeasibility {
    pub num_vars: usize,
    /// Rows `a·x ≤ b`.
    pub inequalities: Vec<(Vec<Rational>, Rational)>,
    /// Rows `a·x = b`.
    pub equalities: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl LinearFeasibility {
    pub fn new(num_vars: usize) -> Self {
        LinearFeasibility { num_vars, ..Default::default() }
    }

    pub fn add_leq(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.inequalities.push((row, rhs));
        self
    }

    pub fn add_eq(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.equalities.push((row, rhs));
        self
    }

    fn validate(&self) -> Result<()> {
        for (row, _) in self.inequalities.iter().chain(&self.equalities) {
            if row.len() != self.num_vars {
                return Err(Error::MalformedInstance(format!(
                    "row has {} coefficients, expected {}",
                    row.len(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    /// True iff `x` satisfies every row and the sign constraints exactly.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let dot = |row: &[Rational]| row.iter().zip(x).fold(Rational::zero(), |acc, (a, v)| acc + a * v);
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.inequalities.iter().all(|(row, b)| dot(row) <= *b)
            && self.equalities.iter().all(|(row, b)| dot(row) == *b)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds minus the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality (the phase-one objective is bounded below by zero).
    fn solve(&mut self) {
        let rhs = self.cost.len() - 1;
        while let Some(c) = (0..rhs).find(|&j| self.cost[j].is_negative()) {
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                // Unbounded direction cannot occur for a non-negative objective.
                None => break,
            }
        }
    }
}

/// Finds a point of the polyhedron or proves it empty.
///
/// Inequality rows with non-negative right-hand side start with their slack
/// in the basis; every other row receives an artificial variable.
pub fn lp_feasible(inst: &LinearFeasibility) -> Result<LpOutcome> {
    inst.validate()?;
    let n = inst.num_vars;
    let n_ineq = inst.inequalities.len();
    let rows_in: Vec<(&Vec<Rational>, &Rational, Option<usize>)> = inst
        .inequalities
        .iter()
        .enumerate()
        .map(|(i, (a, b))| (a, b, Some(i)))
        .chain(inst.equalities.iter().map(|(a, b)| (a, b, None)))
        .collect();
    let needs_artificial: Vec<bool> = rows_in.iter().map(|(_, b, slack)| slack.is_none() || b.is_negative()).collect();
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let width = n + n_ineq + n_art;
    let mut rows = Vec::with_capacity(rows_in.len());
    let mut basis = Vec::with_capacity(rows_in.len());
    let mut next_art = n + n_ineq;
    for (k, (a, b, slack)) in rows_in.iter().enumerate() {
        let mut row = alloc::vec![Rational::zero(); width + 1];
        let sign = if b.is_negative() { -Rational::one() } else { Rational::one() };
        for (j, v) in a.iter().enumerate() {
            row[j] = v * &sign;
        }
        if let Some(s) = slack {
            row[n + s] = sign.clone();
        }
        row[width] = *b * &sign;
        if needs_artificial[k] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + slack.unwrap_or(0));
        }
        rows.push(row);
    }
    let mut cost = alloc::vec![Rational::zero(); width + 1];
    for c in &mut cost[n + n_ineq..width] {
        *c = Rational::one();
    }
    for (k, row) in rows.iter().enumerate() {
        if needs_artificial[k] {
            for (c, v) in cost.iter_mut().zip(row) {
                *c -= v;
            }
        }
    }
    let mut tab = Tableau { rows, cost, basis };
    tab.solve();
    let objective = -tab.cost[width].clone();
    if objective.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }
    let mut x = alloc::vec![Rational::zero(); n];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < n {
            x[b] = row[width].clone();
        }
    }
    if !inst.satisfied_by(&x) {
        return Err(Error::MalformedInstance("simplex produced a point failing substitution".into()));
    }
    Ok(LpOutcome::Feasible(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn simplex_point() {
        let mut lp = LinearFeasibility::new(2);
        lp.add_eq(alloc::vec![int(1), int(1)], int(1));
        let LpOutcome::Feasible(x) = lp_feasible(&lp).unwrap() else { panic!("expected feasible") };
        assert!(lp.satisfied_by(&x));
    }

    #[test]
    fn contradictory_rows() {
        let mut lp = LinearFeasibility::new(2);
        lp.add_eq(alloc::vec![int(1), int(1)], int(1)).add_leq(alloc::vec![int(1), int(1)], ratio(1, 2));
        assert_eq!(lp_feasible(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn negative_rhs_needs_artificial() {
        // x1 - x2 <= -1, x1 + x2 <= 3  →  e.g. (0, 1)
        let mut lp = LinearFeasibility::new(2);
        lp.add_leq(alloc::vec![int(1), int(-1)], int(-1)).add_leq(alloc::vec![int(1), int(1)], int(3));
        let LpOutcome::Feasible(x) = lp_feasible(&lp).unwrap() else { panic!("expected feasible") };
        assert!(lp.satisfied_by(&x));
        lp.add_leq(alloc::vec![int(0), int(1)], ratio(1, 2));
        assert_eq!(lp_feasible(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn malformed_row() {
        let mut lp = LinearFeasibility::new(2);
        lp.add_eq(alloc::vec![int(1)], int(1));
        assert!(matches!(lp_feasible(&lp), Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn degenerate_rows_terminate() {
        // Many zero-rhs rows through the origin plus a normalization: Bland must not cycle.
        let mut lp = LinearFeasibility::new(4);
        lp.add_eq(alloc::vec![int(1); 4], int(1));
        for k in 0..6i64 {
            lp.add_leq(alloc::vec![int(k - 2), int(1 - k), int(2), int(-3)], int(0));
        }
        match lp_feasible(&lp).unwrap() {
            LpOutcome::Feasible(x) => assert!(lp.satisfied_by(&x)),
            LpOutcome::Infeasible => {}
        }
    }
}
