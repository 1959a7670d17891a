//! The stochastic preorder `μ ≤ ν` on finitely supported measures.
//!
//! Two independent deciders: [`leq_st_1d`] compares closed tails on the real
//! line, [`leq_st`] solves the transportation problem over the admissible
//! pairs `{(x, y) : x ≤ y}` for any polyhedral cone. A positive verdict always
//! carries a coupling; a negative one carries a violating upset.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::point::Point;
use crate::rational::Rational;
use crate::solvers::{transport_feasible, TransportInstance, TransportOutcome};

/// Joint measure supported on the order relation with prescribed marginals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CouplingPlan {
    pub entries: BTreeMap<(Point, Point), Rational>,
}

impl CouplingPlan {
    pub fn left_marginal(&self, dim: usize) -> Result<Measure> {
        Measure::new(dim, self.entries.iter().map(|((x, _), w)| (x.clone(), w.clone())))
    }

    pub fn right_marginal(&self, dim: usize) -> Result<Measure> {
        Measure::new(dim, self.entries.iter().map(|((_, y), w)| (y.clone(), w.clone())))
    }

    /// Marginals reproduce `μ`, `ν` and every pair is ordered.
    pub fn certifies(&self, mu: &Measure, nu: &Measure, cone: &Cone) -> bool {
        let dim = mu.dim();
        self.entries.values().all(Signed::is_positive)
            && self.entries.keys().all(|(x, y)| cone.leq_point(x, y).unwrap_or(false))
            && self.left_marginal(dim).as_ref() == Ok(mu)
            && self.right_marginal(dim).as_ref() == Ok(nu)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderVerdict {
    pub dominated: bool,
    pub witness_coupling: Option<CouplingPlan>,
    /// Generators of a closed upset `C` with `μ(C) > ν(C)`.
    pub witness_upset: Option<Vec<Point>>,
}

impl OrderVerdict {
    fn holds(plan: CouplingPlan) -> Self {
        OrderVerdict { dominated: true, witness_coupling: Some(plan), witness_upset: None }
    }

    fn fails(upset: Vec<Point>) -> Self {
        OrderVerdict { dominated: false, witness_coupling: None, witness_upset: Some(upset) }
    }
}

fn same_dim(mu: &Measure, nu: &Measure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
    }
    Ok(())
}

fn same_mass(mu: &Measure, nu: &Measure) -> Result<()> {
    let (left, right) = (mu.mass(), nu.mass());
    if left != right {
        return Err(Error::MassMismatch { left: Box::new(left), right: Box::new(right) });
    }
    Ok(())
}

/// Mass of the closed upset generated by `generators`.
pub fn upset_mass(mu: &Measure, cone: &Cone, generators: &[Point]) -> Result<Rational> {
    if mu.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: mu.dim() });
    }
    for g in generators {
        g.check_dim(cone.dim())?;
    }
    Ok(mu
        .iter()
        .filter(|(x, _)| generators.iter().any(|g| cone.leq_unchecked(g, x)))
        .fold(Rational::zero(), |acc, (_, w)| acc + w))
}

/// Closed tail `μ([c, ∞))` of a one-dimensional measure.
pub fn tail(mu: &Measure, c: &Rational) -> Rational {
    mu.iter().filter(|(x, _)| x.coords()[0] >= *c).fold(Rational::zero(), |acc, (_, w)| acc + w)
}

/// One-dimensional decider by closed-tail comparison at every support point.
///
/// On success the witness is the comonotone (quantile) coupling.
pub fn leq_st_1d(mu: &Measure, nu: &Measure) -> Result<OrderVerdict> {
    for m in [mu, nu] {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: m.dim() });
        }
    }
    same_mass(mu, nu)?;
    let mut thresholds: Vec<&Point> = mu.support().chain(nu.support()).collect();
    thresholds.sort();
    thresholds.dedup();
    // Sweep from the right, accumulating tails.
    let (a, b) = (mu.scalar_atoms(), nu.scalar_atoms());
    let (mut ia, mut ib) = (a.len(), b.len());
    let (mut ta, mut tb) = (Rational::zero(), Rational::zero());
    for c in thresholds.iter().rev() {
        let c = &c.coords()[0];
        while ia > 0 && a[ia - 1].0 >= *c {
            ia -= 1;
            ta += &a[ia].1;
        }
        while ib > 0 && b[ib - 1].0 >= *c {
            ib -= 1;
            tb += &b[ib].1;
        }
        if ta > tb {
            return Ok(OrderVerdict::fails(alloc::vec![Point::scalar(c.clone())]));
        }
    }
    Ok(OrderVerdict::holds(quantile_coupling(&a, &b)))
}

fn quantile_coupling(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> CouplingPlan {
    let mut plan = CouplingPlan::default();
    let (mut i, mut j) = (0, 0);
    let mut left_a = a.first().map(|p| p.1.clone()).unwrap_or_else(Rational::zero);
    let mut left_b = b.first().map(|p| p.1.clone()).unwrap_or_else(Rational::zero);
    while i < a.len() && j < b.len() {
        let w = if left_a < left_b { left_a.clone() } else { left_b.clone() };
        *plan
            .entries
            .entry((Point::scalar(a[i].0.clone()), Point::scalar(b[j].0.clone())))
            .or_insert_with(Rational::zero) += &w;
        left_a -= &w;
        left_b -= &w;
        if left_a.is_zero() {
            i += 1;
            if i < a.len() {
                left_a = a[i].1.clone();
            }
        }
        if left_b.is_zero() {
            j += 1;
            if j < b.len() {
                left_b = b[j].1.clone();
            }
        }
    }
    plan
}

/// `x ≤ y` for every `x ∈ supp μ`, `y ∈ supp ν`.
pub fn supp_dominates(mu: &Measure, nu: &Measure, cone: &Cone) -> Result<bool> {
    same_dim(mu, nu)?;
    if mu.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: mu.dim() });
    }
    Ok(mu.support().all(|x| nu.support().all(|y| cone.leq_unchecked(x, y))))
}

/// General decider: feasibility of the order-respecting transportation problem.
pub fn leq_st(mu: &Measure, nu: &Measure, cone: &Cone) -> Result<OrderVerdict> {
    same_dim(mu, nu)?;
    if mu.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: mu.dim() });
    }
    same_mass(mu, nu)?;
    let xs: Vec<(&Point, &Rational)> = mu.iter().collect();
    let ys: Vec<(&Point, &Rational)> = nu.iter().collect();
    if supp_dominates(mu, nu, cone)? {
        // Any coupling works; use the normalized product.
        let mut plan = CouplingPlan::default();
        if !xs.is_empty() {
            let mass = mu.mass();
            for (x, v) in &xs {
                for (y, w) in &ys {
                    plan.entries.insert(((*x).clone(), (*y).clone()), *v * *w / &mass);
                }
            }
        }
        return Ok(OrderVerdict::holds(plan));
    }
    let mut edges = Vec::new();
    for (i, (x, _)) in xs.iter().enumerate() {
        for (j, (y, _)) in ys.iter().enumerate() {
            if cone.leq_unchecked(x, y) {
                edges.push((i, j));
            }
        }
    }
    let inst = TransportInstance {
        supplies: xs.iter().map(|(_, w)| (*w).clone()).collect(),
        demands: ys.iter().map(|(_, w)| (*w).clone()).collect(),
        edges,
    };
    Ok(match transport_feasible(&inst)? {
        TransportOutcome::Plan(flows) => {
            let entries = flows.into_iter().map(|((i, j), f)| ((xs[i].0.clone(), ys[j].0.clone()), f)).collect();
            OrderVerdict::holds(CouplingPlan { entries })
        }
        TransportOutcome::Cut(set) => OrderVerdict::fails(set.into_iter().map(|i| xs[i].0.clone()).collect()),
    })
}

/// Picks the cheapest exact decider for the cone at hand.
pub fn decide(mu: &Measure, nu: &Measure, cone: &Cone) -> Result<OrderVerdict> {
    if cone.is_standard_halfline() && mu.dim() == 1 && nu.dim() == 1 {
        leq_st_1d(mu, nu)
    } else {
        leq_st(mu, nu, cone)
    }
}

/// Checks a violating upset: `μ(↑A) > ν(↑A)`.
pub fn upset_violates(mu: &Measure, nu: &Measure, cone: &Cone, upset: &[Point]) -> Result<bool> {
    Ok(upset_mass(mu, cone, upset)? > upset_mass(nu, cone, upset)?)
}

/// Verifies the coarsening sandwich `μ ∗ δ_{−2su} ≤ ν ≤ μ ∗ δ_{+2su}` in the
/// orthant order.
pub fn verify_coarsening(mu: &Measure, coarse: &Measure, u: &Point, step: &Rational) -> Result<bool> {
    let orthant = Cone::orthant(mu.dim())?;
    let slack = u.scale(&(step * Rational::from_integer(2.into())));
    let lower = mu.shift(&slack.neg())?;
    let upper = mu.shift(&slack)?;
    Ok(leq_st(&lower, coarse, &orthant)?.dominated && leq_st(coarse, &upper, &orthant)?.dominated)
}
