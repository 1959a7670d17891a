//! Asymptotic and catalytic dominance: the minimal stable `n` for which
//! `X^{∗n} ≤ Y^{∗n}`, catalyst search on a fixed grid, and the exponent `k`
//! with `ν ≤ δ_{ku} ∗ μ`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::par;
use crate::point::Point;
use crate::rational::{self, Rational};
use crate::stochorder::{self, tail};

/// Default largest power examined by [`min_n`].
pub const DEFAULT_N_MAX: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinNResult {
    pub found: bool,
    /// Smallest `n` such that dominance holds for every `n' ∈ [n, stable_through]`.
    pub n0: Option<u64>,
    pub stable_through: u64,
    /// Each failing `n` with the violating upset returned by the decider.
    pub failures: Vec<(u64, Vec<Point>)>,
}

/// Tests `X^{∗n} ≤ Y^{∗n}` for `n = 1..=n_max`.
///
/// A `found = false` at `n_max` is inconclusive: dominance is only promised
/// for all sufficiently large `n`, with no a priori bound.
pub fn min_n(x: &Measure, y: &Measure, cone: &Cone, n_max: u64, cap: usize) -> Result<MinNResult> {
    x.require_probability()?;
    y.require_probability()?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let ns: Vec<u64> = (1..=n_max).collect();
    let verdicts = par::map(ns, |n| -> Result<(u64, Option<Vec<Point>>)> {
        let xn = x.convolve_power(n, cap)?;
        let yn = y.convolve_power(n, cap)?;
        let v = stochorder::decide(&xn, &yn, cone)?;
        Ok((n, if v.dominated { None } else { Some(v.witness_upset.unwrap_or_default()) }))
    });
    let mut failures = Vec::new();
    for v in verdicts {
        let (n, failure) = v?;
        if let Some(upset) = failure {
            failures.push((n, upset));
        }
    }
    let last_failure = failures.last().map(|f| f.0);
    let n0 = match last_failure {
        None => Some(1),
        Some(n) if n < n_max => Some(n + 1),
        Some(_) => None,
    };
    Ok(MinNResult { found: n0.is_some(), n0, stable_through: n_max, failures })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalyst {
    pub z: Measure,
    pub grid_step: Rational,
    /// `X ∗ Z ≤ Y ∗ Z` re-checked exactly.
    pub verified: bool,
}

/// Coarsest step `s` such that the given points lie on `a + s·Z`; zero for a
/// single point.
pub fn lattice_step<'a, I>(values: I) -> Rational
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut it = values.into_iter();
    let Some(first) = it.next() else { return Rational::zero() };
    it.fold(Rational::zero(), |g, v| rational::gcd(&g, &(v - first)))
}

/// Default catalyst grid step: the lattice step of `supp X ∪ supp Y`, or 1
/// when both are the same point.
pub fn default_grid_step(x: &Measure, y: &Measure) -> Rational {
    let pts: Vec<Rational> = x.support().chain(y.support()).map(|p| p.coords()[0].clone()).collect();
    let s = lattice_step(&pts);
    if s.is_zero() {
        Rational::from_integer(1.into())
    } else {
        s
    }
}

/// `{0, step, 2·step, …}` up to and including `max`.
pub fn uniform_grid(step: &Rational, max: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::NonPositiveStep(Box::new(step.clone())));
    }
    let mut out = Vec::new();
    let mut v = Rational::zero();
    while v <= *max {
        out.push(v.clone());
        v += step;
    }
    Ok(out)
}

/// Searches a catalyst supported on `grid` by linear feasibility in its weights.
///
/// `Ok(None)` means no catalyst exists on this grid; a catalyst may still
/// exist on a finer or wider one.
pub fn catalyst_1d(x: &Measure, y: &Measure, grid: &[Rational]) -> Result<Option<Catalyst>> {
    use crate::solvers::{lp_feasible, LinearFeasibility, LpOutcome};

    for m in [x, y] {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: m.dim() });
        }
        m.require_probability()?;
    }
    let mut grid: Vec<Rational> = grid.to_vec();
    grid.sort();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::InvalidArgument("catalyst grid must be nonempty".into()));
    }
    let mut thresholds: Vec<Rational> =
        x.support().chain(y.support()).flat_map(|p| grid.iter().map(move |g| &p.coords()[0] + g)).collect();
    thresholds.sort();
    thresholds.dedup();

    let mut lp = LinearFeasibility::new(grid.len());
    lp.add_eq(alloc::vec![Rational::from_integer(1.into()); grid.len()], Rational::from_integer(1.into()));
    for c in &thresholds {
        let row: Vec<Rational> = grid.iter().map(|g| tail(x, &(c - g)) - tail(y, &(c - g))).collect();
        // Rows with no positive coefficient hold for every z ≥ 0.
        if row.iter().any(Signed::is_positive) {
            lp.add_leq(row, Rational::zero());
        }
    }
    let LpOutcome::Feasible(weights) = lp_feasible(&lp)? else {
        return Ok(None);
    };
    let z = Measure::from_scalars(grid.iter().cloned().zip(weights))?;
    let verified = stochorder::leq_st_1d(&x.convolve(&z)?, &y.convolve(&z)?)?.dominated;
    Ok(Some(Catalyst { z, grid_step: lattice_step(&grid), verified }))
}

/// Smallest `k ≥ 0` with `ν ≤ δ_{k·u} ∗ μ`, searched up to `2·bounding_k` of
/// the joint support, which always suffices.
pub fn growth_exponent(mu: &Measure, nu: &Measure, cone: &Cone) -> Result<u64> {
    mu.require_probability()?;
    nu.require_probability()?;
    let support: Vec<Point> = mu.support().chain(nu.support()).cloned().collect();
    let bound = 2 * cone.bounding_k(&support)?;
    for k in 0..=bound {
        let shifted = mu.shift(&cone.unit().scale(&rational::int(k as i64)))?;
        if stochorder::decide(nu, &shifted, cone)?.dominated {
            return Ok(k);
        }
    }
    Err(Error::InvalidArgument("no exponent within the proven bound; inputs inconsistent".into()))
}
