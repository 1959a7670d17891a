//! Finitely supported unsigned measures on `R^d` with exact weights.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rational::{self, Rational};

/// Default atom budget for [`Measure::convolve_power`].
pub const DEFAULT_ATOM_CAP: usize = 1_000_000;

/// A finite map from points to strictly positive rational weights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Measure {
    dim: usize,
    atoms: BTreeMap<Point, Rational>,
}

impl Measure {
    /// Builds a measure, merging repeated points and dropping zero weights.
    pub fn new<I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Rational)>,
    {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut map: BTreeMap<Point, Rational> = BTreeMap::new();
        for (x, w) in atoms {
            x.check_dim(dim)?;
            if w.is_negative() {
                return Err(Error::Negative(Box::new(w)));
            }
            *map.entry(x).or_insert_with(Rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        Ok(Measure { dim, atoms: map })
    }

    /// The zero measure of dimension `dim`.
    pub fn zero(dim: usize) -> Result<Self> {
        Measure::new(dim, core::iter::empty())
    }

    /// Unit mass at `x`.
    pub fn delta(x: Point) -> Self {
        let dim = x.dim();
        let mut atoms = BTreeMap::new();
        atoms.insert(x, Rational::one());
        Measure { dim, atoms }
    }

    /// One-dimensional convenience constructor from `(position, weight)` pairs.
    pub fn from_scalars<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        Measure::new(1, atoms.into_iter().map(|(x, w)| (Point::scalar(x), w)))
    }

    /// Weighted sum `Σ c_i μ_i` with non-negative coefficients.
    pub fn mix(terms: &[(Rational, &Measure)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidArgument("mix needs at least one term".into()));
        };
        let dim = first.dim;
        let mut out = BTreeMap::new();
        for (c, m) in terms {
            if c.is_negative() {
                return Err(Error::Negative(Box::new(c.clone())));
            }
            if m.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim });
            }
            if c.is_zero() {
                continue;
            }
            for (x, w) in &m.atoms {
                *out.entry(x.clone()).or_insert_with(Rational::zero) += c * w;
            }
        }
        out.retain(|_, w: &mut Rational| !w.is_zero());
        Ok(Measure { dim, atoms: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &BTreeMap<Point, Rational> {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.atoms.keys()
    }

    pub fn weight(&self, x: &Point) -> Rational {
        self.atoms.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        self.atoms.values().fold(Rational::zero(), |acc, w| acc + w)
    }

    pub fn is_probability(&self) -> bool {
        self.mass().is_one()
    }

    pub(crate) fn require_probability(&self) -> Result<()> {
        let mass = self.mass();
        if !mass.is_one() {
            return Err(Error::NotNormalized(Box::new(mass)));
        }
        Ok(())
    }

    /// Rescales the weights to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.mass();
        if mass.is_zero() {
            return Err(Error::NotNormalized(Box::new(mass)));
        }
        let atoms = self.atoms.iter().map(|(x, w)| (x.clone(), w / &mass)).collect();
        Ok(Measure { dim: self.dim, atoms })
    }

    /// Barycentre `Σ w x / Σ w`; `None` for the zero measure.
    pub fn mean(&self) -> Option<Point> {
        let mass = self.mass();
        if mass.is_zero() {
            return None;
        }
        let mut acc = Point::zero(self.dim);
        for (x, w) in &self.atoms {
            acc = acc.add(&x.scale(w));
        }
        Some(acc.scale(&(Rational::one() / mass)))
    }

    fn check_same_dim(&self, other: &Measure) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Convolution: atoms at Minkowski sums, weights multiplied and merged.
    pub fn convolve(&self, other: &Measure) -> Result<Measure> {
        self.check_same_dim(other)?;
        // Integer weights over a common denominator avoid a gcd per product.
        let (da, a) = self.integer_weights();
        let (db, b) = other.integer_weights();
        let mut sums: BTreeMap<Point, BigInt> = BTreeMap::new();
        for (x, v) in &a {
            for (y, w) in &b {
                *sums.entry(x.add(y)).or_insert_with(BigInt::zero) += v * w;
            }
        }
        let den = da * db;
        let atoms = sums.into_iter().map(|(p, s)| (p, Rational::new(s, den.clone()))).collect();
        Ok(Measure { dim: self.dim, atoms })
    }

    /// `(D, [(x, D·w_x)])` with `D` the least common denominator of the weights.
    fn integer_weights(&self) -> (BigInt, Vec<(&Point, BigInt)>) {
        let den = self.atoms.values().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let scaled = self.atoms.iter().map(|(x, w)| (x, w.numer() * (&den / w.denom()))).collect();
        (den, scaled)
    }

    /// `n`-fold convolution by repeated squaring. `n = 0` gives `δ_0`.
    ///
    /// Fails with [`Error::AtomBudgetExceeded`] as soon as an intermediate
    /// result holds more than `cap` atoms.
    pub fn convolve_power(&self, n: u64, cap: usize) -> Result<Measure> {
        let check = |m: Measure| -> Result<Measure> {
            if m.len() > cap {
                return Err(Error::AtomBudgetExceeded { cap, reached: m.len() });
            }
            Ok(m)
        };
        let mut result = Measure::delta(Point::zero(self.dim));
        let mut base = check(self.clone())?;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = check(result.convolve(&base)?)?;
            }
            k >>= 1;
            if k > 0 {
                base = check(base.convolve(&base)?)?;
            }
        }
        Ok(result)
    }

    /// Translation by `a`; equal to `self ∗ δ_a`.
    pub fn shift(&self, a: &Point) -> Result<Measure> {
        a.check_dim(self.dim)?;
        let atoms = self.atoms.iter().map(|(x, w)| (x.add(a), w.clone())).collect();
        Ok(Measure { dim: self.dim, atoms })
    }

    /// Pushforward along `x ↦ factor·x`.
    pub fn dilate(&self, factor: &Rational) -> Result<Measure> {
        if factor.is_zero() {
            return Measure::new(self.dim, [(Point::zero(self.dim), self.mass())]);
        }
        let atoms = self.atoms.iter().map(|(x, w)| (x.scale(factor), w.clone())).collect();
        Ok(Measure { dim: self.dim, atoms })
    }

    /// Pushforward along the linear functional `x ↦ ⟨t, x⟩`.
    pub fn project(&self, t: &Point) -> Result<Measure> {
        t.check_dim(self.dim)?;
        Measure::new(1, self.atoms.iter().map(|(x, w)| (Point::scalar(t.dot(x)), w.clone())))
    }

    /// Floors every coordinate to the lattice `(step·Z)^d` and merges weights.
    ///
    /// Each atom moves down by less than `step` per coordinate, so for an
    /// order unit with all coordinates at least `1/2` the result is sandwiched
    /// between `μ ∗ δ_{-2·step·u}` and `μ ∗ δ_{+2·step·u}` in the orthant order
    /// (see [`crate::stochorder::verify_coarsening`]).
    pub fn coarsen(&self, u: &Point, step: &Rational) -> Result<Measure> {
        u.check_dim(self.dim)?;
        if !step.is_positive() {
            return Err(Error::NonPositiveStep(Box::new(step.clone())));
        }
        let atoms = self.atoms.iter().map(|(x, w)| {
            let floored = x.coords().iter().map(|c| rational::floor_to(c, step)).collect::<Vec<_>>();
            (Point::new(floored), w.clone())
        });
        Measure::new(self.dim, atoms)
    }

    /// Smallest and largest atom of a one-dimensional measure.
    pub fn scalar_range(&self) -> Option<(Rational, Rational)> {
        if self.dim != 1 {
            return None;
        }
        let lo = self.atoms.keys().next()?.coords()[0].clone();
        let hi = self.atoms.keys().next_back()?.coords()[0].clone();
        Some((lo, hi))
    }

    /// `(position, weight)` pairs of a one-dimensional measure in increasing order.
    pub fn scalar_atoms(&self) -> Vec<(Rational, Rational)> {
        debug_assert_eq!(self.dim, 1);
        self.atoms.iter().map(|(x, w)| (x.coords()[0].clone(), w.clone())).collect()
    }
}
