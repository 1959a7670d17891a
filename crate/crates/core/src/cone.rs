//! Polyhedral positive cones on `R^d` with a designated order unit.
//!
//! A cone is carried in both representations: generating rays and the
//! inequality normals (`x ∈ K ⇔ ⟨n_i, x⟩ ≥ 0` for all `i`). The normals double
//! as the extreme rays of the dual cone, which is what the spectral sweeps
//! iterate over.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rational::{self, Rational};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    rays: Vec<Point>,
    normals: Vec<Point>,
    unit: Point,
}

/// A nonzero element `t` of the dual cone together with `⟨t, u⟩`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Direction {
    pub t: Point,
    pub normalization: Rational,
}

impl Direction {
    /// Checks dual membership and positivity of `⟨t, u⟩`.
    pub fn new(cone: &Cone, t: Point) -> Result<Self> {
        t.check_dim(cone.dim)?;
        if t.is_zero() {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        if cone.rays.iter().any(|r| t.dot(r).is_negative()) {
            return Err(Error::InvalidArgument(format!("{t} is not in the dual cone")));
        }
        let normalization = t.dot(&cone.unit);
        if !normalization.is_positive() {
            return Err(Error::InvalidArgument(format!("⟨{t}, u⟩ must be positive")));
        }
        Ok(Direction { t, normalization })
    }

    /// Rescaled so that `⟨t, u⟩ = 1`.
    pub fn normalized(&self) -> Direction {
        let inv = Rational::one() / &self.normalization;
        Direction { t: self.t.scale(&inv), normalization: Rational::one() }
    }

    /// The unique direction of the half-line cone.
    pub fn unit_1d() -> Direction {
        Direction { t: Point::from_ints(&[1]), normalization: Rational::one() }
    }
}

impl Cone {
    /// `R_+ ⊂ R` with order unit `1`.
    pub fn halfline() -> Cone {
        let one = Point::from_ints(&[1]);
        Cone { dim: 1, rays: alloc::vec![one.clone()], normals: alloc::vec![one.clone()], unit: one }
    }

    /// `R^d_+` with order unit `(1, …, 1)`.
    pub fn orthant(dim: usize) -> Result<Cone> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let basis: Vec<Point> =
            (0..dim).map(|i| Point::new((0..dim).map(|j| rational::int((i == j) as i64)).collect())).collect();
        let unit = Point::new((0..dim).map(|_| Rational::one()).collect());
        Ok(Cone { dim, rays: basis.clone(), normals: basis, unit })
    }

    /// Cross-validates both representations and the order unit.
    pub fn from_parts(rays: Vec<Point>, normals: Vec<Point>, unit: Point) -> Result<Cone> {
        let dim = unit.dim();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if rays.is_empty() || normals.is_empty() {
            return Err(Error::InvalidCone("rays and normals must be nonempty".into()));
        }
        for p in rays.iter().chain(&normals) {
            p.check_dim(dim)?;
            if p.is_zero() {
                return Err(Error::InvalidCone("zero ray or normal".into()));
            }
        }
        for n in &normals {
            for r in &rays {
                if n.dot(r).is_negative() {
                    return Err(Error::InvalidCone(format!("ray {r} violates normal {n}")));
                }
            }
            let tight: Vec<Point> = rays.iter().filter(|r| n.dot(r).is_zero()).cloned().collect();
            if rank(&tight) + 1 < dim {
                return Err(Error::InvalidCone(format!("normal {n} does not define a facet of the ray cone")));
            }
        }
        let cone = Cone { dim, rays, normals, unit };
        if !cone.is_order_unit(&cone.unit)? {
            return Err(Error::InvalidCone(format!("{} is not an order unit", cone.unit)));
        }
        Ok(cone)
    }

    /// Builds the normals from generating rays (dimension at most 3).
    pub fn from_rays(rays: Vec<Point>, unit: Point) -> Result<Cone> {
        let normals = dual_extreme_rays(&rays, unit.dim())?;
        Cone::from_parts(rays, normals, unit)
    }

    /// Builds the generating rays from inequality normals (dimension at most 3).
    pub fn from_normals(normals: Vec<Point>, unit: Point) -> Result<Cone> {
        let rays = dual_extreme_rays(&normals, unit.dim())?;
        Cone::from_parts(rays, normals, unit)
    }

    /// Same cone, different order unit.
    pub fn with_unit(&self, unit: Point) -> Result<Cone> {
        Cone::from_parts(self.rays.clone(), self.normals.clone(), unit)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn unit(&self) -> &Point {
        &self.unit
    }

    /// True for a one-dimensional cone ordering `R` the usual way.
    pub fn is_standard_halfline(&self) -> bool {
        self.dim == 1 && self.normals.iter().all(|n| n.coords()[0].is_positive())
    }

    /// Membership `x ∈ K`.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        x.check_dim(self.dim)?;
        Ok(self.normals.iter().all(|n| !n.dot(x).is_negative()))
    }

    /// `x ≤ y`, i.e. `y − x ∈ K`.
    pub fn leq_point(&self, x: &Point, y: &Point) -> Result<bool> {
        x.check_dim(self.dim)?;
        y.check_dim(self.dim)?;
        Ok(self.leq_unchecked(x, y))
    }

    pub(crate) fn leq_unchecked(&self, x: &Point, y: &Point) -> bool {
        self.normals.iter().all(|n| !(n.dot(y) - n.dot(x)).is_negative())
    }

    /// Interior points of a full-dimensional cone are exactly its order units.
    pub fn is_order_unit(&self, u: &Point) -> Result<bool> {
        u.check_dim(self.dim)?;
        Ok(rank(&self.rays) == self.dim && self.normals.iter().all(|n| n.dot(u).is_positive()))
    }

    /// Smallest `k ≥ 0` with `−k·u ≤ x ≤ k·u` for every given point.
    pub fn bounding_k(&self, points: &[Point]) -> Result<u64> {
        let mut best = Rational::zero();
        for x in points {
            x.check_dim(self.dim)?;
            for n in &self.normals {
                let ratio = n.dot(x).abs() / n.dot(&self.unit);
                if ratio > best {
                    best = ratio;
                }
            }
        }
        rational::ceil_int(&best)
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("bounding multiple overflows u64".into()))
    }

    /// Deterministic set of normalized dual directions: every dual extreme
    /// ray, every pairwise midpoint, then `n_samples` seeded convex
    /// combinations. Duplicates are dropped, first occurrence wins.
    pub fn dual_directions(&self, n_samples: usize, seed: u64) -> Vec<Direction> {
        let base: Vec<Point> = self.normals.iter().map(|n| n.scale(&(Rational::one() / n.dot(&self.unit)))).collect();
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut push = |t: Point| {
            if seen.insert(t.clone()) {
                out.push(Direction { t, normalization: Rational::one() });
            }
        };
        for t in &base {
            push(t.clone());
        }
        let half = rational::ratio(1, 2);
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                push(base[i].add(&base[j]).scale(&half));
            }
        }
        let mut rng = SplitMix64::new(seed);
        for _ in 0..n_samples {
            let weights: Vec<Rational> =
                base.iter().map(|_| rational::int((rng.next_u64() >> 44) as i64 + 1)).collect();
            let total: Rational = weights.iter().fold(Rational::zero(), |a, w| a + w);
            let mut t = Point::zero(self.dim);
            for (w, b) in weights.iter().zip(&base) {
                t = t.add(&b.scale(&(w / &total)));
            }
            push(t);
        }
        out
    }
}

/// Rank of a list of rational vectors (Gaussian elimination).
pub fn rank(vectors: &[Point]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|p| p.coords().to_vec()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot_row[c];
            for (k, v) in row.iter_mut().enumerate().skip(c) {
                *v -= &f * &pivot_row[k];
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Scales a nonzero rational vector to the primitive integer vector on its ray.
pub fn primitive(p: &Point) -> Point {
    let lcm = p.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coords().iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return p.clone();
    }
    Point::new(ints.into_iter().map(|v| Rational::from_integer(v / &g)).collect())
}

/// Extreme rays of `{n : ⟨n, g⟩ ≥ 0 for all generators g}` for `d ≤ 3`.
fn dual_extreme_rays(generators: &[Point], dim: usize) -> Result<Vec<Point>> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if dim > 3 {
        return Err(Error::InvalidCone(format!(
            "automatic conversion only supports dimension <= 3 (got {dim}); supply both rays and normals"
        )));
    }
    for g in generators {
        g.check_dim(dim)?;
    }
    let mut candidates: Vec<Point> = Vec::new();
    match dim {
        1 => {
            candidates.push(Point::from_ints(&[1]));
            candidates.push(Point::from_ints(&[-1]));
        }
        2 => {
            for g in generators {
                let c = g.coords();
                let perp = Point::new(alloc::vec![-c[1].clone(), c[0].clone()]);
                candidates.push(perp.neg());
                candidates.push(perp);
            }
        }
        _ => {
            for (i, a) in generators.iter().enumerate() {
                for b in &generators[i + 1..] {
                    let cross = cross3(a, b);
                    candidates.push(cross.neg());
                    candidates.push(cross);
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in candidates {
        if c.is_zero() || generators.iter().any(|g| c.dot(g).is_negative()) {
            continue;
        }
        let p = primitive(&c);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidCone("dual cone is trivial: the cone has no interior".into()));
    }
    Ok(out)
}

fn cross3(a: &Point, b: &Point) -> Point {
    let (a, b) = (a.coords(), b.coords());
    Point::new(
        alloc::vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0],],
    )
}
