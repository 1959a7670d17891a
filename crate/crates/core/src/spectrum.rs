//! The test spectrum and the normalized cumulant-generating function.
//!
//! A spectrum point is a normalized dual direction `t` (`⟨t, u⟩ = 1`) with a
//! radial coordinate `r ∈ [−∞, +∞]`. On the projection `Z = ⟨t, X⟩`:
//!
//! ```text
//! lev(r) = log E[exp(r Z)] / r    r finite, nonzero
//! lev(0) = E[Z]                   arctic
//! lev(+∞) = max Z,  lev(−∞) = min Z
//! ```
//!
//! `lev` is a nondecreasing weighted average of `Z`. Dominance `X ≤ Y`
//! forces `lev_X ≤ lev_Y` everywhere, and a strict inequality everywhere is
//! sufficient for dominance of large convolution powers.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_traits::{Signed, Zero};

use crate::cone::{Cone, Direction};
use crate::error::Result;
use crate::measure::Measure;
use crate::par;
use crate::rational::{self, Rational};

/// Radial coordinate on the compactified line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radial {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Radial {
    pub fn from_theta(theta: f64) -> Radial {
        if theta <= -FRAC_PI_2 {
            Radial::NegInf
        } else if theta >= FRAC_PI_2 {
            Radial::PosInf
        } else if theta == 0.0 {
            Radial::Finite(0.0)
        } else {
            Radial::Finite(libm::tan(theta))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Radial::NegInf => f64::NEG_INFINITY,
            Radial::Finite(r) => r,
            Radial::PosInf => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub direction: Direction,
    pub radial: Radial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumOptions {
    pub grid_points: usize,
    pub refine_tol: f64,
    pub margin_tol: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { grid_points: 257, refine_tol: 1e-12, margin_tol: 1e-9, n_samples: 64, seed: 0 }
    }
}

/// A one-dimensional probability measure prepared for float evaluation, with
/// its exact extremes and mean kept alongside.
#[derive(Clone, Debug)]
pub struct Projected {
    pub min: Rational,
    pub max: Rational,
    pub mean: Rational,
    top_weight: Rational,
    z: Vec<f64>,
    w: Vec<f64>,
    lo: f64,
    hi: f64,
    mid: f64,
}

impl Projected {
    /// Projects a probability measure onto the normalized direction.
    pub fn new(mu: &Measure, direction: &Direction) -> Result<Projected> {
        mu.require_probability()?;
        let t = direction.normalized().t;
        Ok(Projected::from_scalar(&mu.project(&t)?))
    }

    /// `mu` must be one-dimensional with unit mass.
    pub fn from_scalar(mu: &Measure) -> Projected {
        let atoms = mu.scalar_atoms();
        let min = atoms.first().map(|a| a.0.clone()).unwrap_or_else(Rational::zero);
        let max = atoms.last().map(|a| a.0.clone()).unwrap_or_else(Rational::zero);
        let mean = atoms.iter().fold(Rational::zero(), |acc, (x, w)| acc + x * w);
        let top_weight = atoms.last().map(|a| a.1.clone()).unwrap_or_else(Rational::zero);
        let z: Vec<f64> = atoms.iter().map(|a| rational::to_f64(&a.0)).collect();
        let w: Vec<f64> = atoms.iter().map(|a| rational::to_f64(&a.1)).collect();
        Projected {
            lo: rational::to_f64(&min),
            hi: rational::to_f64(&max),
            mid: rational::to_f64(&mean),
            min,
            max,
            mean,
            top_weight,
            z,
            w,
        }
    }

    /// Exact weight of the largest atom.
    pub fn top_weight(&self) -> Rational {
        self.top_weight.clone()
    }

    /// Mean of the exponentially tilted law `∝ w·exp(s z)`.
    pub fn tilted_mean(&self, s: f64) -> f64 {
        let pivot = if s >= 0.0 { self.hi } else { self.lo };
        let (mut num, mut den) = (0.0, 0.0);
        for (z, w) in self.z.iter().zip(&self.w) {
            let e = w * libm::exp(s * (z - pivot));
            num += e * z;
            den += e;
        }
        num / den
    }

    /// `log E[exp(r Z)]`, evaluated without overflow.
    pub fn log_mgf(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        if libm::fabs(r) * (self.hi - self.lo) <= 1.0 {
            let s: f64 = self.z.iter().zip(&self.w).map(|(z, w)| w * libm::expm1(r * (z - self.mid))).sum();
            return r * self.mid + libm::log1p(s);
        }
        let pivot = if r > 0.0 { self.hi } else { self.lo };
        let s: f64 = self.z.iter().zip(&self.w).map(|(z, w)| w * libm::exp(r * (z - pivot))).sum();
        r * pivot + libm::log(s)
    }

    /// Normalized cumulant-generating function at radial coordinate `r`.
    pub fn lev(&self, r: Radial) -> f64 {
        match r {
            Radial::NegInf => self.lo,
            Radial::PosInf => self.hi,
            Radial::Finite(0.0) => self.mid,
            Radial::Finite(r) => {
                if libm::fabs(r) * (self.hi - self.lo) <= 1.0 {
                    let s: f64 = self.z.iter().zip(&self.w).map(|(z, w)| w * libm::expm1(r * (z - self.mid))).sum();
                    self.mid + libm::log1p(s) / r
                } else {
                    let pivot = if r > 0.0 { self.hi } else { self.lo };
                    let s: f64 = self.z.iter().zip(&self.w).map(|(z, w)| w * libm::exp(r * (z - pivot))).sum();
                    pivot + libm::log(s) / r
                }
            }
        }
    }
}

/// Logarithmic evaluation of a probability measure at a spectrum point.
pub fn lev(mu: &Measure, sp: &SpectrumPoint) -> Result<f64> {
    Ok(Projected::new(mu, &sp.direction)?.lev(sp.radial))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayVerdict {
    StrictOnRay,
    TieOnRay,
    ViolatedOnRay,
    InconclusiveOnRay,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub theta: f64,
    pub radial: Radial,
    pub lev_x: f64,
    pub lev_y: f64,
}

impl Sample {
    pub fn margin(&self) -> f64 {
        self.lev_y - self.lev_x
    }
}

/// Exact margins `lev_Y − lev_X` at the three exceptional points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointMargins {
    pub min_tropical: Rational,
    pub arctic: Rational,
    pub max_tropical: Rational,
}

impl EndpointMargins {
    fn iter(&self) -> [(Radial, &Rational); 3] {
        [
            (Radial::NegInf, &self.min_tropical),
            (Radial::Finite(0.0), &self.arctic),
            (Radial::PosInf, &self.max_tropical),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayComparison {
    pub direction: Direction,
    pub min_margin: f64,
    pub argmin_radial: Radial,
    pub verdict: RayVerdict,
    /// For violated rays: the most negative exceptional point when one is
    /// negative (an exact certificate), otherwise the interior argmin.
    pub witness: Option<Radial>,
    pub exact: EndpointMargins,
    /// Grid samples in increasing `theta`, the exceptional points included.
    pub samples: Vec<Sample>,
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Compares `lev_X` and `lev_Y` along one dual direction over all radial scales.
pub fn compare_on_ray(
    x: &Measure,
    y: &Measure,
    direction: &Direction,
    opts: &SpectrumOptions,
) -> Result<RayComparison> {
    let px = Projected::new(x, direction)?;
    let py = Projected::new(y, direction)?;
    Ok(compare_projected(&px, &py, direction.normalized(), opts))
}

fn compare_projected(px: &Projected, py: &Projected, direction: Direction, opts: &SpectrumOptions) -> RayComparison {
    let exact = EndpointMargins {
        min_tropical: &py.min - &px.min,
        arctic: &py.mean - &px.mean,
        max_tropical: &py.max - &px.max,
    };
    let margin_at = |theta: f64| {
        let r = Radial::from_theta(theta);
        py.lev(r) - px.lev(r)
    };
    let n = opts.grid_points;
    let step = core::f64::consts::PI / (n + 1) as f64;
    let mut samples = Vec::with_capacity(n + 2);
    let push = |samples: &mut Vec<Sample>, theta: f64, radial: Radial| {
        samples.push(Sample { theta, radial, lev_x: px.lev(radial), lev_y: py.lev(radial) });
    };
    push(&mut samples, -FRAC_PI_2, Radial::NegInf);
    for k in 0..n {
        let theta = if 2 * (k + 1) == n + 1 { 0.0 } else { -FRAC_PI_2 + step * (k + 1) as f64 };
        push(&mut samples, theta, Radial::from_theta(theta));
    }
    push(&mut samples, FRAC_PI_2, Radial::PosInf);

    // Exceptional points first so that exact ties win the argmin.
    let mut min_margin = f64::INFINITY;
    let mut argmin = Radial::Finite(0.0);
    for (r, m) in exact.iter() {
        let m = rational::to_f64(m);
        if m < min_margin {
            min_margin = m;
            argmin = r;
        }
    }
    let mut interior_min = f64::INFINITY;
    let mut consider = |m: f64, r: Radial, interior_min: &mut f64| {
        if m < *interior_min {
            *interior_min = m;
        }
        if m < min_margin {
            min_margin = m;
            argmin = r;
        }
    };
    let margins: Vec<f64> = samples.iter().map(Sample::margin).collect();
    for k in 1..samples.len() - 1 {
        let s = &samples[k];
        if s.theta == 0.0 {
            continue;
        }
        consider(margins[k], s.radial, &mut interior_min);
        if margins[k] <= margins[k - 1] && margins[k] <= margins[k + 1] {
            let lo = samples[k - 1].theta.max(-FRAC_PI_2 + opts.refine_tol);
            let hi = samples[k + 1].theta.min(FRAC_PI_2 - opts.refine_tol);
            let (theta, m) = golden_min(margin_at, lo, hi, opts.refine_tol);
            let r = Radial::from_theta(theta);
            if theta != 0.0 && matches!(r, Radial::Finite(_)) {
                consider(m, r, &mut interior_min);
            }
        }
    }

    let tol = opts.margin_tol;
    let exact_negative = exact.iter().iter().any(|(_, m)| m.is_negative());
    let exact_tie = exact.iter().iter().any(|(_, m)| m.is_zero());
    let verdict = if exact_negative || interior_min < -tol {
        RayVerdict::ViolatedOnRay
    } else if !exact_tie && interior_min > tol {
        RayVerdict::StrictOnRay
    } else if exact_tie && interior_min >= -tol {
        RayVerdict::TieOnRay
    } else {
        RayVerdict::InconclusiveOnRay
    };
    let witness = (verdict == RayVerdict::ViolatedOnRay).then(|| {
        exact.iter().into_iter().filter(|(_, m)| m.is_negative()).min_by(|a, b| a.1.cmp(b.1)).map_or(argmin, |(r, _)| r)
    });
    RayComparison { direction, min_margin, argmin_radial: argmin, verdict, witness, exact, samples }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralVerdict {
    Strict,
    NonStrictOnly,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub verdict: SpectralVerdict,
    pub rays: Vec<RayComparison>,
    /// Witness points of violated rays, in ray order.
    pub witnesses: Vec<SpectrumPoint>,
    /// The dual cone has several extreme rays, so only the listed rays were examined.
    pub sampled_only: bool,
    pub seed: u64,
}

/// Runs [`compare_on_ray`] over the seeded dual directions of `cone`.
pub fn spectral_verdict(x: &Measure, y: &Measure, cone: &Cone, opts: &SpectrumOptions) -> Result<SpectralReport> {
    x.require_probability()?;
    y.require_probability()?;
    let directions = cone.dual_directions(opts.n_samples, opts.seed);
    let rays: Vec<RayComparison> =
        par::map(directions, |d| compare_on_ray(x, y, &d, opts)).into_iter().collect::<Result<_>>()?;
    Ok(assemble(rays, cone.normals().len() > 1, opts.seed))
}

fn assemble(rays: Vec<RayComparison>, sampled_only: bool, seed: u64) -> SpectralReport {
    let witnesses: Vec<SpectrumPoint> = rays
        .iter()
        .filter_map(|r| r.witness.map(|radial| SpectrumPoint { direction: r.direction.clone(), radial }))
        .collect();
    let has = |v: RayVerdict| rays.iter().any(|r| r.verdict == v);
    let verdict = if !witnesses.is_empty() {
        SpectralVerdict::Violated
    } else if has(RayVerdict::InconclusiveOnRay) {
        SpectralVerdict::Inconclusive
    } else if has(RayVerdict::TieOnRay) {
        SpectralVerdict::NonStrictOnly
    } else {
        SpectralVerdict::Strict
    };
    SpectralReport { verdict, rays, witnesses, sampled_only, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;
    use crate::rational::{int, ratio};

    fn m1(atoms: &[(Rational, Rational)]) -> Measure {
        Measure::from_scalars(atoms.iter().cloned()).unwrap()
    }

    fn coin() -> Measure {
        m1(&[(int(0), ratio(1, 2)), (int(1), ratio(1, 2))])
    }

    fn at(r: Radial) -> SpectrumPoint {
        SpectrumPoint { direction: Direction::unit_1d(), radial: r }
    }

    #[test]
    fn lev_of_delta_is_constant() {
        let d = Measure::delta(Point::scalar(ratio(7, 3)));
        for r in [Radial::NegInf, Radial::Finite(-3.0), Radial::Finite(0.0), Radial::Finite(1e-9), Radial::PosInf] {
            assert!((lev(&d, &at(r)).unwrap() - 7.0 / 3.0).abs() < 1e-12);
        }
        let k = Cone::orthant(2).unwrap();
        let d2 = Measure::delta(Point::from_ints(&[1, 3]));
        let dir = Direction::new(&k, Point::from_ints(&[1, 3])).unwrap();
        let expect = 10.0 / 4.0;
        let v = lev(&d2, &SpectrumPoint { direction: dir, radial: Radial::Finite(2.5) }).unwrap();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn lev_coin_values() {
        let c = coin();
        assert_eq!(lev(&c, &at(Radial::Finite(0.0))).unwrap(), 0.5);
        assert_eq!(lev(&c, &at(Radial::PosInf)).unwrap(), 1.0);
        assert_eq!(lev(&c, &at(Radial::NegInf)).unwrap(), 0.0);
        let direct = libm::log((1.0 + core::f64::consts::E) / 2.0);
        assert!((lev(&c, &at(Radial::Finite(1.0))).unwrap() - direct).abs() < 1e-12);
        assert!((direct - 0.620115).abs() < 1e-6);
    }

    #[test]
    fn lev_rejects_unnormalized() {
        let heavy = m1(&[(int(0), int(2))]);
        assert!(lev(&heavy, &at(Radial::Finite(1.0))).is_err());
    }

    #[test]
    fn ray_examples() {
        let opts = SpectrumOptions::default();
        let d0 = Measure::delta(Point::from_ints(&[0]));
        let d1 = Measure::delta(Point::from_ints(&[1]));
        let c = compare_on_ray(&d0, &d1, &Direction::unit_1d(), &opts).unwrap();
        assert_eq!(c.verdict, RayVerdict::StrictOnRay);
        assert!((c.min_margin - 1.0).abs() < 1e-12);

        let c = compare_on_ray(&coin(), &coin(), &Direction::unit_1d(), &opts).unwrap();
        assert_eq!(c.verdict, RayVerdict::TieOnRay);
        assert_eq!(c.min_margin, 0.0);
        assert!(c.samples.iter().all(|s| s.margin() == 0.0));

        let half = Measure::delta(Point::scalar(ratio(1, 2)));
        let c = compare_on_ray(&coin(), &half, &Direction::unit_1d(), &opts).unwrap();
        assert_eq!(c.verdict, RayVerdict::ViolatedOnRay);
        assert_eq!(c.argmin_radial, Radial::PosInf);
        assert_eq!(c.witness, Some(Radial::PosInf));
        assert_eq!(c.exact.max_tropical, ratio(-1, 2));
    }

    #[test]
    fn report_examples() {
        let opts = SpectrumOptions::default();
        let h = Cone::halfline();
        let d0 = Measure::delta(Point::from_ints(&[0]));
        let d1 = Measure::delta(Point::from_ints(&[1]));
        let rep = spectral_verdict(&d0, &d1, &h, &opts).unwrap();
        assert_eq!(rep.verdict, SpectralVerdict::Strict);
        assert!(!rep.sampled_only);

        let x = m1(&[(int(0), ratio(1, 4)), (int(1), ratio(3, 4))]);
        let rep = spectral_verdict(&x, &coin(), &h, &opts).unwrap();
        assert_eq!(rep.verdict, SpectralVerdict::Violated);
        assert_eq!(rep.witnesses[0].radial, Radial::Finite(0.0));
        assert_eq!(rep.rays[0].exact.arctic, ratio(-1, 4));
    }

    #[test]
    fn curated_strict_pair_against_dense_sweep() {
        let x = m1(&[(ratio(2, 5), ratio(1, 10)), (ratio(3, 5), ratio(9, 10))]);
        let y = m1(&[(ratio(1, 2), ratio(1, 2)), (ratio(4, 5), ratio(1, 2))]);
        // Oracle: direct defining sums on 10^5 points of the compactified line.
        let lev_direct = |atoms: &[(f64, f64)], r: f64| {
            let s: f64 = atoms.iter().map(|(z, w)| w * libm::exp(r * z)).sum();
            libm::log(s) / r
        };
        let ax = [(0.4, 0.1), (0.6, 0.9)];
        let ay = [(0.5, 0.5), (0.8, 0.5)];
        let n = 100_000;
        let mut dense_min = f64::INFINITY;
        for k in 0..n {
            let theta = -FRAC_PI_2 + core::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let r = libm::tan(theta);
            if libm::fabs(r) < 1e-6 || libm::fabs(r) > 500.0 {
                continue;
            }
            dense_min = dense_min.min(lev_direct(&ay, r) - lev_direct(&ax, r));
        }
        assert!(dense_min > 0.0);
        let rep = spectral_verdict(&x, &y, &Cone::halfline(), &SpectrumOptions::default()).unwrap();
        assert_eq!(rep.verdict, SpectralVerdict::Strict);
        let ray = &rep.rays[0];
        assert_eq!(ray.exact.min_tropical, ratio(1, 10));
        assert_eq!(ray.exact.arctic, ratio(7, 100));
        assert_eq!(ray.exact.max_tropical, ratio(1, 5));
        assert!(ray.min_margin > 0.0 && ray.min_margin <= dense_min + 1e-9);
    }
}
