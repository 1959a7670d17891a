//! Large-deviation quantities: the log-MGF, the rate function `Λ*`, both
//! sides of the relative decay-rate identity, and the empirical Cramér check.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_traits::{One, Signed, Zero};

use crate::cone::{Cone, Direction};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::par;
use crate::point::Point;
use crate::rational::{self, Rational};
use crate::solvers::{lp_feasible, LinearFeasibility, LpOutcome};
use crate::spectrum::{Projected, SpectrumOptions};
use crate::stochorder::{tail, upset_mass};

/// How much of a [`RateResult`] is guaranteed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Closed form decided in exact arithmetic (`0` or `+∞`).
    Exact,
    /// Supremum approached as the radial scale tends to infinity; the value
    /// is the exact limit.
    ExactLimit,
    /// One-dimensional root of the tilted-mean equation by bisection.
    Bisection,
    /// Float grid search with local refinement; global optimality not proven.
    GridRefined,
    /// Supremum over a subfamily of upsets.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    pub value: f64,
    /// Normalized direction and radial scale of the optimizer, when attained.
    pub maximizer: Option<(Direction, f64)>,
    pub certified: Certification,
}

/// `log E[exp⟨t, X⟩]`.
pub fn log_mgf(mu: &Measure, t: &Point) -> Result<f64> {
    mu.require_probability()?;
    Ok(Projected::from_scalar(&mu.project(t)?).log_mgf(1.0))
}

struct FloatMeasure {
    xs: Vec<Vec<f64>>,
    ws: Vec<f64>,
}

impl FloatMeasure {
    fn new(mu: &Measure) -> Self {
        FloatMeasure {
            xs: mu.support().map(Point::to_f64).collect(),
            ws: mu.iter().map(|(_, w)| rational::to_f64(w)).collect(),
        }
    }

    /// `(log E[exp⟨t, X⟩], tilted mean)`.
    fn log_mgf_and_tilt(&self, t: &[f64]) -> (f64, Vec<f64>) {
        let dots: Vec<f64> = self.xs.iter().map(|x| x.iter().zip(t).map(|(a, b)| a * b).sum()).collect();
        let top = dots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let es: Vec<f64> = dots.iter().zip(&self.ws).map(|(d, w)| w * libm::exp(d - top)).collect();
        let total: f64 = es.iter().sum();
        let mut mean = alloc::vec![0.0; t.len()];
        for (x, e) in self.xs.iter().zip(&es) {
            for (m, xi) in mean.iter_mut().zip(x) {
                *m += e * xi / total;
            }
        }
        (top + libm::log(total), mean)
    }
}

/// One-dimensional Legendre transform `sup_{s ≥ 0} (s·c − Λ(s))` of a
/// projected measure, exact at the boundary cases.
fn rate_scalar(p: &Projected, c: &Rational, direction: Direction) -> RateResult {
    if *c > p.max {
        return RateResult { value: f64::INFINITY, maximizer: None, certified: Certification::Exact };
    }
    if *c <= p.mean {
        return RateResult { value: 0.0, maximizer: Some((direction, 0.0)), certified: Certification::Exact };
    }
    if *c == p.max {
        return RateResult { value: -top_log_weight(p), maximizer: None, certified: Certification::ExactLimit };
    }
    let cf = rational::to_f64(c);
    // Λ'(s) is the tilted mean, strictly increasing from E[Z] to max Z.
    let mean_at = |s: f64| p.tilted_mean(s);
    let mut hi: f64 = 1.0;
    while mean_at(hi) < cf && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < cf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    RateResult {
        value: (s * cf - p.log_mgf(s)).max(0.0),
        maximizer: Some((direction, s)),
        certified: Certification::Bisection,
    }
}

fn top_log_weight(p: &Projected) -> f64 {
    rational::ln(&p.top_weight())
}

/// `Λ*(c) = sup_{t ∈ K*} (⟨t, c⟩ − log E[exp⟨t, X⟩])`.
pub fn rate_function(mu: &Measure, c: &Point, cone: &Cone) -> Result<RateResult> {
    mu.require_probability()?;
    c.check_dim(mu.dim())?;
    if mu.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: mu.dim() });
    }
    if cone.dim() == 1 {
        let direction = Direction::new(cone, cone.normals()[0].clone())?.normalized();
        let p = Projected::new(mu, &direction)?;
        let cc = direction.t.dot(c);
        return Ok(rate_scalar(&p, &cc, direction));
    }
    if !dominated_by_hull(mu, c, cone)? {
        return Ok(RateResult { value: f64::INFINITY, maximizer: None, certified: Certification::Exact });
    }
    let mean = mu.mean().unwrap_or_else(|| Point::zero(mu.dim()));
    if cone.leq_point(c, &mean)? {
        let d = Direction::new(cone, cone.normals()[0].clone())?.normalized();
        return Ok(RateResult { value: 0.0, maximizer: Some((d, 0.0)), certified: Certification::Exact });
    }
    Ok(rate_by_ascent(mu, c, cone))
}

/// Some point of the convex hull of the support dominates `c`. Otherwise a
/// dual direction separates and `Λ*(c) = +∞`.
fn dominated_by_hull(mu: &Measure, c: &Point, cone: &Cone) -> Result<bool> {
    let xs: Vec<&Point> = mu.support().collect();
    let mut lp = LinearFeasibility::new(xs.len());
    lp.add_eq(alloc::vec![Rational::one(); xs.len()], Rational::one());
    for n in cone.normals() {
        lp.add_leq(xs.iter().map(|x| -n.dot(x)).collect(), -n.dot(c));
    }
    Ok(matches!(lp_feasible(&lp)?, LpOutcome::Feasible(_)))
}

/// Projected gradient ascent over non-negative combinations of the dual
/// extreme rays, multi-started from the origin and from each ray.
fn rate_by_ascent(mu: &Measure, c: &Point, cone: &Cone) -> RateResult {
    let fm = FloatMeasure::new(mu);
    let normals: Vec<Vec<f64>> = cone.normals().iter().map(Point::to_f64).collect();
    let cf = c.to_f64();
    let dim = cone.dim();
    let to_t = |a: &[f64]| -> Vec<f64> {
        let mut t = alloc::vec![0.0; dim];
        for (ai, n) in a.iter().zip(&normals) {
            for (ti, ni) in t.iter_mut().zip(n) {
                *ti += ai * ni;
            }
        }
        t
    };
    let objective = |a: &[f64]| -> (f64, Vec<f64>) {
        let t = to_t(a);
        let (lm, tilt) = fm.log_mgf_and_tilt(&t);
        let value = t.iter().zip(&cf).map(|(x, y)| x * y).sum::<f64>() - lm;
        let gap: Vec<f64> = cf.iter().zip(&tilt).map(|(x, y)| x - y).collect();
        let grad = normals.iter().map(|n| n.iter().zip(&gap).map(|(a, b)| a * b).sum()).collect();
        (value, grad)
    };
    let m = normals.len();
    let mut starts: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; m]];
    for i in 0..m {
        let mut a = alloc::vec![0.0; m];
        a[i] = 1.0;
        starts.push(a);
    }
    let mut best = (0.0, alloc::vec![0.0; m]);
    for mut a in starts {
        let (mut value, mut grad) = objective(&a);
        let mut step = 1.0;
        for _ in 0..5000 {
            let candidate: Vec<f64> = a.iter().zip(&grad).map(|(x, g)| (x + step * g).max(0.0)).collect();
            let (cv, cg) = objective(&candidate);
            if cv > value {
                let gain = cv - value;
                a = candidate;
                value = cv;
                grad = cg;
                step *= 1.5;
                if gain < 1e-15 {
                    break;
                }
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        if value > best.0 {
            best = (value, a);
        }
    }
    let t = to_t(&best.1);
    let maximizer = direction_from_float(cone, &t);
    RateResult { value: best.0.max(0.0), maximizer, certified: Certification::GridRefined }
}

fn direction_from_float(cone: &Cone, t: &[f64]) -> Option<(Direction, f64)> {
    let scale: f64 = t.iter().zip(cone.unit().to_f64()).map(|(a, b)| a * b).sum();
    if scale <= 0.0 {
        return None;
    }
    // Rationalize to 2^-40 resolution; the maximizer is informational.
    let coords: Vec<Rational> =
        t.iter().map(|v| rational::ratio(libm::round(v / scale * (1u64 << 40) as f64) as i64, 1 << 40)).collect();
    let d = Direction::new(cone, Point::new(coords)).ok()?;
    Some((d.normalized(), scale))
}

/// `sup_{t ∈ K*} log(E[exp⟨t, X⟩] / E[exp⟨t, Y⟩])`, searched over the seeded
/// dual directions and all radial scales `r ≥ 0`.
pub fn relative_rate_rhs(x: &Measure, y: &Measure, cone: &Cone, opts: &SpectrumOptions) -> Result<RateResult> {
    x.require_probability()?;
    y.require_probability()?;
    let directions = cone.dual_directions(opts.n_samples, opts.seed);
    let per_ray: Vec<Result<RateResult>> = par::map(directions, |d| {
        let px = Projected::new(x, &d)?;
        let py = Projected::new(y, &d)?;
        Ok(rhs_on_ray(&px, &py, d, opts))
    });
    let mut best: Option<RateResult> = None;
    for r in per_ray {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::InvalidCone("no dual directions".into()))
}

fn rhs_on_ray(px: &Projected, py: &Projected, d: Direction, opts: &SpectrumOptions) -> RateResult {
    if px.max > py.max {
        return RateResult {
            value: f64::INFINITY,
            maximizer: Some((d, f64::INFINITY)),
            certified: Certification::Exact,
        };
    }
    let g = |r: f64| px.log_mgf(r) - py.log_mgf(r);
    let n = opts.grid_points.max(2);
    let thetas: Vec<f64> = (0..n).map(|k| FRAC_PI_2 * k as f64 / n as f64).collect();
    let values: Vec<f64> = thetas.iter().map(|&th| g(libm::tan(th))).collect();
    let mut best_r = 0.0;
    let mut best = 0.0;
    for k in 1..n {
        if values[k] > best {
            best = values[k];
            best_r = libm::tan(thetas[k]);
        }
        let next = if k + 1 < n { values[k + 1] } else { f64::NEG_INFINITY };
        if values[k] >= values[k - 1] && values[k] >= next {
            let hi = if k + 1 < n { thetas[k + 1] } else { FRAC_PI_2 - opts.refine_tol };
            let (th, v) = golden_max(|th| g(libm::tan(th)), thetas[k - 1], hi, opts.refine_tol);
            if v > best {
                best = v;
                best_r = libm::tan(th);
            }
        }
    }
    if px.max == py.max {
        let limit = rational::ln(&(px.top_weight() / py.top_weight()));
        // Float roundoff near the limit can overshoot it slightly.
        if limit >= best - 1e-12 {
            return RateResult {
                value: limit,
                maximizer: Some((d, f64::INFINITY)),
                certified: Certification::ExactLimit,
            };
        }
    }
    RateResult { value: best, maximizer: Some((d, best_r)), certified: Certification::GridRefined }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut it = 0;
    while b - a > tol && it < 200 {
        if fc >= fd {
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
        it += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One evaluation of the left-hand side at fixed `(n, ε)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LhsValue {
    pub n: u64,
    pub eps: Rational,
    pub value: f64,
    /// All closed upsets were covered (one dimension); otherwise only
    /// principal upsets, giving a lower bound.
    pub exhaustive: bool,
}

/// `sup_C (1/n) log[ P(X̄_n ∈ C) / P(Ȳ_n + ε u ∈ C) ]` over closed upsets `C`,
/// with `p/0 = +∞` for `p > 0` and `0/0` skipped.
pub fn relative_rate_lhs(
    x: &Measure,
    y: &Measure,
    cone: &Cone,
    n: u64,
    eps: &Rational,
    cap: usize,
) -> Result<LhsValue> {
    x.require_probability()?;
    y.require_probability()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let inv_n = Rational::one() / rational::int(n as i64);
    let xn = x.convolve_power(n, cap)?.dilate(&inv_n)?;
    let yn = y.convolve_power(n, cap)?.dilate(&inv_n)?.shift(&cone.unit().scale(eps))?;

    let mut best: Option<Rational> = None;
    let mut infinite = false;
    let mut consider = |num: Rational, den: Rational| {
        if num.is_zero() {
            return;
        }
        if den.is_zero() {
            infinite = true;
            return;
        }
        let q = num / den;
        if best.as_ref().is_none_or(|b| q > *b) {
            best = Some(q);
        }
    };
    let exhaustive = cone.dim() == 1;
    if exhaustive {
        let d = Direction::new(cone, cone.normals()[0].clone())?.normalized();
        let (px, py) = (xn.project(&d.t)?, yn.project(&d.t)?);
        let mut cs: Vec<Rational> = px.support().chain(py.support()).map(|p| p.coords()[0].clone()).collect();
        cs.sort();
        cs.dedup();
        for c in &cs {
            consider(tail(&px, c), tail(&py, c));
        }
    } else {
        let mut cs: Vec<Point> = xn.support().chain(yn.support()).cloned().collect();
        cs.sort();
        cs.dedup();
        for c in &cs {
            let g = core::slice::from_ref(c);
            consider(upset_mass(&xn, cone, g)?, upset_mass(&yn, cone, g)?);
        }
    }
    let value = if infinite { f64::INFINITY } else { best.map_or(f64::NEG_INFINITY, |q| rational::ln(&q) / n as f64) };
    Ok(LhsValue { n, eps: eps.clone(), value, exhaustive })
}

/// [`relative_rate_lhs`] for every `(n, ε)` pair, `n` major.
pub fn relative_rate_table(
    x: &Measure,
    y: &Measure,
    cone: &Cone,
    ns: &[u64],
    epss: &[Rational],
    cap: usize,
) -> Result<Vec<LhsValue>> {
    let jobs: Vec<(u64, Rational)> = ns.iter().flat_map(|&n| epss.iter().map(move |e| (n, e.clone()))).collect();
    par::map(jobs, |(n, e)| relative_rate_lhs(x, y, cone, n, &e, cap)).into_iter().collect()
}

/// `(1/n) log P(S_n ≥ n·c)` computed from the exact `n`-fold convolution.
pub fn cramer_empirical(mu: &Measure, c: &Point, cone: &Cone, n: u64, cap: usize) -> Result<f64> {
    mu.require_probability()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let sum = mu.convolve_power(n, cap)?;
    let threshold = c.scale(&rational::int(n as i64));
    let p = upset_mass(&sum, cone, core::slice::from_ref(&threshold))?;
    Ok(rational::ln(&p) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DEFAULT_ATOM_CAP;
    use crate::rational::{int, ratio};

    fn m1(atoms: &[(Rational, Rational)]) -> Measure {
        Measure::from_scalars(atoms.iter().cloned()).unwrap()
    }

    fn bern(p: Rational) -> Measure {
        m1(&[(int(0), Rational::one() - &p), (int(1), p)])
    }

    fn bernoulli_rate(c: f64, p: f64) -> f64 {
        c * libm::log(c / p) + (1.0 - c) * libm::log((1.0 - c) / (1.0 - p))
    }

    fn at(v: Rational) -> Point {
        Point::scalar(v)
    }

    #[test]
    fn log_mgf_examples() {
        let d = Measure::delta(Point::scalar(ratio(3, 2)));
        assert!((log_mgf(&d, &Point::scalar(int(2))).unwrap() - 3.0).abs() < 1e-12);
        let c = bern(ratio(1, 2));
        assert_eq!(log_mgf(&c, &Point::scalar(int(0))).unwrap(), 0.0);
        let v = log_mgf(&c, &Point::scalar(int(1))).unwrap();
        assert!((v - libm::log((1.0 + core::f64::consts::E) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn rate_function_examples() {
        let h = Cone::halfline();
        let c = bern(ratio(1, 2));
        let r = rate_function(&c, &at(ratio(1, 2)), &h).unwrap();
        assert_eq!((r.value, r.certified), (0.0, Certification::Exact));
        let r = rate_function(&c, &at(ratio(6, 5)), &h).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        let r = rate_function(&c, &at(ratio(3, 4)), &h).unwrap();
        let closed = libm::log(2.0) + 0.75 * libm::log(0.75) + 0.25 * libm::log(0.25);
        assert!((r.value - closed).abs() < 1e-9, "{} vs {closed}", r.value);
        assert!((closed - 0.130812).abs() < 1e-6);
        let r = rate_function(&c, &at(int(1)), &h).unwrap();
        assert_eq!(r.certified, Certification::ExactLimit);
        assert!((r.value - libm::log(2.0)).abs() < 1e-15);
    }

    #[test]
    fn rate_function_matches_dense_grid_oracle() {
        let mu = m1(&[(int(-1), ratio(1, 5)), (ratio(1, 3), ratio(1, 2)), (int(2), ratio(3, 10))]);
        for c in [ratio(1, 2), int(1), ratio(3, 2), ratio(19, 10)] {
            let r = rate_function(&mu, &at(c.clone()), &Cone::halfline()).unwrap();
            let cf = rational::to_f64(&c);
            // Oracle: brute-force maximization over s ∈ [0, 60] on 10^5 points plus local polish.
            let f =
                |s: f64| s * cf - libm::log(0.2 * libm::exp(-s) + 0.5 * libm::exp(s / 3.0) + 0.3 * libm::exp(2.0 * s));
            let mut best = (0.0, f(0.0));
            for k in 0..=100_000 {
                let s = 60.0 * k as f64 / 100_000.0;
                if f(s) > best.1 {
                    best = (s, f(s));
                }
            }
            let (_, polished) = golden_max(f, (best.0 - 6e-4).max(0.0), best.0 + 6e-4, 1e-13);
            assert!((r.value - polished.max(best.1)).abs() < 1e-7, "c={c}: {} vs {}", r.value, polished);
        }
    }

    #[test]
    fn rate_function_two_dimensional() {
        let k = Cone::orthant(2).unwrap();
        // Independent coordinates: Λ* splits into a sum of one-dimensional rates.
        let mu = Measure::new(
            2,
            [
                (Point::from_ints(&[0, 0]), ratio(1, 4)),
                (Point::from_ints(&[0, 1]), ratio(1, 4)),
                (Point::from_ints(&[1, 0]), ratio(1, 4)),
                (Point::from_ints(&[1, 1]), ratio(1, 4)),
            ],
        )
        .unwrap();
        let c = Point::new(alloc::vec![ratio(3, 4), ratio(3, 5)]);
        let r = rate_function(&mu, &c, &k).unwrap();
        let expect = bernoulli_rate(0.75, 0.5) + bernoulli_rate(0.6, 0.5);
        assert!((r.value - expect).abs() < 1e-6, "{} vs {expect}", r.value);
        let out = Point::new(alloc::vec![ratio(3, 4), ratio(6, 5)]);
        assert_eq!(rate_function(&mu, &out, &k).unwrap().value, f64::INFINITY);
        let low = Point::new(alloc::vec![ratio(1, 4), ratio(1, 2)]);
        assert_eq!(rate_function(&mu, &low, &k).unwrap().value, 0.0);
    }

    #[test]
    fn rhs_examples() {
        let opts = SpectrumOptions::default();
        let h = Cone::halfline();
        let c = bern(ratio(1, 2));
        assert_eq!(relative_rate_rhs(&c, &c, &h, &opts).unwrap().value, 0.0);
        let r = relative_rate_rhs(&bern(ratio(3, 4)), &c, &h, &opts).unwrap();
        assert!((r.value - libm::log(1.5)).abs() < 1e-12);
        assert_eq!(r.certified, Certification::ExactLimit);
        let d2 = Measure::delta(Point::from_ints(&[2]));
        assert_eq!(relative_rate_rhs(&d2, &c, &h, &opts).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn lhs_examples() {
        let h = Cone::halfline();
        let c = bern(ratio(1, 2));
        let v = relative_rate_lhs(&c, &c, &h, 10, &ratio(1, 4), DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.exhaustive);
        let v = relative_rate_lhs(&bern(ratio(3, 4)), &c, &h, 16, &ratio(1, 64), DEFAULT_ATOM_CAP).unwrap();
        assert!(v.value >= libm::log(1.5) - 1e-9);
        let d0 = Measure::delta(Point::from_ints(&[0]));
        let v = relative_rate_lhs(&d0, &c, &h, 8, &ratio(1, 16), DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(relative_rate_lhs(&c, &c, &h, 0, &ratio(1, 4), 100).is_err());
        assert!(relative_rate_lhs(&c, &c, &h, 2, &int(0), 100).is_err());
    }

    #[test]
    fn cramer_examples() {
        let h = Cone::halfline();
        let d1 = Measure::delta(Point::from_ints(&[1]));
        assert_eq!(cramer_empirical(&d1, &at(int(1)), &h, 7, 100).unwrap(), 0.0);
        let c = bern(ratio(1, 2));
        assert_eq!(cramer_empirical(&c, &at(ratio(6, 5)), &h, 5, 100).unwrap(), f64::NEG_INFINITY);
        let v = cramer_empirical(&c, &at(ratio(3, 4)), &h, 64, 1000).unwrap();
        // Exact binomial tail oracle: P(Bin(64, 1/2) ≥ 48).
        let mut tail = 0.0;
        let mut binom = 1.0f64;
        for k in 0..=64u32 {
            if k > 0 {
                binom = binom * (64 - k + 1) as f64 / k as f64;
            }
            if k >= 48 {
                tail += binom;
            }
        }
        let expect = (libm::log(tail) - 64.0 * libm::log(2.0)) / 64.0;
        assert!((v - expect).abs() < 1e-12);
    }
}
