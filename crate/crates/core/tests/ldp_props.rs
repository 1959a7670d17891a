mod common;

use common::*;
use proptest::prelude::*;
use stochdom_core::ldp::{log_mgf, rate_function, relative_rate_rhs, Certification};
use stochdom_core::rational::{int, ratio, to_f64};
use stochdom_core::spectrum::SpectrumOptions;
use stochdom_core::{Cone, Point};

/// `sup_{r ≥ 0} (r c − log E e^{rX})` on a dense grid.
fn grid_rate(atoms: &[(f64, f64)], c: f64) -> f64 {
    (0..=200_000)
        .map(|k| {
            let r = k as f64 * 1e-3;
            let top = atoms.iter().map(|a| r * a.0).fold(f64::NEG_INFINITY, f64::max);
            let m: f64 = atoms.iter().map(|(x, w)| w * (r * x - top).exp()).sum();
            r * c - top - m.ln()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rate_is_nonnegative_monotone_and_convex(mu in prob_1d(5)) {
        let h = Cone::halfline();
        let (lo, hi) = mu.scalar_range().unwrap();
        let mean = mu.mean().unwrap().coords()[0].clone();
        prop_assert_eq!(rate_function(&mu, &Point::scalar(mean.clone()), &h).unwrap().value, 0.0);
        let cs: Vec<_> = (0..=8).map(|k| &mean + (&hi - &mean) * ratio(k, 8)).collect();
        let vals: Vec<f64> = cs.iter().map(|c| rate_function(&mu, &Point::scalar(c.clone()), &h).unwrap().value).collect();
        for v in &vals {
            prop_assert!(*v >= 0.0);
        }
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        for w in vals.windows(3) {
            if w.iter().all(|v| v.is_finite()) {
                prop_assert!(w[1] <= (w[0] + w[2]) / 2.0 + 1e-7);
            }
        }
        prop_assert!(rate_function(&mu, &Point::scalar(hi + int(1)), &h).unwrap().value.is_infinite());
        prop_assert_eq!(rate_function(&mu, &Point::scalar(lo), &h).unwrap().value, 0.0);
    }

    #[test]
    fn bisection_matches_dense_grid(mu in prob_1d(4), frac in 1i64..8) {
        let (_, hi) = mu.scalar_range().unwrap();
        let mean = mu.mean().unwrap().coords()[0].clone();
        let c = &mean + (&hi - &mean) * ratio(frac, 10);
        let r = rate_function(&mu, &Point::scalar(c.clone()), &Cone::halfline()).unwrap();
        let oracle = grid_rate(&scalar(&mu), to_f64(&c));
        // The grid is a lower bound, tight to second order in its spacing.
        prop_assert!(r.value >= oracle - 1e-9);
        prop_assert!(r.value - oracle < 1e-5, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn log_mgf_is_additive_under_convolution(x in prob_2d(3), y in prob_2d(3), t in point_2d()) {
        let xy = x.convolve(&y).unwrap();
        let lhs = log_mgf(&xy, &t).unwrap();
        let rhs = log_mgf(&x, &t).unwrap() + log_mgf(&y, &t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn relative_rate_vanishes_for_dominated_pairs(x in prob_1d(4), a in 0i64..5) {
        let y = x.shift(&Point::scalar(ratio(a, 4))).unwrap();
        let opts = SpectrumOptions { grid_points: 65, ..SpectrumOptions::default() };
        let r = relative_rate_rhs(&x, &y, &Cone::halfline(), &opts).unwrap();
        prop_assert!(r.value.abs() < 1e-12, "value {}", r.value);
    }
}

#[test]
fn independent_product_rate_is_the_sum_of_marginal_rates() {
    let coin = bern(ratio(1, 2));
    let biased = bern(ratio(1, 3));
    let plane = stochdom_core::Measure::new(
        2,
        coin.iter().flat_map(|(a, wa)| {
            biased.iter().map(move |(b, wb)| (Point::new(vec![a.coords()[0].clone(), b.coords()[0].clone()]), wa * wb))
        }),
    )
    .unwrap();
    let c = Point::new(vec![ratio(3, 4), ratio(1, 2)]);
    let r = rate_function(&plane, &c, &Cone::orthant(2).unwrap()).unwrap();
    let h = Cone::halfline();
    let sum = rate_function(&coin, &Point::scalar(ratio(3, 4)), &h).unwrap().value
        + rate_function(&biased, &Point::scalar(ratio(1, 2)), &h).unwrap().value;
    assert!((r.value - sum).abs() < 1e-6, "{} vs {}", r.value, sum);
    assert_eq!(r.certified, Certification::GridRefined);
}
