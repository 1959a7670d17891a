#![allow(dead_code)]

use proptest::prelude::*;
use stochdom_core::rational::{int, ratio};
use stochdom_core::{Measure, Point, Rational};

/// Probability measure on at most `max_atoms` points `k/den` in `[-3, 3]`.
pub fn prob_1d(max_atoms: usize) -> impl Strategy<Value = Measure> {
    prop::collection::vec((-12i64..=12, 1i64..=4, 1i64..=6), 1..=max_atoms).prop_map(|atoms| {
        let total: i64 = atoms.iter().map(|a| a.2).sum();
        Measure::from_scalars(atoms.into_iter().map(|(n, d, w)| (ratio(n, d), ratio(w, total)))).unwrap()
    })
}

/// Probability measure on at most `max_atoms` integer points of `[-2, 2]^2`.
pub fn prob_2d(max_atoms: usize) -> impl Strategy<Value = Measure> {
    prop::collection::vec((-2i64..=2, -2i64..=2, 1i64..=6), 1..=max_atoms).prop_map(|atoms| {
        let total: i64 = atoms.iter().map(|a| a.2).sum();
        Measure::new(2, atoms.into_iter().map(|(a, b, w)| (Point::from_ints(&[a, b]), ratio(w, total)))).unwrap()
    })
}

pub fn point_1d() -> impl Strategy<Value = Point> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| Point::scalar(ratio(n, d)))
}

pub fn point_2d() -> impl Strategy<Value = Point> {
    (-6i64..=6, -6i64..=6, 1i64..=3).prop_map(|(a, b, d)| Point::new(vec![ratio(a, d), ratio(b, d)]))
}

pub fn scalar(m: &Measure) -> Vec<(f64, f64)> {
    m.scalar_atoms()
        .iter()
        .map(|(x, w)| (stochdom_core::rational::to_f64(x), stochdom_core::rational::to_f64(w)))
        .collect()
}

pub fn m1(atoms: &[(Rational, Rational)]) -> Measure {
    Measure::from_scalars(atoms.iter().cloned()).unwrap()
}

pub fn bern(p: Rational) -> Measure {
    m1(&[(int(0), int(1) - &p), (int(1), p)])
}

/// The curated strictly dominant pair on the line.
pub fn curated_pair() -> (Measure, Measure) {
    (
        m1(&[(ratio(2, 5), ratio(1, 10)), (ratio(3, 5), ratio(9, 10))]),
        m1(&[(ratio(1, 2), ratio(1, 2)), (ratio(4, 5), ratio(1, 2))]),
    )
}
